#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "oamspec/spectrum.hpp"

using namespace oamspec;

namespace {

const SetupParams kReferenceSetup = SetupParams::from_ratios(2.4, 0.31);

}  // namespace

TEST(SetupParams, RatiosAreDerived) {
  SetupParams p(3.0, 1.25, 9.7);
  EXPECT_EQ(p.gamma(), 3.0 / 1.25);
  EXPECT_EQ(p.eta(), 3.0 / 9.7);
  EXPECT_THROW(SetupParams(0.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(SetupParams(1.0, -1.0, 1.0), DomainError);
}

TEST(GaussianSpectrum, LargeGammaIsFlat) {
  auto s = gaussian_spectrum(SetupParams::from_ratios(1e6, 0.31), -5, 5);
  for (int ell = -5; ell <= 5; ++ell) EXPECT_NEAR(s.probability(ell), 1.0 / 11, 1e-6);
}

TEST(GaussianSpectrum, FirstOrderAmplitudeRatio) {
  auto s = gaussian_spectrum(SetupParams::from_ratios(2.0, 0.31), -1, 1);
  const double expected = 8.0 / (8.0 + 2 * 0.31 * 0.31 + 1.0);
  EXPECT_NEAR(s.amplitude(1) / s.amplitude(0), expected, 1e-14);
  EXPECT_NEAR(expected, 0.8703030830486718, 1e-15);
  EXPECT_DOUBLE_EQ(s.amplitude(-1), s.amplitude(1));
}

TEST(GaussianSpectrum, PeaksAtZeroAndIsEven) {
  auto s = gaussian_spectrum(kReferenceSetup, -12, 12);
  for (int ell = 1; ell <= 12; ++ell) {
    EXPECT_EQ(s.amplitude(ell), s.amplitude(-ell));
    EXPECT_LT(s.amplitude(ell), s.amplitude(ell - 1));
  }
}

TEST(GaussianSpectrum, SchmidtNumberAtReferenceSetup) {
  // Untruncated Gaussian; frozen from an independent scipy evaluation.
  EXPECT_NEAR(schmidt_number(gaussian_spectrum(kReferenceSetup, -12, 12)), 17.022166094842405, 1e-10);
}

TEST(GaussianSpectrum, RejectsBadWindow) {
  EXPECT_THROW(gaussian_spectrum(kReferenceSetup, 3, -3), WindowError);
  EXPECT_THROW(gaussian_spectrum(kReferenceSetup, 1, 4), WindowError);
}

TEST(ExponentialSpectrum, FirstFactorIsFlatAtTwiceEtaSquared) {
  const auto p = SetupParams::from_ratios(3.0, 0.31);
  const double a = 2 * 0.31 * 0.31;
  const double b = exponential_denominator(a, p);
  EXPECT_NEAR(b, 18.0, 1e-13);
  for (int ell = 0; ell <= 20; ++ell)
    EXPECT_NEAR(exponential_amplitude_factor(ell, a, p) / regularized_lower_gamma_int(ell + 1, b),
                1.0, 1e-13);
  auto s = exponential_spectrum(a, p, -20, 20);
  for (int ell = 1; ell <= 20; ++ell) EXPECT_LE(s.amplitude(ell), s.amplitude(ell - 1));
}

TEST(ExponentialSpectrum, SchmidtNumberAtReferenceSetup) {
  // Frozen from an independent scipy evaluation of the closed form.
  EXPECT_NEAR(schmidt_number(exponential_spectrum(0.10, kReferenceSetup, -12, 12)), 20.789363565494767,
              1e-10);
  // a = -1 of the truncated family; this is the "Gaussian a = -1" pump of the
  // measured comparison.
  EXPECT_NEAR(schmidt_number(exponential_spectrum(-1.0, kReferenceSetup, -12, 12)), 15.016345770651393,
              1e-10);
}

TEST(ExponentialSpectrum, GaussianLimitDiffersOnlyByTruncationBracket) {
  const auto p = SetupParams::from_ratios(2.0, 0.31);
  const double b = 2 * 4.0 + 2 * 0.31 * 0.31 + 1.0;
  const double bracket3 = 1.0 - boost::math::tgamma(4.0, b) / 6.0;
  const double bracket0 = 1.0 - std::exp(-b);
  const double ratioExp = exponential_amplitude_factor(3, -1.0, p) / exponential_amplitude_factor(0, -1.0, p);
  const double ratioGauss = std::pow(gaussian_decay_ratio(p), 3);
  EXPECT_NEAR(ratioExp / ratioGauss, bracket3 / bracket0, 1e-13);
  // Truncation at w_p removes ~1.9% of the ℓ = 3 amplitude for this setup.
  EXPECT_NEAR(bracket3, 0.9814778314477326, 1e-12);
}

TEST(ExponentialSpectrum, DivergenceNamesParameters) {
  const auto p = SetupParams::from_ratios(1.0, 0.5);
  try {
    exponential_spectrum(2.5, p, -3, 3);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("a=2.5"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("gamma="), std::string::npos);
  }
}

TEST(OverlapAmplitude, GaussianPumpMatchesClosedForm) {
  for (double gamma : {0.5, 2.0, 4.7})
    for (double eta : {0.1, 0.31, 1.0}) {
      const auto p = SetupParams::from_ratios(gamma, eta);
      const double base = overlap_amplitude(PumpProfile::gaussian(), 0, p);
      for (int ell : {1, 2, 5, 11, 20})
        EXPECT_NEAR(overlap_amplitude(PumpProfile::gaussian(), ell, p) / base,
                    std::pow(gaussian_decay_ratio(p), ell), 1e-8)
            << gamma << " " << eta << " " << ell;
    }
}

TEST(OverlapAmplitude, GaussianAbsoluteValue) {
  // 2π ∫ e^{-r²/wp²} R0² e^{-2r²/wf²} r dr = 2/(w_si² b') with b' = 1/wp² + 2/w_si² + 2/wf².
  const SetupParams p(1.3, 0.7, 2.9);
  const double bPrime = 1 / (1.3 * 1.3) + 2 / (0.7 * 0.7) + 2 / (2.9 * 2.9);
  EXPECT_NEAR(overlap_amplitude(PumpProfile::gaussian(), 0, p), 2.0 / (0.7 * 0.7 * bPrime), 1e-13);
}

TEST(OverlapAmplitude, TruncatedExponentialMatchesClosedForm) {
  const auto p = SetupParams::from_ratios(2.0, 0.31);
  const auto pump = PumpProfile::truncated_exponential(0.19);
  std::vector<double> quad, closed;
  for (int ell = 0; ell <= 8; ++ell) {
    quad.push_back(overlap_amplitude(pump, ell, p));
    closed.push_back(exponential_amplitude_factor(ell, 0.19, p));
  }
  double nq = 0, nc = 0;
  for (int i = 0; i <= 8; ++i) {
    nq += quad[i] * quad[i];
    nc += closed[i] * closed[i];
  }
  for (int i = 0; i <= 8; ++i) EXPECT_NEAR(quad[i] / std::sqrt(nq), closed[i] / std::sqrt(nc), 1e-8);
}

TEST(OverlapAmplitude, TabulatedGaussianMatchesAnalytic) {
  const SetupParams p = SetupParams::from_ratios(2.4, 0.31, 1.7);
  std::vector<RadialSample> table;
  const int n = 4096;
  for (int i = 0; i < n; ++i) {
    const double r = 6.0 * p.w_p() * i / (n - 1);
    table.push_back({r, std::exp(-r * r / (p.w_p() * p.w_p()))});
  }
  auto tab = numerical_spectrum(PumpProfile::tabulated(table), p, -12, 12);
  auto ref = numerical_spectrum(PumpProfile::gaussian(), p, -12, 12);
  for (int ell = -12; ell <= 12; ++ell) EXPECT_NEAR(tab.amplitude(ell), ref.amplitude(ell), 1e-6);
}

TEST(NumericalSpectrum, GaussianEqualsClosedFormPointwise) {
  auto num = numerical_spectrum(PumpProfile::gaussian(), kReferenceSetup, -12, 12);
  auto closed = gaussian_spectrum(kReferenceSetup, -12, 12);
  for (int ell = -12; ell <= 12; ++ell) EXPECT_NEAR(num.amplitude(ell), closed.amplitude(ell), 1e-8);
}

TEST(NumericalSpectrum, AiryPumpRegression) {
  // Frozen from an mpmath quadrature (25 digits) with panel edges at the
  // zeros of J1; the library integrand has no such hints.
  auto s = numerical_spectrum(PumpProfile::airy(1), kReferenceSetup, -12, 12);
  double norm = 0;
  for (double c : s.amplitudes) norm += c * c;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  EXPECT_NEAR(schmidt_number(s), 4.570894649532203, 1e-8);
  EXPECT_NEAR(s.amplitude(0), 0.6294168837555042, 1e-9);
  EXPECT_NEAR(s.amplitude(1), 0.4018357835426243, 1e-9);
  EXPECT_NEAR(s.amplitude(-5), 0.0899403841602278, 1e-9);
  EXPECT_NEAR(s.amplitude(12), 0.0473908461961164, 1e-9);
}

TEST(NumericalSpectrum, ZeroPumpIsDegenerate) {
  auto zero = PumpProfile::tabulated({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}});
  EXPECT_THROW(numerical_spectrum(zero, kReferenceSetup, -3, 3), DegenerateInputError);
}

TEST(PumpProfile, TabulatedValidation) {
  EXPECT_THROW(PumpProfile::tabulated({{0.1, 1.0}, {1.0, 1.0}}), DomainError);
  EXPECT_THROW(PumpProfile::tabulated({{0.0, 1.0}, {0.0, 1.0}}), DomainError);
  EXPECT_THROW(PumpProfile::tabulated({{0.0, 1.0}, {1.0, -0.1}}), DomainError);
  auto t = PumpProfile::tabulated({{0.0, 1.0}, {2.0, 3.0}});
  EXPECT_DOUBLE_EQ(t(1.0, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(t(2.5, 1.0), 0.0);
}

TEST(PumpProfile, TruncatedExponentialCutsAtWaist) {
  auto e = PumpProfile::truncated_exponential(0.19);
  EXPECT_DOUBLE_EQ(e(2.0, 2.0), std::exp(0.19));
  EXPECT_EQ(e(2.0000001, 2.0), 0.0);
}

TEST(SchmidtNumber, UniformAndSingleMode) {
  SpiralSpectrum s{-3, 3, std::vector<double>(7, 1.0 / std::sqrt(7.0)), true};
  EXPECT_NEAR(schmidt_number(s), 7.0, 1e-12);
  SpiralSpectrum one{-2, 2, {0, 0, 1, 0, 0}, true};
  EXPECT_DOUBLE_EQ(schmidt_number(one), 1.0);
}

TEST(SchmidtNumber, RejectsUnnormalized) {
  SpiralSpectrum s{-1, 1, {1, 1, 1}, false};
  EXPECT_THROW(schmidt_number(s), NormalizationError);
  s.normalized = true;
  EXPECT_THROW(schmidt_number(s), NormalizationError);
}

TEST(SpectrumProperties, NormalizedEvenAndBounded) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> gammaD(0.5, 5.0), etaD(0.1, 1.0), aD(-3.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = SetupParams::from_ratios(gammaD(rng), etaD(rng));
    const double a = std::min(aD(rng), 2 * p.gamma() * p.gamma() + 2 * p.eta() * p.eta() - 0.1);
    auto s = exponential_spectrum(a, p, -20, 20);
    double norm = 0;
    for (double c : s.amplitudes) {
      EXPECT_GE(c, 0.0);
      norm += c * c;
    }
    EXPECT_NEAR(norm, 1.0, 1e-12);
    for (int ell = 1; ell <= 20; ++ell) EXPECT_EQ(s.amplitude(ell), s.amplitude(-ell));
    const double K = schmidt_number(s);
    EXPECT_GE(K, 1.0 - 1e-12);
    EXPECT_LE(K, 41.0 + 1e-12);
  }
}

TEST(CrosstalkVisibility, DiagonalIsPerfect) {
  JointCountsMatrix m(3);
  for (int i = -3; i <= 3; ++i) m.at(i, i) = 5.0 + i;
  EXPECT_DOUBLE_EQ(crosstalk_visibility(m), 1.0);
}

TEST(CrosstalkVisibility, UniformNeighbours) {
  JointCountsMatrix m(12);
  for (int i = -12; i <= 12; ++i) {
    m.at(i, i) = 1.0;
    if (i > -12) m.at(i, i - 1) = 0.1;
    if (i < 12) m.at(i, i + 1) = 0.1;
  }
  EXPECT_NEAR(crosstalk_visibility(m), 1.0 - 48 * 0.01 / 25, 1e-15);
  EXPECT_NEAR(crosstalk_visibility(m), 0.9808, 1e-15);
}

TEST(CrosstalkVisibility, Errors) {
  EXPECT_THROW(JointCountsMatrix(0), DomainError);
  JointCountsMatrix m(2);
  m.at(0, 1) = 1.0;
  EXPECT_THROW(crosstalk_visibility(m), DivisionError);
}
