#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "oamspec/errors.hpp"
#include "oamspec/incomplete_gamma.hpp"
#include "oamspec/pump.hpp"
#include "oamspec/quadrature.hpp"

namespace oamspec {

/// Coincidence amplitudes C(-ℓ, ℓ) over [ellMin, ellMax]. Amplitudes are real
/// and non-negative; probabilities are their squares.
struct SpiralSpectrum {
  int ellMin = 0;
  int ellMax = 0;
  std::vector<double> amplitudes;  // amplitudes[ℓ - ellMin]
  bool normalized = false;

  std::size_t size() const { return amplitudes.size(); }
  double amplitude(int ell) const { return amplitudes.at(static_cast<std::size_t>(ell - ellMin)); }
  double probability(int ell) const {
    const double c = amplitude(ell);
    return c * c;
  }
  bool contains(int ell) const { return ell >= ellMin && ell <= ellMax; }
};

inline void validate_window(int ellMin, int ellMax) {
  if (ellMin > ellMax)
    throw WindowError("window [" + std::to_string(ellMin) + ", " + std::to_string(ellMax) +
                      "] is empty (ellMin > ellMax)");
  if (ellMin > 0 || ellMax < 0)
    throw WindowError("window [" + std::to_string(ellMin) + ", " + std::to_string(ellMax) +
                      "] must contain ell = 0");
}

/// Scales amplitudes so that Σ C² = 1. Throws DegenerateInputError when all
/// amplitudes vanish.
inline SpiralSpectrum normalize(SpiralSpectrum s) {
  double norm2 = 0.0;
  for (double c : s.amplitudes) norm2 += c * c;
  if (!(norm2 > 0.0) || !std::isfinite(norm2))
    throw DegenerateInputError("spectrum has no weight to normalize");
  const double scale = 1.0 / std::sqrt(norm2);
  for (double& c : s.amplitudes) c *= scale;
  s.normalized = true;
  return s;
}

namespace detail {

template <class F>
SpiralSpectrum tabulate_window(int ellMin, int ellMax, F&& amplitudeOf) {
  validate_window(ellMin, ellMax);
  SpiralSpectrum s;
  s.ellMin = ellMin;
  s.ellMax = ellMax;
  s.amplitudes.reserve(static_cast<std::size_t>(ellMax - ellMin + 1));
  for (int ell = ellMin; ell <= ellMax; ++ell) s.amplitudes.push_back(amplitudeOf(ell));
  return normalize(std::move(s));
}

}  // namespace detail

/// Ratio 2γ²/(2γ² + 2η² + 1) whose |ℓ|-th power is the Gaussian-pump amplitude.
inline double gaussian_decay_ratio(const SetupParams& p) {
  const double g2 = 2.0 * p.gamma() * p.gamma();
  return g2 / (g2 + 2.0 * p.eta() * p.eta() + 1.0);
}

/// Closed-form spectrum of an untruncated Gaussian pump: C ∝ ratio^|ℓ|.
inline SpiralSpectrum gaussian_spectrum(const SetupParams& p, int ellMin, int ellMax) {
  const double logRatio = std::log(gaussian_decay_ratio(p));
  return detail::tabulate_window(ellMin, ellMax,
                                 [&](int ell) { return std::exp(std::abs(ell) * logRatio); });
}

/// b = 2γ² + 2η² - a, the exponent of the combined Gaussian inside the
/// truncated-exponential overlap. Must be positive.
inline double exponential_denominator(double a, const SetupParams& p) {
  const double b = 2.0 * p.gamma() * p.gamma() + 2.0 * p.eta() * p.eta() - a;
  if (!(b > 0.0))
    throw DivergenceError("2*gamma^2 + 2*eta^2 - a = " + std::to_string(b) +
                          " <= 0 (a=" + std::to_string(a) + ", gamma=" +
                          std::to_string(p.gamma()) + ", eta=" + std::to_string(p.eta()) + ")");
  return b;
}

/// Un-normalized truncated-exponential amplitude
/// (2γ²/b)^|ℓ| [1 - Γ(1+|ℓ|, b)/|ℓ|!].
inline double exponential_amplitude_factor(int ell, double a, const SetupParams& p) {
  const double b = exponential_denominator(a, p);
  const int m = std::abs(ell);
  const double bracket = regularized_lower_gamma_int(m + 1, b);
  if (bracket == 0.0) return 0.0;
  return std::exp(m * std::log(2.0 * p.gamma() * p.gamma() / b) + std::log(bracket));
}

/// Closed-form spectrum of the truncated exponential pump exp(a r²/w_p²) H(w_p - r).
inline SpiralSpectrum exponential_spectrum(double a, const SetupParams& p, int ellMin, int ellMax) {
  exponential_denominator(a, p);
  return detail::tabulate_window(ellMin, ellMax, [&](int ell) {
    return exponential_amplitude_factor(ell, a, p);
  });
}

/// |R_ℓ(r)|² for the p = 0 LG mode at waist w:
/// R = sqrt(2/(π|ℓ|!)) (1/w) (√2 r/w)^|ℓ| exp(-r²/w²).
inline double lg_radial_squared(int ell, double r, double w) {
  const int m = std::abs(ell);
  const double x2 = 2.0 * r * r / (w * w);
  if (x2 == 0.0) return m == 0 ? 2.0 / (std::numbers::pi * w * w) : 0.0;
  return 2.0 / (std::numbers::pi * w * w) *
         std::exp(m * std::log(x2) - std::lgamma(m + 1.0) - x2);
}

/// Overlap integral of the pump with LG_{-ℓ} LG_{ℓ} and the squared fiber
/// mode. The azimuthal integral enforces ℓ_s = -ℓ_i and leaves
/// 2π ∫ Φ(r) R_|ℓ|(r)² G(r)² r dr with G(r) = exp(-r²/w_f²).
inline double overlap_amplitude(const PumpProfile& pump, int ell, const SetupParams& p) {
  const double rMax =
      std::min(6.0 * std::max({p.w_p(), p.w_si(), p.w_f()}), pump.support_end(p.w_p()));
  std::vector<double> breaks;
  if (pump.kind() == PumpKind::Tabulated) {
    for (const auto& s : pump.samples()) breaks.push_back(s.radius);
  } else {
    // Peak of the LG ring, so the first panels do not straddle it blindly.
    breaks.push_back(std::sqrt(std::abs(ell) / 2.0) * p.w_si());
  }

  const double wf2 = p.w_f() * p.w_f();
  double absMass = 0.0;
  auto integrand = [&](double r) {
    const double v = pump(r, p.w_p()) * lg_radial_squared(ell, r, p.w_si()) *
                     std::exp(-2.0 * r * r / wf2) * r;
    return v;
  };
  QuadratureOptions opt;
  opt.relTol = 1e-13;
  const auto res = integrate(integrand, 0.0, rMax, opt, breaks);
  double value = 2.0 * std::numbers::pi * res.value;

  if (value < 0.0) {
    auto absIntegrand = [&](double r) { return std::abs(integrand(r)); };
    absMass = 2.0 * std::numbers::pi * integrate(absIntegrand, 0.0, rMax, opt, breaks).value;
    if (-value > 1e-12 * absMass)
      throw AccuracyError("overlap amplitude is negative beyond rounding", -value);
    value = 0.0;
  }
  return value;
}

/// Spectrum from numerical quadrature of the overlap integral.
inline SpiralSpectrum numerical_spectrum(const PumpProfile& pump, const SetupParams& p, int ellMin,
                                         int ellMax) {
  validate_window(ellMin, ellMax);
  // Amplitudes depend on |ℓ| only.
  const int maxAbs = std::max(-ellMin, ellMax);
  std::vector<double> byAbs(static_cast<std::size_t>(maxAbs + 1));
  for (int m = 0; m <= maxAbs; ++m) byAbs[m] = overlap_amplitude(pump, m, p);
  try {
    return detail::tabulate_window(ellMin, ellMax, [&](int ell) { return byAbs[std::abs(ell)]; });
  } catch (const DegenerateInputError&) {
    throw DegenerateInputError("pump has zero overlap with every mode in the window");
  }
}

/// K = 1 / Σ C⁴ of a normalized spectrum.
inline double schmidt_number(const SpiralSpectrum& s) {
  double p2 = 0.0, p4 = 0.0;
  for (double c : s.amplitudes) {
    p2 += c * c;
    p4 += c * c * c * c;
  }
  if (!s.normalized || std::abs(p2 - 1.0) > 1e-12)
    throw NormalizationError("schmidt_number needs a normalized spectrum (sum C^2 = " +
                             std::to_string(p2) + ")");
  return 1.0 / p4;
}

/// Joint coincidence matrix over ℓ_s, ℓ_i ∈ [-L, L].
class JointCountsMatrix {
 public:
  explicit JointCountsMatrix(int halfWidth)
      : L_(halfWidth), counts_(static_cast<std::size_t>((2 * halfWidth + 1) * (2 * halfWidth + 1))) {
    if (halfWidth < 1) throw DomainError("JointCountsMatrix needs at least a 3x3 grid");
  }

  int half_width() const { return L_; }
  int dimension() const { return 2 * L_ + 1; }

  double& at(int ellS, int ellI) { return counts_.at(index(ellS, ellI)); }
  double at(int ellS, int ellI) const { return counts_.at(index(ellS, ellI)); }

 private:
  std::size_t index(int ellS, int ellI) const {
    if (std::abs(ellS) > L_ || std::abs(ellI) > L_)
      throw WindowError("JointCountsMatrix index outside [-L, L]");
    return static_cast<std::size_t>((ellS + L_) * dimension() + (ellI + L_));
  }

  int L_;
  std::vector<double> counts_;
};

/// 1 - Σ_{j=i±1} C_ij² / Σ_i C_ii².
inline double crosstalk_visibility(const JointCountsMatrix& m) {
  const int L = m.half_width();
  double diag = 0.0, neighbours = 0.0;
  for (int i = -L; i <= L; ++i) {
    const double c = m.at(i, i);
    if (c < 0.0) throw DomainError("crosstalk_visibility: counts must be non-negative");
    diag += c * c;
    if (i - 1 >= -L) neighbours += m.at(i, i - 1) * m.at(i, i - 1);
    if (i + 1 <= L) neighbours += m.at(i, i + 1) * m.at(i, i + 1);
  }
  if (!(diag > 0.0)) throw DivisionError("crosstalk_visibility: diagonal is all zero");
  return 1.0 - neighbours / diag;
}

}  // namespace oamspec
