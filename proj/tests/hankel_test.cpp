#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oamspec/hankel.hpp"

using namespace oamspec;

namespace {

Eigen::VectorXcd sample(const HankelTransform& ht, double (*f)(double)) {
  Eigen::VectorXcd v(ht.size());
  for (int n = 0; n < ht.size(); ++n) v[n] = f(ht.radii()[n]);
  return v;
}

double self_reciprocal(double r) { return std::exp(-std::numbers::pi * r * r); }

}  // namespace

// exp(-π r²) is its own order-0 Hankel transform under F(q) = 2π∫ f J0(2πqr) r dr.
TEST(Hankel, GaussianIsSelfReciprocal) {
  const HankelTransform ht(6.0, 256);
  const auto F = ht.forward(sample(ht, self_reciprocal));
  for (int m = 0; m < ht.size(); ++m) {
    if (ht.frequencies()[m] > 3.0) break;
    EXPECT_NEAR(F[m].real(), self_reciprocal(ht.frequencies()[m]), 1e-12);
    EXPECT_NEAR(F[m].imag(), 0.0, 1e-15);
  }
  EXPECT_NEAR(ht.forward_at(sample(ht, self_reciprocal), 0.0).real(), 1.0, 1e-12);
  EXPECT_NEAR(ht.inverse_at(F, 0.37).real(), self_reciprocal(0.37), 1e-12);
}

TEST(Hankel, RoundTripAndParseval) {
  const HankelTransform ht(5.0, 300);
  Eigen::VectorXcd f(ht.size());
  for (int n = 0; n < ht.size(); ++n) {
    const double r = ht.radii()[n];
    f[n] = std::polar(std::exp(-r * r), 3.0 * r * r);
  }
  const auto F = ht.forward(f);
  EXPECT_LT((ht.inverse(F) - f).norm() / f.norm(), 1e-12);

  const auto wr = ht.radial_weights();
  const auto wq = ht.frequency_weights();
  double er = 0, eq = 0;
  for (int k = 0; k < ht.size(); ++k) {
    er += wr[k] * std::norm(f[k]);
    eq += wq[k] * std::norm(F[k]);
  }
  EXPECT_NEAR(er, 0.25, 1e-12);  // ∫ e^{-2r²} r dr
  EXPECT_NEAR(eq / er, 1.0, 1e-12);
}

TEST(Hankel, FresnelGaussianMatchesBeamWaistGrowth) {
  const double w = 1e-3, lambda = 633e-9;
  const double zR = std::numbers::pi * w * w / lambda;
  const HankelTransform ht(8 * w, 400);
  Eigen::VectorXcd f(ht.size());
  for (int n = 0; n < ht.size(); ++n) f[n] = std::exp(-ht.radii()[n] * ht.radii()[n] / (w * w));
  const auto g = ht.fresnel(f, lambda, zR);
  const double wz = w * std::sqrt(2.0);
  for (int n = 0; n < ht.size(); n += 7) {
    const double r = ht.radii()[n];
    EXPECT_NEAR(std::norm(g[n]), (w * w) / (wz * wz) * std::exp(-2 * r * r / (wz * wz)), 1e-10);
  }
}

TEST(Hankel, RejectsBadArguments) {
  EXPECT_THROW(HankelTransform(0.0, 64), DomainError);
  EXPECT_THROW(HankelTransform(1.0, 4), DomainError);
  const HankelTransform ht(1.0, 16);
  EXPECT_THROW(ht.forward(Eigen::VectorXcd::Zero(15)), DomainError);
}
