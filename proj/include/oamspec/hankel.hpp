#pragma once

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "oamspec/errors.hpp"

namespace oamspec {

using Complex = std::complex<double>;

/// Complex radial field sampled on `radii` with quadrature weights such that
/// Σ weights |values|² ≈ ∫ |U(r)|² r dr.
struct RadialField {
  std::vector<double> radii;
  std::vector<Complex> values;
  std::vector<double> weights;

  double energy() const {
    double e = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) e += weights[i] * std::norm(values[i]);
    return e;
  }
  std::vector<double> intensity() const {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::norm(values[i]);
    return out;
  }
};

/// Order-0 quasi-discrete Hankel transform (Guizar-Sicairos & Gutiérrez-Vega).
/// Samples f at r_n = j_n R / S and F at q_m = j_m / (2πR), where j_k are the
/// zeros of J0 and S = j_{N+1}. The scaled transform matrix is symmetric and
/// its own inverse to high accuracy, which makes Parseval hold on the nodes.
///
/// The transform computed is F(q) = 2π ∫_0^R f(r) J0(2π q r) r dr.
class HankelTransform {
 public:
  HankelTransform(double apertureRadius, int points) : R_(apertureRadius), n_(points) {
    if (!(apertureRadius > 0.0) || points < 8)
      throw DomainError("HankelTransform: need radius > 0 and at least 8 points");
    std::vector<double> zeros(static_cast<std::size_t>(n_ + 1));
    boost::math::cyl_bessel_j_zero(0.0, 1, static_cast<unsigned>(n_ + 1), zeros.begin());
    S_ = zeros.back();
    zeros.pop_back();
    V_ = S_ / (2.0 * std::numbers::pi * R_);

    radii_.resize(n_);
    freqs_.resize(n_);
    absJ1_.resize(n_);
    for (int k = 0; k < n_; ++k) {
      radii_[k] = zeros[k] * R_ / S_;
      freqs_[k] = zeros[k] / (2.0 * std::numbers::pi * R_);
      absJ1_[k] = std::abs(boost::math::cyl_bessel_j(1, zeros[k]));
    }
    kernel_.resize(n_, n_);
    for (int m = 0; m < n_; ++m)
      for (int k = m; k < n_; ++k) {
        const double v =
            2.0 * boost::math::cyl_bessel_j(0, zeros[m] * zeros[k] / S_) / (absJ1_[m] * absJ1_[k] * S_);
        kernel_(m, k) = v;
        kernel_(k, m) = v;
      }
  }

  int size() const { return n_; }
  double aperture() const { return R_; }
  double bandwidth() const { return V_; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& frequencies() const { return freqs_; }

  /// Weights w_n with Σ w_n |f(r_n)|² ≈ ∫_0^R |f|² r dr.
  std::vector<double> radial_weights() const { return weights(R_); }
  /// Same for the frequency nodes.
  std::vector<double> frequency_weights() const { return weights(V_); }

  /// Samples at radii() → transform at frequencies().
  Eigen::VectorXcd forward(const Eigen::VectorXcd& f) const { return apply(f, R_, V_); }
  /// Samples at frequencies() → inverse transform at radii().
  Eigen::VectorXcd inverse(const Eigen::VectorXcd& F) const { return apply(F, V_, R_); }

  /// Forward transform at an arbitrary frequency, by node quadrature.
  Complex forward_at(const Eigen::VectorXcd& f, double q) const { return at(f, radii_, radial_weights(), q); }
  /// Inverse transform at an arbitrary radius, by node quadrature.
  Complex inverse_at(const Eigen::VectorXcd& F, double r) const {
    return at(F, freqs_, frequency_weights(), r);
  }

  /// Free-space Fresnel propagation of a field sampled on radii() over
  /// distance z (angular spectrum with the paraxial transfer function).
  Eigen::VectorXcd fresnel(const Eigen::VectorXcd& f, double wavelength, double z) const {
    Eigen::VectorXcd F = forward(f);
    for (int m = 0; m < n_; ++m)
      F[m] *= std::exp(Complex(0.0, -std::numbers::pi * wavelength * z * freqs_[m] * freqs_[m]));
    return inverse(F);
  }

 private:
  Eigen::VectorXcd apply(const Eigen::VectorXcd& in, double inScale, double outScale) const {
    if (in.size() != n_) throw DomainError("HankelTransform: sample count mismatch");
    Eigen::VectorXcd scaled(n_);
    for (int k = 0; k < n_; ++k) scaled[k] = in[k] * inScale / absJ1_[k];
    Eigen::VectorXcd out = kernel_ * scaled;
    for (int k = 0; k < n_; ++k) out[k] *= absJ1_[k] / outScale;
    return out;
  }

  static Complex at(const Eigen::VectorXcd& v, const std::vector<double>& nodes,
                    const std::vector<double>& w, double x) {
    Complex sum = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k)
      sum += w[k] * v[static_cast<Eigen::Index>(k)] *
             boost::math::cyl_bessel_j(0, 2.0 * std::numbers::pi * nodes[k] * x);
    return 2.0 * std::numbers::pi * sum;
  }

  std::vector<double> weights(double scale) const {
    std::vector<double> w(n_);
    for (int k = 0; k < n_; ++k) w[k] = 2.0 * scale * scale / (S_ * S_ * absJ1_[k] * absJ1_[k]);
    return w;
  }

  double R_;
  int n_;
  double S_ = 0.0, V_ = 0.0;
  std::vector<double> radii_, freqs_, absJ1_;
  Eigen::MatrixXd kernel_;
};

}  // namespace oamspec
