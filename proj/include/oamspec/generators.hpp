#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oamspec/errors.hpp"

namespace oamspec {

/// d² Hermitian, trace-orthogonal matrices with Tr(λ_j λ_k) = 2 δ_jk:
/// λ_0 = √(2/d)·I, then the symmetric, antisymmetric and diagonal
/// generalized Gell-Mann matrices.
class GeneratorBasis {
 public:
  static constexpr double kNorm = 2.0;

  explicit GeneratorBasis(int d) : d_(d) {
    if (d < 2) throw DomainError("su_generators: d must be >= 2, got " + std::to_string(d));
    using C = std::complex<double>;
    mats_.push_back(Eigen::MatrixXcd::Identity(d, d) * std::sqrt(2.0 / d));
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
        m(j, k) = m(k, j) = 1.0;
        mats_.push_back(m);
      }
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
        m(j, k) = C(0, -1);
        m(k, j) = C(0, 1);
        mats_.push_back(m);
      }
    for (int l = 1; l < d; ++l) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
      const double c = std::sqrt(2.0 / (l * (l + 1.0)));
      for (int j = 0; j < l; ++j) m(j, j) = c;
      m(l, l) = -l * c;
      mats_.push_back(m);
    }
  }

  int dimension() const { return d_; }
  std::size_t size() const { return mats_.size(); }
  const Eigen::MatrixXcd& operator[](std::size_t i) const { return mats_[i]; }

  /// Real coefficients c_j = Tr(λ_j H) / 2 of a Hermitian H = Σ c_j λ_j.
  std::vector<double> expand(const Eigen::MatrixXcd& h) const {
    std::vector<double> c(mats_.size());
    for (std::size_t i = 0; i < mats_.size(); ++i) c[i] = (mats_[i] * h).trace().real() / kNorm;
    return c;
  }
  Eigen::MatrixXcd compose(const std::vector<double>& c) const {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d_, d_);
    for (std::size_t i = 0; i < mats_.size(); ++i) h += c.at(i) * mats_[i];
    return h;
  }

 private:
  int d_;
  std::vector<Eigen::MatrixXcd> mats_;
};

inline GeneratorBasis su_generators(int d) { return GeneratorBasis(d); }

}  // namespace oamspec
