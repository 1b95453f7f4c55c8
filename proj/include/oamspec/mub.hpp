#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oamspec/errors.hpp"

namespace oamspec {

inline bool is_prime(int n) {
  if (n < 2) return false;
  for (int k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

/// Complete set of d + 1 mutually unbiased bases in prime dimension d.
/// Group j < d holds |Ψ_m^j⟩ = d^{-1/2} Σ_n ω^{j n² + n m} |n⟩, ω = e^{2πi/d};
/// group d is the computational basis. For d = 2 the quadratic term uses
/// e^{iπ j n² / 2} so that groups 0 and 1 differ.
class MUBSet {
 public:
  explicit MUBSet(int d) : d_(d) {
    if (!is_prime(d)) throw DomainError("MUB construction needs a prime dimension, got d = " + std::to_string(d));
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (int j = 0; j <= d; ++j) {
      Eigen::MatrixXcd basis(d, d);
      for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) {
          if (j == d) {
            basis(n, m) = n == m ? 1.0 : 0.0;
            continue;
          }
          const double turns = d == 2 ? (j * n * n) / 4.0 + (n * m) / 2.0
                                      : static_cast<double>((j * n * n + n * m) % d) / d;
          basis(n, m) = std::polar(norm, 2.0 * std::numbers::pi * turns);
        }
      }
      groups_.push_back(std::move(basis));
    }
  }

  int dimension() const { return d_; }
  int groups() const { return d_ + 1; }
  /// Column m of group j.
  Eigen::VectorXcd state(int j, int m) const {
    if (j < 0 || j > d_ || m < 0 || m >= d_) throw DomainError("MUBSet: index out of range");
    return groups_[static_cast<std::size_t>(j)].col(m);
  }
  const Eigen::MatrixXcd& basis(int j) const { return groups_.at(static_cast<std::size_t>(j)); }

 private:
  int d_;
  std::vector<Eigen::MatrixXcd> groups_;
};

/// Largest deviation from orthonormality within any group and from 1/d
/// across groups.
struct MUBDeviation {
  double orthonormality = 0.0;
  double unbiasedness = 0.0;
};

inline MUBDeviation mub_deviation(const MUBSet& s) {
  MUBDeviation dev;
  const int d = s.dimension();
  for (int j = 0; j < s.groups(); ++j)
    for (int k = j; k < s.groups(); ++k) {
      const Eigen::MatrixXcd g = s.basis(j).adjoint() * s.basis(k);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          if (j == k) {
            dev.orthonormality = std::max(dev.orthonormality, std::abs(g(a, b) - (a == b ? 1.0 : 0.0)));
          } else {
            dev.unbiasedness = std::max(dev.unbiasedness, std::abs(std::norm(g(a, b)) - 1.0 / d));
          }
        }
    }
  return dev;
}

}  // namespace oamspec
