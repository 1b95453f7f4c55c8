#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "oamspec/density_matrix.hpp"

namespace oamspec {

namespace detail {

// Eigenvalues at rounding level are zeroed before the square root, otherwise
// they come back as ~1e-8 and spoil fidelities of low-rank states.
inline Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
  const Eigen::VectorXd ev = es.eigenvalues();
  const double cut = 4.0 * m.rows() * std::numeric_limits<double>::epsilon() * ev.cwiseAbs().maxCoeff();
  Eigen::VectorXd s(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) s[i] = ev[i] > cut ? std::sqrt(ev[i]) : 0.0;
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Uhlmann fidelity [Tr √(√ρ σ √ρ)]², evaluated as the squared trace norm
/// of √ρ √σ.
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.d != sigma.d) throw DomainError("fidelity: dimension mismatch");
  const Eigen::MatrixXcd m = detail::psd_sqrt(rho.rho) * detail::psd_sqrt(sigma.rho);
  const double t = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues().sum();
  return std::clamp(t * t, 0.0, 1.0);
}

inline double linear_entropy(const DensityMatrix& rho) {
  return std::max(0.0, 1.0 - (rho.rho * rho.rho).trace().real());
}

/// CGLMP value I_d with the two-setting measurements that are optimal for the
/// maximally entangled state: Alice α ∈ {0, 1/2}, Bob β ∈ {1/4, −1/4}. The
/// signal index is read reversed (n → d−1−n) so the anticorrelated state
/// Σ|−ℓ⟩|ℓ⟩ is treated as Σ|n⟩|n⟩.
inline double cglmp_value(const DensityMatrix& rho, int d) {
  if (d < 2 || rho.d != d) throw DomainError("cglmp_value: dimension mismatch");
  const double alpha[2] = {0.0, 0.5};
  const double beta[2] = {0.25, -0.25};
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  auto alice = [&](int a, int k) {
    Eigen::VectorXcd v(d);
    for (int j = 0; j < d; ++j) v[d - 1 - j] = std::polar(norm, 2 * std::numbers::pi * j * (k + alpha[a]) / d);
    return v;
  };
  auto bob = [&](int b, int l) {
    Eigen::VectorXcd v(d);
    for (int j = 0; j < d; ++j) v[j] = std::polar(norm, -2 * std::numbers::pi * j * (l - beta[b]) / d);
    return v;
  };
  // P[a][b](k, l) = P(A_a = k, B_b = l)
  Eigen::MatrixXd P[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      P[a][b].resize(d, d);
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const Eigen::VectorXcd u = alice(a, k), w = bob(b, l);
          Eigen::VectorXcd v(d * d);
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) v[i * d + j] = u[i] * w[j];
          P[a][b](k, l) = (v.adjoint() * rho.rho * v)(0, 0).real();
        }
    }
  auto mod = [d](int x) { return ((x % d) + d) % d; };
  // P(A_a = B_b + k)
  auto ab = [&](int a, int b, int k) {
    double s = 0;
    for (int j = 0; j < d; ++j) s += P[a][b](mod(j + k), j);
    return s;
  };
  // P(B_b = A_a + k)
  auto ba = [&](int b, int a, int k) {
    double s = 0;
    for (int j = 0; j < d; ++j) s += P[a][b](j, mod(j + k));
    return s;
  };
  double I = 0.0;
  for (int k = 0; k < d / 2; ++k) {
    const double w = 1.0 - 2.0 * k / (d - 1.0);
    const double plus = ab(0, 0, k) + ba(0, 1, k + 1) + ab(1, 1, k) + ba(1, 0, k);
    const double minus = ab(0, 0, -k - 1) + ba(0, 1, -k) + ab(1, 1, -k - 1) + ba(1, 0, -k - 1);
    I += w * (plus - minus);
  }
  return I;
}

/// Fidelity to the MES above (d − 1)/d certifies dimension d.
inline bool dimensional_witness(double F, int d) {
  if (!(F >= 0.0 && F <= 1.0)) throw DomainError("dimensional_witness: F must lie in [0, 1]");
  if (d < 2) throw DomainError("dimensional_witness: d must be >= 2");
  return F > (d - 1.0) / d;
}

}  // namespace oamspec
