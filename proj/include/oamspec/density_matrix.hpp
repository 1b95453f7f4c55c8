#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "oamspec/errors.hpp"
#include "oamspec/spectrum.hpp"

namespace oamspec {

/// Two-qudit state on |n_s⟩ ⊗ |n_i⟩ (row index n_s·d + n_i), where the
/// qudit index is n = ℓ + (d − 1)/2.
struct DensityMatrix {
  int d = 0;
  Eigen::MatrixXcd rho;

  DensityMatrix() = default;
  DensityMatrix(int dim, Eigen::MatrixXcd m) : d(dim), rho(std::move(m)) {
    if (dim < 2 || rho.rows() != dim * dim || rho.cols() != dim * dim)
      throw DomainError("DensityMatrix: matrix must be d² × d²");
  }

  int size() const { return d * d; }
  double hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }
  double trace() const { return rho.trace().real(); }
  Eigen::VectorXd eigenvalues() const {
    const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues();
  }
  double min_eigenvalue() const { return eigenvalues().minCoeff(); }
  bool is_physical(double tol = 1e-10) const {
    return hermiticity_error() <= tol && std::abs(trace() - 1.0) <= tol && min_eigenvalue() >= -tol;
  }
};

inline DensityMatrix pure_state(int d, const Eigen::VectorXcd& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw DegenerateInputError("pure_state: zero vector");
  const Eigen::VectorXcd u = psi / n;
  return DensityMatrix(d, u * u.adjoint());
}

inline int qudit_index(int ell, int d) { return ell + (d - 1) / 2; }

/// |ψ⟩ ∝ Σ_ℓ C(ℓ) |−ℓ⟩_s |ℓ⟩_i over ℓ ∈ [−(d−1)/2, (d−1)/2].
inline Eigen::VectorXcd anticorrelated_vector(const SpiralSpectrum& s, int d) {
  if (d < 2 || d % 2 == 0) throw DomainError("theoretical_state: d must be odd, got " + std::to_string(d));
  const int h = (d - 1) / 2;
  if (!s.contains(-h) || !s.contains(h))
    throw WindowError("theoretical_state: window [-" + std::to_string(h) + ", " + std::to_string(h) +
                      "] exceeds the spectrum window [" + std::to_string(s.ellMin) + ", " +
                      std::to_string(s.ellMax) + "]");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d * d);
  for (int ell = -h; ell <= h; ++ell) psi[qudit_index(-ell, d) * d + qudit_index(ell, d)] = s.amplitude(ell);
  return psi;
}

inline DensityMatrix theoretical_state(const SpiralSpectrum& s, int d) {
  return pure_state(d, anticorrelated_vector(s, d));
}

/// Ideal maximally entangled state (1/√d) Σ_ℓ |−ℓ⟩|ℓ⟩.
inline DensityMatrix mes(int d) {
  SpiralSpectrum flat;
  flat.ellMin = -(d - 1) / 2;
  flat.ellMax = (d - 1) / 2;
  flat.amplitudes.assign(static_cast<std::size_t>(d), 1.0);
  return theoretical_state(flat, d);
}

inline DensityMatrix maximally_mixed(int d) {
  return DensityMatrix(d, Eigen::MatrixXcd::Identity(d * d, d * d) / static_cast<double>(d * d));
}

/// Haar-random pure state.
inline DensityMatrix random_pure_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(d * d);
  for (int i = 0; i < d * d; ++i) v[i] = {g(rng), g(rng)};
  return pure_state(d, v);
}

/// Mixed state G G† / Tr from a d² × rank complex Ginibre matrix.
inline DensityMatrix random_mixed_state(int d, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd G(d * d, rank);
  for (int i = 0; i < G.rows(); ++i)
    for (int j = 0; j < rank; ++j) G(i, j) = {g(rng), g(rng)};
  Eigen::MatrixXcd r = G * G.adjoint();
  return DensityMatrix(d, r / r.trace().real());
}

/// Nearest unit-trace PSD matrix by eigenvalue clipping at zero.
inline DensityMatrix project_to_physical(const DensityMatrix& m) {
  const Eigen::MatrixXcd h = 0.5 * (m.rho + m.rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  const double total = ev.sum();
  if (!(total > 0.0)) throw DegenerateInputError("project_to_physical: no positive eigenvalues");
  ev /= total;
  return DensityMatrix(m.d, es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint());
}

}  // namespace oamspec
