#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "oamspec/density_matrix.hpp"
#include "oamspec/generators.hpp"
#include "oamspec/mub.hpp"

namespace oamspec {

/// One MUB state: group j (d = computational) and member m.
struct MubIndex {
  int group = 0;
  int member = 0;
  friend bool operator==(const MubIndex&, const MubIndex&) = default;
};

struct Setting {
  MubIndex signal, idler;
  friend bool operator==(const Setting&, const Setting&) = default;
};

enum class Noise { None, Poisson };

inline std::string to_string(Noise n) { return n == Noise::None ? "none" : "poisson"; }

/// Coincidence counts per setting. Noiseless counts are the real expected
/// values N·p; Poisson counts are whole numbers.
struct CountsRecord {
  int d = 0;
  std::vector<Setting> settings;
  std::vector<double> counts;
  double N = 0.0;
  std::optional<std::uint64_t> seed;
  Noise noise = Noise::None;
};

/// The d² states measured on each side: the whole computational basis plus
/// members 0..d−2 of every other group. Their projectors span the d × d
/// Hermitian matrices.
inline std::vector<MubIndex> local_settings(int d) {
  std::vector<MubIndex> s;
  for (int m = 0; m < d; ++m) s.push_back({d, m});
  for (int j = 0; j < d; ++j)
    for (int m = 0; m + 1 < d; ++m) s.push_back({j, m});
  return s;
}

/// Cross product of local_settings on both sides, signal-major: d⁴ settings.
inline std::vector<Setting> tomography_settings(int d) {
  const auto local = local_settings(d);
  std::vector<Setting> out;
  out.reserve(local.size() * local.size());
  for (const auto& a : local)
    for (const auto& b : local) out.push_back({a, b});
  return out;
}

inline Eigen::VectorXcd setting_vector(const MUBSet& mubs, const Setting& s) {
  const Eigen::VectorXcd a = mubs.state(s.signal.group, s.signal.member);
  const Eigen::VectorXcd b = mubs.state(s.idler.group, s.idler.member);
  const int d = mubs.dimension();
  Eigen::VectorXcd v(d * d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) v[i * d + k] = a[i] * b[k];
  return v;
}

inline CountsRecord simulate_counts(const DensityMatrix& rho, const MUBSet& mubs, std::vector<Setting> settings,
                                    double N, std::uint64_t seed, Noise noise) {
  if (rho.d != mubs.dimension())
    throw DomainError("simulate_counts: state dimension " + std::to_string(rho.d) + " does not match MUB dimension " +
                      std::to_string(mubs.dimension()));
  if (!(N > 0.0) || !std::isfinite(N)) throw DomainError("simulate_counts: N must be positive");
  CountsRecord rec;
  rec.d = rho.d;
  rec.N = N;
  rec.noise = noise;
  if (noise == Noise::Poisson) rec.seed = seed;
  rec.settings = std::move(settings);
  std::mt19937_64 rng(seed);
  for (const auto& s : rec.settings) {
    const Eigen::VectorXcd v = setting_vector(mubs, s);
    const double p = std::max(0.0, (v.adjoint() * rho.rho * v)(0, 0).real());
    const double mean = N * p;
    if (noise == Noise::None) {
      rec.counts.push_back(mean);
    } else {
      rec.counts.push_back(mean > 0.0 ? static_cast<double>(std::poisson_distribution<std::int64_t>(mean)(rng)) : 0.0);
    }
  }
  return rec;
}

inline CountsRecord simulate_counts(const DensityMatrix& rho, const MUBSet& mubs, double N, std::uint64_t seed,
                                    Noise noise) {
  return simulate_counts(rho, mubs, tomography_settings(rho.d), N, seed, noise);
}

inline void validate_counts(const CountsRecord& c) {
  if (!is_prime(c.d)) throw DomainError("counts: d must be prime, got " + std::to_string(c.d));
  if (c.settings.size() != c.counts.size()) throw DomainError("counts: settings and counts differ in length");
  if (!(c.N > 0.0)) throw DomainError("counts: N must be positive");
  for (double n : c.counts)
    if (!(n >= 0.0) || !std::isfinite(n)) throw DomainError("counts: counts must be finite and non-negative");
  for (const auto& s : c.settings)
    for (const MubIndex& m : {s.signal, s.idler})
      if (m.group < 0 || m.group > c.d || m.member < 0 || m.member >= c.d)
        throw DomainError("counts: setting index out of range");
}

struct LinearReconstruction {
  DensityMatrix rho;  // Hermitian, unit trace, possibly not PSD
  bool physical = false;
  double minEigenvalue = 0.0;
};

namespace detail {

// B_{u,j} = ⟨ψ_u|λ_j|ψ_u⟩ for one side.
inline Eigen::MatrixXd local_design(const MUBSet& mubs, const GeneratorBasis& gen,
                                    const std::vector<MubIndex>& local) {
  Eigen::MatrixXd B(static_cast<Eigen::Index>(local.size()), static_cast<Eigen::Index>(gen.size()));
  for (std::size_t u = 0; u < local.size(); ++u) {
    const Eigen::VectorXcd psi = mubs.state(local[u].group, local[u].member);
    for (std::size_t j = 0; j < gen.size(); ++j)
      B(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(j)) = (psi.adjoint() * gen[j] * psi)(0, 0).real();
  }
  return B;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Eigen::MatrixXcd assemble(const GeneratorBasis& gen, const Eigen::MatrixXd& R) {
  const int d = gen.dimension();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (std::size_t j = 0; j < gen.size(); ++j)
    for (std::size_t k = 0; k < gen.size(); ++k) {
      const double c = R(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      if (c != 0.0) rho += c * kron(gen[j], gen[k]);
    }
  return rho;
}

}  // namespace detail

/// Expands ρ = Σ r_jk λ_j ⊗ λ_k and solves the linear relation between the
/// coefficients and the measured frequencies n/N. When the settings are the
/// standard cross product the per-side d² × d² matrix is inverted; otherwise
/// the full system is solved in the least-squares sense.
inline LinearReconstruction linear_reconstruct(const CountsRecord& counts, const GeneratorBasis& gen) {
  validate_counts(counts);
  const int d = counts.d;
  if (gen.dimension() != d) throw DomainError("linear_reconstruct: generator dimension mismatch");
  const MUBSet mubs(d);
  const auto local = local_settings(d);
  const Eigen::Index L = static_cast<Eigen::Index>(local.size());
  Eigen::MatrixXd R;

  const Eigen::MatrixXd B = detail::local_design(mubs, gen, local);
  if (counts.settings == tomography_settings(d)) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (!lu.isInvertible()) throw ConditioningError("linear_reconstruct: local design matrix is singular");
    Eigen::MatrixXd P(L, L);
    for (Eigen::Index u = 0; u < L; ++u)
      for (Eigen::Index v = 0; v < L; ++v) P(u, v) = counts.counts[static_cast<std::size_t>(u * L + v)] / counts.N;
    // P = B R Bᵀ for ρ = Σ R_jk λ_j ⊗ λ_k.
    R = lu.solve(lu.solve(P).transpose()).transpose();
  } else {
    auto locate = [&](const MubIndex& m) -> Eigen::Index {
      for (std::size_t u = 0; u < local.size(); ++u)
        if (local[u] == m) return static_cast<Eigen::Index>(u);
      return -1;
    };
    const MUBSet& ms = mubs;
    const Eigen::Index G = static_cast<Eigen::Index>(gen.size());
    Eigen::MatrixXd M(static_cast<Eigen::Index>(counts.settings.size()), G * G);
    Eigen::VectorXd p(M.rows());
    for (Eigen::Index s = 0; s < M.rows(); ++s) {
      const Setting& st = counts.settings[static_cast<std::size_t>(s)];
      Eigen::RowVectorXd ba(G), bb(G);
      const Eigen::Index ua = locate(st.signal), ub = locate(st.idler);
      if (ua >= 0) {
        ba = B.row(ua);
      } else {
        ba = detail::local_design(ms, gen, {st.signal}).row(0);
      }
      if (ub >= 0) {
        bb = B.row(ub);
      } else {
        bb = detail::local_design(ms, gen, {st.idler}).row(0);
      }
      for (Eigen::Index j = 0; j < G; ++j)
        for (Eigen::Index k = 0; k < G; ++k) M(s, j * G + k) = ba[j] * bb[k];
      p[s] = counts.counts[static_cast<std::size_t>(s)] / counts.N;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    if (qr.rank() < G * G)
      throw ConditioningError("linear_reconstruct: settings are not informationally complete (rank " +
                              std::to_string(qr.rank()) + " < " + std::to_string(G * G) + ")");
    const Eigen::VectorXd r = qr.solve(p);
    R.resize(G, G);
    for (Eigen::Index j = 0; j < G; ++j)
      for (Eigen::Index k = 0; k < G; ++k) R(j, k) = r[j * G + k];
  }
  Eigen::MatrixXcd rho = detail::assemble(gen, R);
  rho = 0.5 * (rho + rho.adjoint());
  const double tr = rho.trace().real();
  if (!(std::abs(tr) > 0.0)) throw DegenerateInputError("linear_reconstruct: reconstructed trace is zero");
  LinearReconstruction out{DensityMatrix(d, rho / tr)};
  out.minEigenvalue = out.rho.min_eigenvalue();
  out.physical = out.minEigenvalue >= -1e-10;
  return out;
}

}  // namespace oamspec
