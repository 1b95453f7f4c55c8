#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oamspec/tomography.hpp"

namespace oamspec {

/// Optimizer gave up; carries the last state and objective value.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& m, DensityMatrix last, double objective)
      : Error("convergence", m), last_(std::move(last)), objective_(objective) {}
  const DensityMatrix& last_iterate() const noexcept { return last_; }
  double objective() const noexcept { return objective_; }

 private:
  DensityMatrix last_;
  double objective_;
};

/// ρ(t) = T†T / Tr(T†T) with T lower triangular. Parameters: the D real
/// diagonal entries, then (Re, Im) of the strictly lower entries row by row;
/// D² = d⁴ in total.
struct TriangularParametrization {
  int D = 0;

  explicit TriangularParametrization(int d) : D(d * d) {}
  int parameters() const { return D * D; }

  Eigen::MatrixXcd factor(const Eigen::VectorXd& t) const {
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(D, D);
    Eigen::Index p = 0;
    for (int i = 0; i < D; ++i) T(i, i) = t[p++];
    for (int i = 1; i < D; ++i)
      for (int j = 0; j < i; ++j, p += 2) T(i, j) = {t[p], t[p + 1]};
    return T;
  }
  /// Inverse of factor(); ignores the upper triangle.
  Eigen::VectorXd parameters_of(const Eigen::MatrixXcd& T) const {
    Eigen::VectorXd t(parameters());
    Eigen::Index p = 0;
    for (int i = 0; i < D; ++i) t[p++] = T(i, i).real();
    for (int i = 1; i < D; ++i)
      for (int j = 0; j < i; ++j, p += 2) {
        t[p] = T(i, j).real();
        t[p + 1] = T(i, j).imag();
      }
    return t;
  }
  /// Real gradient from G = ∂f/∂T̄ (f real): ∂f/∂Re = 2 Re G, ∂f/∂Im = 2 Im G.
  Eigen::VectorXd gradient_of(const Eigen::MatrixXcd& G) const {
    Eigen::VectorXd g(parameters());
    Eigen::Index p = 0;
    for (int i = 0; i < D; ++i) g[p++] = 2.0 * G(i, i).real();
    for (int i = 1; i < D; ++i)
      for (int j = 0; j < i; ++j, p += 2) {
        g[p] = 2.0 * G(i, j).real();
        g[p + 1] = 2.0 * G(i, j).imag();
      }
    return g;
  }
  DensityMatrix state(const Eigen::VectorXd& t) const {
    const Eigen::MatrixXcd T = factor(t);
    Eigen::MatrixXcd r = T.adjoint() * T;
    return DensityMatrix(static_cast<int>(std::lround(std::sqrt(D))), r / r.trace().real());
  }
  /// Parameters of a physical ρ: T = J L† J where J ρ J + εI = L L†.
  Eigen::VectorXd from_state(const DensityMatrix& rho, double epsilon = 1e-8) const {
    const Eigen::MatrixXcd J = Eigen::MatrixXcd::Identity(D, D).rowwise().reverse();
    Eigen::MatrixXcd m = J * (0.5 * (rho.rho + rho.rho.adjoint())) * J;
    m += epsilon * Eigen::MatrixXcd::Identity(D, D);
    Eigen::LLT<Eigen::MatrixXcd> llt(m);
    if (llt.info() != Eigen::Success) throw DomainError("TriangularParametrization: state is not positive");
    const Eigen::MatrixXcd L = llt.matrixL();
    return parameters_of(J * L.adjoint() * J);
  }
};

/// Likelihood objective Σ_s (N p_s − n_s)² / (2 N p_s), p_s = ⟨Ψ_s|ρ(t)|Ψ_s⟩,
/// with analytic gradient. Terms with n_s = 0 reduce to N p_s / 2.
class MleObjective {
 public:
  explicit MleObjective(const CountsRecord& counts) : param_(counts.d), N_(counts.N) {
    validate_counts(counts);
    const MUBSet mubs(counts.d);
    psi_.resize(param_.D, static_cast<Eigen::Index>(counts.settings.size()));
    for (std::size_t s = 0; s < counts.settings.size(); ++s)
      psi_.col(static_cast<Eigen::Index>(s)) = setting_vector(mubs, counts.settings[s]);
    n_ = Eigen::Map<const Eigen::VectorXd>(counts.counts.data(), static_cast<Eigen::Index>(counts.counts.size()));
  }

  const TriangularParametrization& parametrization() const { return param_; }
  double N() const { return N_; }

  double value(const Eigen::VectorXd& t) const { return evaluate(t, nullptr); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& t) const {
    Eigen::VectorXd g;
    evaluate(t, &g);
    return g;
  }
  double evaluate(const Eigen::VectorXd& t, Eigen::VectorXd* grad) const {
    const Eigen::MatrixXcd T = param_.factor(t);
    const double tr = T.squaredNorm();
    if (!(tr > 0.0)) throw DomainError("MleObjective: zero factor");
    const Eigen::MatrixXcd V = T * psi_;
    const Eigen::VectorXd vv = V.colwise().squaredNorm().transpose();
    double f = 0.0;
    Eigen::VectorXd c(vv.size());
    for (Eigen::Index s = 0; s < vv.size(); ++s) {
      const double p = vv[s] / tr;
      const double n = n_[s];
      if (n == 0.0) {
        f += 0.5 * N_ * p;
        c[s] = 0.5 * N_;
      } else {
        const double np = N_ * p;
        f += (np - n) * (np - n) / (2.0 * np);
        c[s] = 0.5 * N_ - n * n / (2.0 * N_ * p * p);
      }
    }
    if (grad) {
      // ∂p_s/∂T̄ = (v_s ψ_s† tr − ‖v_s‖² T) / tr².
      const Eigen::MatrixXcd G = (V * c.asDiagonal() * psi_.adjoint() * tr - c.dot(vv) * T) / (tr * tr);
      *grad = param_.gradient_of(G);
    }
    return f;
  }

 private:
  TriangularParametrization param_;
  double N_;
  Eigen::MatrixXcd psi_;
  Eigen::VectorXd n_;
};

struct LbfgsOptions {
  int maxIterations = 20000;
  int memory = 10;
  double relativeDecrease = 1e-10;
  double gradientNorm = 1e-8;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double gradientNorm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Limited-memory BFGS with backtracking (Armijo) line search. Stops when
/// the decrease of f over an iteration, relative to max(|f|, 1), or ‖∇f‖
/// drops below the thresholds. The floor of 1 keeps the first test usable
/// for objectives whose minimum is 0 (noiseless data).
inline LbfgsResult lbfgs_minimize(const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>& fg,
                                  Eigen::VectorXd x, const LbfgsOptions& opt = {}) {
  LbfgsResult r;
  Eigen::VectorXd g;
  double f = fg(x, &g);
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> hist;
  for (int it = 0; it < opt.maxIterations; ++it) {
    r.iterations = it;
    if (g.norm() < opt.gradientNorm) {
      r.converged = true;
      break;
    }
    // Two-loop recursion.
    Eigen::VectorXd q = g;
    std::vector<double> alpha(hist.size());
    for (std::size_t i = hist.size(); i-- > 0;) {
      const auto& [s, y] = hist[i];
      alpha[i] = s.dot(q) / y.dot(s);
      q -= alpha[i] * y;
    }
    if (!hist.empty()) {
      const auto& [s, y] = hist.back();
      q *= s.dot(y) / y.dot(y);
    } else {
      q /= std::max(1.0, g.norm());
    }
    for (std::size_t i = 0; i < hist.size(); ++i) {
      const auto& [s, y] = hist[i];
      const double beta = y.dot(q) / y.dot(s);
      q += (alpha[i] - beta) * s;
    }
    Eigen::VectorXd dir = -q;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      hist.clear();
      dir = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0, fNew = 0.0;
    Eigen::VectorXd xNew, gNew;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xNew = x + step * dir;
      fNew = fg(xNew, &gNew);
      if (std::isfinite(fNew) && fNew <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const Eigen::VectorXd s = xNew - x, y = gNew - g;
    if (s.dot(y) > 1e-16 * s.norm() * y.norm()) {
      hist.emplace_back(s, y);
      if (static_cast<int>(hist.size()) > opt.memory) hist.pop_front();
    }
    const double decrease = (f - fNew) / std::max(std::abs(f), 1.0);
    x = std::move(xNew);
    g = std::move(gNew);
    f = fNew;
    if (decrease < opt.relativeDecrease) {
      r.converged = true;
      r.iterations = it + 1;
      break;
    }
  }
  r.x = std::move(x);
  r.value = f;
  r.gradientNorm = g.norm();
  return r;
}

inline constexpr double kInitMixing = 1e-2;

struct MleResult {
  DensityMatrix rho;
  double objective = 0.0;
  int iterations = 0;
};

/// Maximum-likelihood state. Without `init` the start is the linear
/// reconstruction projected to the physical states.
inline MleResult mle_reconstruct(const CountsRecord& counts, const std::optional<DensityMatrix>& init = std::nullopt,
                                 const LbfgsOptions& opt = {}) {
  const MleObjective obj(counts);
  const auto& param = obj.parametrization();
  DensityMatrix start;
  if (init) {
    if (init->d != counts.d) throw DomainError("mle_reconstruct: init dimension mismatch");
    if (!init->is_physical(1e-8)) throw DomainError("mle_reconstruct: init is not a physical state");
    start = *init;
  } else {
    start = project_to_physical(linear_reconstruct(counts, su_generators(counts.d)).rho);
  }
  // A rank-deficient factor sits on a stationary set of the parametrization
  // (zero rows of T get zero gradient), so start from a full-rank mixture.
  start.rho = (1.0 - kInitMixing) * start.rho + kInitMixing * maximally_mixed(counts.d).rho;
  auto fg = [&obj](const Eigen::VectorXd& t, Eigen::VectorXd* g) { return obj.evaluate(t, g); };
  const LbfgsResult r = lbfgs_minimize(fg, param.from_state(start), opt);
  DensityMatrix rho = param.state(r.x);
  rho.rho = 0.5 * (rho.rho + rho.rho.adjoint());
  if (!r.converged)
    throw ConvergenceError("mle_reconstruct: no convergence after " + std::to_string(r.iterations) +
                               " iterations (objective " + std::to_string(r.value) + ")",
                           rho, r.value);
  return {rho, r.value, r.iterations};
}

}  // namespace oamspec
