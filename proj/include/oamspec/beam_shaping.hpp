#pragma once

#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "oamspec/errors.hpp"
#include "oamspec/hankel.hpp"
#include "oamspec/quadrature.hpp"

namespace oamspec {

/// How energy is counted along the radial coordinate: `Line` is the 1D
/// measure ds of the half-line (even extension), `Radial` the 2D measure s ds.
enum class Measure { Line, Radial };

/// Tabulated intensity, piecewise linear between samples and zero past the
/// last radius. Cumulative energies are integrated exactly on that model.
class RadialIntensity {
 public:
  RadialIntensity(std::vector<double> grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() < 2 || grid_.size() != values_.size())
      throw DomainError("RadialIntensity: need >= 2 samples and matching sizes");
    if (grid_.front() != 0.0) throw DomainError("RadialIntensity: grid must start at 0");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (!(values_[i] >= 0.0) || !std::isfinite(values_[i]))
        throw DomainError("RadialIntensity: intensities must be finite and non-negative");
      if (i > 0 && !(grid_[i] > grid_[i - 1]))
        throw DomainError("RadialIntensity: grid must be strictly increasing");
    }
    cumLine_ = cumulate(Measure::Line);
    cumRadial_ = cumulate(Measure::Radial);
  }

  /// Samples f(s) on `grid`.
  template <class F>
  static RadialIntensity sample(const std::vector<double>& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
    return RadialIntensity(grid, std::move(v));
  }

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

  double operator()(double s) const {
    if (s < 0.0 || s > grid_.back()) return 0.0;
    const std::size_t i = segment(s);
    const double t = (s - grid_[i]) / (grid_[i + 1] - grid_[i]);
    return values_[i] + t * (values_[i + 1] - values_[i]);
  }

  double total(Measure m) const { return cum(m).back(); }

  /// ∫_0^s I(t) dt (Line) or ∫_0^s I(t) t dt (Radial).
  double cumulative(double s, Measure m) const {
    if (s <= 0.0) return 0.0;
    if (s >= grid_.back()) return total(m);
    const std::size_t i = segment(s);
    return cum(m)[i] + partial(i, s - grid_[i], m);
  }

  /// Smallest s with cumulative(s) = e, for 0 ≤ e ≤ total.
  double inverse_cumulative(double e, Measure m) const {
    const auto& c = cum(m);
    if (e <= 0.0) return 0.0;
    if (e >= c.back()) return support_end();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), e) - c.begin()) - 1;
    const double h = grid_[i + 1] - grid_[i];
    const double target = e - c[i];
    // Safeguarded Newton on the segment's polynomial; the cumulative is
    // monotone so the bracket [lo, hi] always holds the root.
    double lo = 0.0, hi = h, u = 0.5 * h;
    for (int it = 0; it < 200; ++it) {
      const double f = partial(i, u, m) - target;
      if (f > 0.0) hi = u; else lo = u;
      const double s = grid_[i] + u;
      const double slope = (*this)(s) * (m == Measure::Radial ? s : 1.0);
      double next = slope > 0.0 ? u - f / slope : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - u) <= 1e-16 * (grid_[i] + h) || hi - lo <= 1e-16 * (grid_[i] + h)) {
        u = next;
        break;
      }
      u = next;
    }
    return grid_[i] + u;
  }

  /// Last radius at which the intensity is positive.
  double support_end() const {
    for (std::size_t i = values_.size(); i-- > 0;)
      if (values_[i] > 0.0) return i + 1 < grid_.size() ? grid_[i + 1] : grid_[i];
    return 0.0;
  }

 private:
  std::size_t segment(double s) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), s);
    std::size_t i = static_cast<std::size_t>(it - grid_.begin());
    return std::min(i == 0 ? 0 : i - 1, grid_.size() - 2);
  }

  // ∫ over [grid_[i], grid_[i] + u] of the linear segment i.
  double partial(std::size_t i, double u, Measure m) const {
    const double h = grid_[i + 1] - grid_[i];
    const double c0 = values_[i];
    const double c1 = (values_[i + 1] - values_[i]) / h;
    if (m == Measure::Line) return c0 * u + 0.5 * c1 * u * u;
    const double s0 = grid_[i];
    return c0 * s0 * u + 0.5 * (c0 + c1 * s0) * u * u + c1 * u * u * u / 3.0;
  }

  std::vector<double> cumulate(Measure m) const {
    std::vector<double> c(grid_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
      c[i + 1] = c[i] + partial(i, grid_[i + 1] - grid_[i], m);
    return c;
  }

  const std::vector<double>& cum(Measure m) const { return m == Measure::Line ? cumLine_ : cumRadial_; }

  std::vector<double> grid_, values_;
  std::vector<double> cumLine_, cumRadial_;
};

/// A = ∫I / ∫Q.
inline double energy_constant(const RadialIntensity& input, const RadialIntensity& target,
                              Measure m = Measure::Line) {
  const double ei = input.total(m), eq = target.total(m);
  if (!(eq > 0.0)) throw DivisionError("energy_constant: target carries no energy");
  if (!(ei > 0.0)) throw DomainError("energy_constant: input carries no energy");
  return ei / eq;
}

/// Ray mapping α(ξ) and phase φ(ξ) = ∫_0^ξ α on a grid (both in units of the
/// respective waists). The SLM phase is beta · φ.
struct PhaseProfile {
  std::vector<double> grid;
  std::vector<double> mapping;  // α(ξ)
  std::vector<double> phase;    // φ(ξ), φ(0) = 0, not wrapped
  double beta = 1.0;
  Measure measure = Measure::Line;

  /// φ at arbitrary ξ by cubic Hermite interpolation (φ' = α is known at the
  /// nodes); linear continuation with slope α past the grid.
  double phase_at(double xi) const {
    if (xi <= grid.front()) return phase.front();
    if (xi >= grid.back()) return phase.back() + mapping.back() * (xi - grid.back());
    auto it = std::upper_bound(grid.begin(), grid.end(), xi);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    const double h = grid[i + 1] - grid[i];
    const double t = (xi - grid[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * phase[i] + (t3 - 2 * t2 + t) * h * mapping[i] +
           (-2 * t3 + 3 * t2) * phase[i + 1] + (t3 - t2) * h * mapping[i + 1];
  }
};

namespace detail {

inline void check_mapping_regular(const RadialIntensity& target) {
  const auto& g = target.grid();
  const auto& v = target.values();
  const double end = target.support_end();
  for (std::size_t i = 0; i + 1 < g.size() && g[i + 1] <= end; ++i) {
    const bool zeroSegment = v[i] == 0.0 && v[i + 1] == 0.0;
    const bool interiorZero = i > 0 && v[i] == 0.0;
    if (zeroSegment || interiorZero)
      throw MappingSingularityError("target intensity vanishes at s = " + std::to_string(g[i]) +
                                    " inside its support; the ray mapping is unbounded there");
  }
}

}  // namespace detail

/// Solves A Q(α) dα/dξ = I(ξ), dφ/dξ = α by inverting the cumulative energy
/// tables: A·CumQ(α(ξ)) = CumI(ξ). α is monotone by construction.
inline PhaseProfile solve_phase_ode(const RadialIntensity& input, const RadialIntensity& target,
                                    const std::vector<double>& grid, Measure m = Measure::Line) {
  if (grid.size() < 2 || grid.front() != 0.0)
    throw DomainError("solve_phase_ode: grid must start at 0 and hold >= 2 points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("solve_phase_ode: grid must be increasing");
  if (grid.back() < input.support_end())
    throw DomainError("solve_phase_ode: grid does not span the input support");
  const double A = energy_constant(input, target, m);
  detail::check_mapping_regular(target);

  PhaseProfile out;
  out.grid = grid;
  out.measure = m;
  out.mapping.resize(grid.size());
  out.phase.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.mapping[i] = target.inverse_cumulative(input.cumulative(grid[i], m) / A, m);
  out.phase[0] = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    out.phase[i] =
        out.phase[i - 1] + 0.5 * (out.mapping[i] + out.mapping[i - 1]) * (grid[i] - grid[i - 1]);
  return out;
}

struct PhaseResiduals {
  double mapping = 0.0;  // max |A CumQ(α) - CumI(ξ)| / ∫I
  double phase = 0.0;    // max |Δφ/Δξ - mean α| on each grid step
  bool monotone = true;
};

inline PhaseResiduals phase_residuals(const RadialIntensity& input, const RadialIntensity& target,
                                      const PhaseProfile& p) {
  PhaseResiduals r;
  const double A = energy_constant(input, target, p.measure);
  const double scale = input.total(p.measure);
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    const double lhs = A * target.cumulative(p.mapping[i], p.measure);
    r.mapping = std::max(r.mapping, std::abs(lhs - input.cumulative(p.grid[i], p.measure)) / scale);
    if (i > 0) {
      const double h = p.grid[i] - p.grid[i - 1];
      const double slope = (p.phase[i] - p.phase[i - 1]) / h;
      r.phase = std::max(r.phase, std::abs(slope - 0.5 * (p.mapping[i] + p.mapping[i - 1])));
      if (p.mapping[i] < p.mapping[i - 1]) r.monotone = false;
    }
  }
  return r;
}

/// The printed closed form for a Gaussian → flat-top phase,
/// -(2/π)(ξ (√π/2) e^ξ + e^{-ξ²}/2 - 1/2), evaluated exactly as written.
/// It does not solve the mapping equations (it grows like ξ e^ξ); kept as a
/// reference for comparison against solve_phase_ode.
inline double flattop_phase_reference(double xi) {
  return -(2.0 / std::numbers::pi) *
         (xi * std::sqrt(std::numbers::pi) / 2.0 * std::exp(xi) + 0.5 * std::exp(-xi * xi) - 0.5);
}

struct FlattopComparison {
  std::vector<double> xi, printed, solved;
  double maxAbsDifference = 0.0;
  /// First ξ where |printed| exceeds ten times max |solved|, or NaN.
  double divergesAt = std::numeric_limits<double>::quiet_NaN();
};

inline FlattopComparison compare_flattop_reference(const PhaseProfile& solved) {
  FlattopComparison c;
  double bound = 0.0;
  for (double v : solved.phase) bound = std::max(bound, std::abs(v));
  for (std::size_t i = 0; i < solved.grid.size(); ++i) {
    const double p = flattop_phase_reference(solved.grid[i]);
    c.xi.push_back(solved.grid[i]);
    c.printed.push_back(p);
    c.solved.push_back(solved.phase[i]);
    c.maxAbsDifference = std::max(c.maxAbsDifference, std::abs(p - solved.phase[i]));
    if (std::isnan(c.divergesAt) && std::abs(p) > 10.0 * bound) c.divergesAt = solved.grid[i];
  }
  return c;
}

/// [J_n(2πρ) / (2πρ)]², un-normalized. At ρ = 0 the limit is 1/4 for n = 1
/// and +inf for n = 0.
inline double airy_profile(double rho, int besselOrder = 1) {
  if (!(rho >= 0.0)) throw DomainError("airy_profile: rho must be >= 0");
  if (besselOrder != 0 && besselOrder != 1) throw DomainError("airy_profile: order must be 0 or 1");
  const double x = 2.0 * std::numbers::pi * rho;
  if (x == 0.0) return besselOrder == 1 ? 0.25 : std::numeric_limits<double>::infinity();
  const double j = boost::math::cyl_bessel_j(besselOrder, x) / x;
  return j * j;
}

/// Fourier-lens shaping system. beta = 2π w0 w1 / (λ f).
class ShaperSystem {
 public:
  ShaperSystem(double focalLength, double wavelength, double inputWaist, double outputWaist)
      : f_(focalLength), lambda_(wavelength), w0_(inputWaist), w1_(outputWaist) {
    if (!(f_ > 0) || !(lambda_ > 0) || !(w0_ > 0) || !(w1_ > 0))
      throw DomainError("ShaperSystem: all lengths must be positive");
    beta_ = 2.0 * std::numbers::pi * w0_ * w1_ / (lambda_ * f_);
  }

  /// System with the requested beta; the wavelength is solved for.
  static ShaperSystem with_beta(double beta, double focalLength, double inputWaist, double outputWaist) {
    if (!(beta > 0)) throw DomainError("ShaperSystem: beta must be positive");
    return ShaperSystem(focalLength, 2.0 * std::numbers::pi * inputWaist * outputWaist / (beta * focalLength),
                        inputWaist, outputWaist);
  }

  double focal_length() const { return f_; }
  double wavelength() const { return lambda_; }
  double input_waist() const { return w0_; }
  double output_waist() const { return w1_; }
  double beta() const { return beta_; }

 private:
  double f_, lambda_, w0_, w1_;
  double beta_ = 0.0;
};

struct PropagationOptions {
  double apertureRadius = 0.0;  // physical; 0 → 4 input waists
  int points = 1024;
  double maxLeakage = 1e-4;
};

/// Field at the back focal plane of the lens for an azimuthally symmetric
/// input U(r) placed at the lens:
/// U(ρ) = e^{ikf} e^{iπρ²/(λf)} / (iλf) · 2π ∫ U(r) J0(2π r ρ/(λf)) r dr.
/// Throws SamplingError when the input is under-resolved or the spectrum
/// reaches the edge of the representable band.
inline RadialField propagate_fourier(const std::function<Complex(double)>& input,
                                     const ShaperSystem& sys, const PropagationOptions& opt = {}) {
  const double R = opt.apertureRadius > 0.0 ? opt.apertureRadius : 4.0 * sys.input_waist();
  const HankelTransform ht(R, opt.points);
  Eigen::VectorXcd f(ht.size());
  for (int n = 0; n < ht.size(); ++n) f[n] = input(ht.radii()[n]);

  const auto wIn = ht.radial_weights();
  double eNodes = 0.0;
  for (int n = 0; n < ht.size(); ++n) eNodes += wIn[n] * std::norm(f[n]);
  QuadratureOptions qo;
  qo.relTol = 1e-10;
  qo.maxSubdivisions = 20000;
  const double eQuad = integrate([&](double r) { return std::norm(input(r)) * r; }, 0.0, R, qo).value;
  if (!(eQuad > 0.0)) throw DegenerateInputError("propagate_fourier: input field carries no energy");
  const double inputMismatch = std::abs(eNodes - eQuad) / eQuad;
  if (inputMismatch > opt.maxLeakage)
    throw SamplingError("propagate_fourier: input under-sampled by the Hankel grid", inputMismatch);

  const Eigen::VectorXcd F = ht.forward(f);
  const double lf = sys.wavelength() * sys.focal_length();
  const double k = 2.0 * std::numbers::pi / sys.wavelength();
  const auto wQ = ht.frequency_weights();

  RadialField out;
  out.radii.resize(ht.size());
  out.values.resize(ht.size());
  out.weights.resize(ht.size());
  double eOut = 0.0, eTail = 0.0;
  const int tailStart = static_cast<int>(0.9 * ht.size());
  for (int m = 0; m < ht.size(); ++m) {
    const double rho = ht.frequencies()[m] * lf;
    const Complex prefactor = std::exp(Complex(0.0, k * sys.focal_length() + std::numbers::pi * rho * rho / lf)) /
                              Complex(0.0, lf);
    out.radii[m] = rho;
    out.values[m] = prefactor * F[m];
    out.weights[m] = wQ[m] * lf * lf;
    const double e = out.weights[m] * std::norm(out.values[m]);
    eOut += e;
    if (m >= tailStart) eTail += e;
  }
  if (eTail / eOut > opt.maxLeakage)
    throw SamplingError("propagate_fourier: output spectrum reaches the band edge", eTail / eOut);
  return out;
}

/// Same, for a field tabulated on an increasing radial grid (linear complex
/// interpolation, zero past the last radius).
inline RadialField propagate_fourier(const RadialField& input, const ShaperSystem& sys,
                                     const PropagationOptions& opt = {}) {
  auto lookup = [&input](double r) -> Complex {
    const auto& g = input.radii;
    if (r < g.front() || r > g.back()) return 0.0;
    auto it = std::upper_bound(g.begin(), g.end(), r);
    if (it == g.end()) return input.values.back();
    const std::size_t i = static_cast<std::size_t>(it - g.begin()) - 1;
    const double t = (r - g[i]) / (g[i + 1] - g[i]);
    return input.values[i] + t * (input.values[i + 1] - input.values[i]);
  };
  PropagationOptions o = opt;
  if (o.apertureRadius <= 0.0) o.apertureRadius = input.radii.back();
  return propagate_fourier(std::function<Complex(double)>(lookup), sys, o);
}

/// Input field amplitude sqrt(I(r/w0)) carrying the designed phase beta φ(r/w0).
inline std::function<Complex(double)> shaped_input_field(const RadialIntensity& inputIntensity,
                                                         const PhaseProfile& phase, const ShaperSystem& sys) {
  return [&inputIntensity, &phase, w0 = sys.input_waist(), beta = sys.beta()](double r) {
    const double xi = r / w0;
    return std::polar(std::sqrt(inputIntensity(xi)), beta * phase.phase_at(xi));
  };
}

struct ShapingQuality {
  double l2Error = 0.0;       // whole output plane
  double plateauError = 0.0;  // ρ ≤ 0.9 · radius
};

/// Relative L2 distance between |U|² and the target c·Q(ρ/w1), with c
/// chosen so both carry the same energy.
inline ShapingQuality shaping_error(const RadialField& out, const RadialIntensity& target, double w1) {
  const auto I = out.intensity();
  double energy = 0.0;
  for (std::size_t m = 0; m < I.size(); ++m) energy += out.weights[m] * I[m];
  const double level = energy / (w1 * w1 * target.total(Measure::Radial));
  double num = 0, den = 0, pNum = 0, pDen = 0;
  for (std::size_t m = 0; m < I.size(); ++m) {
    const double t = level * target(out.radii[m] / w1);
    const double e = out.weights[m] * (I[m] - t) * (I[m] - t);
    num += e;
    den += out.weights[m] * t * t;
    if (out.radii[m] <= 0.9 * w1) {
      pNum += e;
      pDen += out.weights[m] * t * t;
    }
  }
  return {std::sqrt(num / den), std::sqrt(pNum / pDen)};
}

/// shaping_error against the flat-top disk of `radius`.
inline ShapingQuality flattop_error(const RadialField& out, double radius) {
  return shaping_error(out, RadialIntensity({0.0, 1.0}, {1.0, 1.0}), radius);
}

/// Least-squares fit of log I(r) = c + 2a r²/w_p² over samples with
/// r ≤ fitRadius (default w_p).
inline double fit_exponential_a(const RadialIntensity& profile, double w_p, double fitRadius = 0.0) {
  if (!(w_p > 0.0)) throw DomainError("fit_exponential_a: w_p must be positive");
  if (fitRadius <= 0.0) fitRadius = w_p;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < profile.grid().size(); ++i) {
    const double r = profile.grid()[i];
    if (r > fitRadius) break;
    const double v = profile.values()[i];
    if (!(v > 0.0))
      throw DomainError("fit_exponential_a: non-positive intensity at r = " + std::to_string(r));
    const double x = r * r / (w_p * w_p);
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double det = n * sxx - sx * sx;
  if (n < 2 || !(det > 0.0)) throw DomainError("fit_exponential_a: fewer than two samples in the fit window");
  const double slope = (n * sxy - sx * sy) / det;
  return 0.5 * slope;
}

}  // namespace oamspec
