#pragma once

#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "oamspec/errors.hpp"

namespace oamspec {

/// Waists of the pump, of the p = 0 LG detection modes (w_s = w_i) and of the
/// single-mode fiber mode, all back-projected to the crystal plane. γ and η
/// are derived on construction and cannot be set on their own.
class SetupParams {
 public:
  SetupParams(double pumpWaist, double lgWaist, double fiberWaist)
      : w_p_(pumpWaist), w_si_(lgWaist), w_f_(fiberWaist) {
    if (!(w_p_ > 0.0) || !(w_si_ > 0.0) || !(w_f_ > 0.0) || !std::isfinite(w_p_) ||
        !std::isfinite(w_si_) || !std::isfinite(w_f_))
      throw DomainError("SetupParams: waists must be finite and strictly positive");
    gamma_ = w_p_ / w_si_;
    eta_ = w_p_ / w_f_;
  }

  /// Setup with the given ratios γ = w_p/w_si and η = w_p/w_f.
  static SetupParams from_ratios(double gamma, double eta, double pumpWaist = 1.0) {
    if (!(gamma > 0.0) || !(eta > 0.0))
      throw DomainError("SetupParams: gamma and eta must be strictly positive");
    return SetupParams(pumpWaist, pumpWaist / gamma, pumpWaist / eta);
  }

  double w_p() const { return w_p_; }
  double w_si() const { return w_si_; }
  double w_f() const { return w_f_; }
  double gamma() const { return gamma_; }
  double eta() const { return eta_; }

 private:
  double w_p_, w_si_, w_f_;
  double gamma_ = 0.0, eta_ = 0.0;
};

enum class PumpKind { Gaussian, TruncatedExponential, Airy, Tabulated };

inline std::string to_string(PumpKind k) {
  switch (k) {
    case PumpKind::Gaussian: return "gaussian";
    case PumpKind::TruncatedExponential: return "exponential";
    case PumpKind::Airy: return "airy";
    case PumpKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

struct RadialSample {
  double radius;
  double amplitude;
};

/// Radially symmetric pump amplitude Φ(r). Radii in the same unit as the
/// SetupParams waists; the analytic kinds scale with w_p.
class PumpProfile {
 public:
  static PumpProfile gaussian() { return PumpProfile(PumpKind::Gaussian); }

  /// exp(a r²/w_p²) for r ≤ w_p, zero outside.
  static PumpProfile truncated_exponential(double a) {
    if (!std::isfinite(a)) throw DomainError("PumpProfile: exponent parameter a must be finite");
    PumpProfile p(PumpKind::TruncatedExponential);
    p.a_ = a;
    return p;
  }

  /// |J_n(2πr/w_p) / (2πr/w_p)|, the non-negative amplitude of the Airy-disk
  /// intensity produced by a refractive Gaussian-to-flat-top shaper.
  static PumpProfile airy(int besselOrder = 1) {
    if (besselOrder != 0 && besselOrder != 1)
      throw DomainError("PumpProfile: Airy Bessel order must be 0 or 1");
    PumpProfile p(PumpKind::Airy);
    p.besselOrder_ = besselOrder;
    return p;
  }

  /// Linearly interpolated samples; zero past the last radius.
  static PumpProfile tabulated(std::vector<RadialSample> samples) {
    if (samples.size() < 2) throw DomainError("PumpProfile: tabulated pump needs >= 2 samples");
    if (samples.front().radius != 0.0)
      throw DomainError("PumpProfile: tabulated radii must start at 0");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (!(samples[i].amplitude >= 0.0) || !std::isfinite(samples[i].amplitude))
        throw DomainError("PumpProfile: tabulated amplitudes must be finite and non-negative");
      if (i > 0 && !(samples[i].radius > samples[i - 1].radius))
        throw DomainError("PumpProfile: tabulated radii must be strictly increasing");
    }
    PumpProfile p(PumpKind::Tabulated);
    p.samples_ = std::move(samples);
    return p;
  }

  PumpKind kind() const { return kind_; }
  double a() const { return a_; }
  int bessel_order() const { return besselOrder_; }
  const std::vector<RadialSample>& samples() const { return samples_; }

  double operator()(double r, double w_p) const {
    switch (kind_) {
      case PumpKind::Gaussian: return std::exp(-r * r / (w_p * w_p));
      case PumpKind::TruncatedExponential:
        return r <= w_p ? std::exp(a_ * r * r / (w_p * w_p)) : 0.0;
      case PumpKind::Airy: {
        const double x = 2.0 * std::numbers::pi * r / w_p;
        if (x == 0.0) return besselOrder_ == 1 ? 0.5 : std::numeric_limits<double>::infinity();
        return std::abs(boost::math::cyl_bessel_j(besselOrder_, x) / x);
      }
      case PumpKind::Tabulated: return interpolate(r);
    }
    return 0.0;
  }

  /// Radius past which the pump vanishes identically, or +inf.
  double support_end(double w_p) const {
    switch (kind_) {
      case PumpKind::TruncatedExponential: return w_p;
      case PumpKind::Tabulated: return samples_.back().radius;
      default: return std::numeric_limits<double>::infinity();
    }
  }

 private:
  explicit PumpProfile(PumpKind k) : kind_(k) {}

  double interpolate(double r) const {
    if (r < 0.0 || r > samples_.back().radius) return 0.0;
    auto hi = std::upper_bound(samples_.begin(), samples_.end(), r,
                               [](double x, const RadialSample& s) { return x < s.radius; });
    if (hi == samples_.end()) return samples_.back().amplitude;
    auto lo = hi - 1;
    const double t = (r - lo->radius) / (hi->radius - lo->radius);
    return lo->amplitude + t * (hi->amplitude - lo->amplitude);
  }

  PumpKind kind_;
  double a_ = -1.0;
  int besselOrder_ = 1;
  std::vector<RadialSample> samples_;
};

}  // namespace oamspec
