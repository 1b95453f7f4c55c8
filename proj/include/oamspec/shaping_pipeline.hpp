#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <vector>

#include "oamspec/beam_shaping.hpp"
#include "oamspec/format.hpp"

namespace oamspec {

struct ShapingDesign {
  PhaseProfile phase;
  PhaseResiduals residuals;
  RadialField output;       // Fourier-plane field
  double inputEnergy = 0;   // ∫|U|² r dr of the input, exact on the tabulated model
  double outputEnergy = 0;  // node quadrature of the output
  double energyError() const { return std::abs(outputEnergy - inputEnergy) / inputEnergy; }
};

/// Designs the phase mapping `input` (in units of w0) onto `target` (in
/// units of w1) and propagates the phased input to the Fourier plane.
inline ShapingDesign design_and_propagate(const RadialIntensity& input, const RadialIntensity& target,
                                          const ShaperSystem& sys, const std::vector<double>& designGrid,
                                          Measure measure = Measure::Radial,
                                          const PropagationOptions& opt = {}) {
  ShapingDesign d;
  d.phase = solve_phase_ode(input, target, designGrid, measure);
  d.phase.beta = sys.beta();
  d.residuals = phase_residuals(input, target, d.phase);
  PropagationOptions o = opt;
  if (o.apertureRadius <= 0.0)
    o.apertureRadius = std::min(4.0, input.grid().back()) * sys.input_waist();
  d.output = propagate_fourier(shaped_input_field(input, d.phase, sys), sys, o);
  const double w0 = sys.input_waist();
  d.inputEnergy = w0 * w0 * input.cumulative(o.apertureRadius / w0, Measure::Radial);
  d.outputEnergy = d.output.energy();
  return d;
}

/// Intensity of a field on Hankel nodes as a RadialIntensity starting at
/// r = 0; `axis` is the on-axis intensity.
inline RadialIntensity intensity_profile(const RadialField& f, double axis) {
  std::vector<double> grid{0.0}, values{axis};
  for (std::size_t i = 0; i < f.radii.size(); ++i) {
    grid.push_back(f.radii[i]);
    values.push_back(std::norm(f.values[i]));
  }
  return RadialIntensity(std::move(grid), std::move(values));
}

struct DefocusSample {
  double distance = 0;
  double fittedA = 0;
  RadialIntensity profile{{0.0, 1.0}, {0.0, 0.0}};
};

/// Refractive-shaper path: the shaper emits the Airy field
/// J1(2πr/w_a)/(2πr/w_a) (aperture `apertureAiryUnits` · w_a, w_a = λf/w1 so
/// the Fourier-plane flat-top has radius w1). The Fourier-plane field is then
/// propagated a further `distances` and each profile is fitted with
/// fit_exponential_a(w_p = w1) over [0, fitFraction · w1].
inline std::vector<DefocusSample> airy_defocus_scan(const ShaperSystem& sys,
                                                    const std::vector<double>& distances,
                                                    int besselOrder = 1, double apertureAiryUnits = 40.0,
                                                    int points = 1500, double fitFraction = 1.0) {
  if (besselOrder != 1)
    throw DomainError("airy_defocus_scan: the J0 form has infinite energy at the axis; use order 1");
  const double lf = sys.wavelength() * sys.focal_length();
  const double w1 = sys.output_waist();
  const double wa = lf / w1;
  auto airy = [wa](double r) -> Complex {
    const double x = 2.0 * std::numbers::pi * r / wa;
    return x == 0.0 ? 0.5 : boost::math::cyl_bessel_j(1, x) / x;
  };
  PropagationOptions opt;
  opt.apertureRadius = apertureAiryUnits * wa;
  opt.points = points;
  const RadialField focal = propagate_fourier(std::function<Complex(double)>(airy), sys, opt);

  // The focal-plane nodes are the radial nodes of a transform of radius λf·V.
  const HankelTransform first(opt.apertureRadius, points);
  const HankelTransform ht(lf * first.bandwidth(), points);
  Eigen::VectorXcd u(points);
  for (int i = 0; i < points; ++i) u[i] = focal.values[i];
  const Eigen::VectorXcd spectrum = ht.forward(u);

  std::vector<DefocusSample> out;
  for (double dz : distances) {
    Eigen::VectorXcd G = spectrum;
    for (int m = 0; m < points; ++m)
      G[m] *= std::exp(Complex(0.0, -std::numbers::pi * sys.wavelength() * dz * ht.frequencies()[m] *
                                        ht.frequencies()[m]));
    const Eigen::VectorXcd uz = ht.inverse(G);
    RadialField plane;
    plane.radii = ht.radii();
    plane.values.assign(uz.data(), uz.data() + uz.size());
    plane.weights = ht.radial_weights();
    DefocusSample s;
    s.distance = dz;
    s.profile = intensity_profile(plane, std::norm(ht.inverse_at(G, 0.0)));
    s.fittedA = fit_exponential_a(s.profile, w1, fitFraction * w1);
    out.push_back(std::move(s));
  }
  return out;
}

inline double wrap_phase(double phi) {
  const double twoPi = 2.0 * std::numbers::pi;
  double w = std::fmod(phi, twoPi);
  if (w < 0.0) w += twoPi;
  if (w >= twoPi) w = 0.0;
  return w;
}

/// CSV rows "radius,phase" with radius in physical units (ξ · w0) and the
/// SLM phase beta·φ wrapped to [0, 2π).
inline void write_phase_csv(std::ostream& os, const PhaseProfile& p, double inputWaist) {
  os << "radius,phase\n";
  for (std::size_t i = 0; i < p.grid.size(); ++i)
    os << format_double(p.grid[i] * inputWaist) << ',' << format_double(wrap_phase(p.beta * p.phase[i]))
       << '\n';
}

/// Square 8-bit binary PGM (P5) of the wrapped SLM phase, `size` pixels per
/// side at `pixelPitch` (same unit as inputWaist). Radial lookup is linear
/// between grid samples; 0..2π maps to 0..255.
inline void write_phase_pgm(std::ostream& os, const PhaseProfile& p, double inputWaist, int size,
                            double pixelPitch) {
  if (size < 1 || !(pixelPitch > 0.0)) throw DomainError("write_phase_pgm: bad size or pixel pitch");
  os << "P5\n" << size << ' ' << size << "\n255\n";
  const double c = 0.5 * (size - 1);
  std::vector<unsigned char> row(static_cast<std::size_t>(size));
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double r = std::hypot(x - c, y - c) * pixelPitch / inputWaist;
      double phi;
      if (r >= p.grid.back()) {
        phi = p.phase.back() + p.mapping.back() * (r - p.grid.back());
      } else {
        auto it = std::upper_bound(p.grid.begin(), p.grid.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - p.grid.begin()) - 1;
        const double t = (r - p.grid[i]) / (p.grid[i + 1] - p.grid[i]);
        phi = p.phase[i] + t * (p.phase[i + 1] - p.phase[i]);
      }
      const double level = wrap_phase(p.beta * phi) / (2.0 * std::numbers::pi) * 256.0;
      row[static_cast<std::size_t>(x)] = static_cast<unsigned char>(std::min(255.0, std::floor(level)));
    }
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace oamspec
