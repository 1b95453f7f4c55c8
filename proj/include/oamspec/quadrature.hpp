#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "oamspec/errors.hpp"

namespace oamspec {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // Kronrod error estimate
  int evaluations = 0;
};

struct QuadratureOptions {
  double absTol = 0.0;
  double relTol = 1e-13;
  int maxSubdivisions = 2000;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b]. The interval
/// with the largest error estimate is bisected until the summed estimate is
/// below max(absTol, relTol * |I|). `breakpoints` are forced panel edges.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {},
                           const std::vector<double>& breakpoints = {}) {
  QuadratureResult out;
  if (a == b) return out;

  std::vector<double> edges{a};
  for (double p : breakpoints)
    if (p > a && p < b) edges.push_back(p);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());

  std::priority_queue<detail::Panel> panels;
  double total = 0.0, error = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    auto p = detail::kronrod15(f, edges[i], edges[i + 1]);
    out.evaluations += 15;
    total += p.value;
    error += p.error;
    panels.push(p);
  }

  int subdivisions = 0;
  auto tolerance = [&] { return std::max(opt.absTol, opt.relTol * std::abs(total)); };
  while (error > tolerance()) {
    if (subdivisions >= opt.maxSubdivisions)
      throw AccuracyError("adaptive quadrature did not converge", error);
    auto worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Cannot split further in double precision.
      if (worst.error > tolerance())
        throw AccuracyError("adaptive quadrature hit floating-point resolution", error);
      break;
    }
    auto left = detail::kronrod15(f, worst.a, mid);
    auto right = detail::kronrod15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++subdivisions;
  }

  // Re-sum to shed the rounding drift of the running totals.
  double value = 0.0, err = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    err += panels.top().error;
    panels.pop();
  }
  out.value = value;
  out.error = err;
  return out;
}

}  // namespace oamspec
