#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "oamspec/errors.hpp"

namespace oamspec {

namespace detail {

// z^n e^{-z}, evaluated in log space so that z = 200, n = 64 does not overflow.
inline double power_times_exp(int n, double z) {
  if (z == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(z) - z);
}

}  // namespace detail

/// Γ(n, z) = ∫_z^∞ t^{n-1} e^{-t} dt for integer n ≥ 1, from the forward
/// recurrence Γ(n+1, z) = n Γ(n, z) + z^n e^{-z} seeded with Γ(1, z) = e^{-z}.
/// Every term is non-negative, so the recurrence loses no precision.
inline double upper_incomplete_gamma_int(int n, double z) {
  if (n <= 0)
    throw DomainError("upper_incomplete_gamma_int: order must be >= 1, got " + std::to_string(n));
  if (!(z >= 0.0))
    throw DomainError("upper_incomplete_gamma_int: argument must be >= 0");
  double g = std::exp(-z);
  for (int k = 1; k < n; ++k) g = k * g + detail::power_times_exp(k, z);
  return g;
}

/// P(n, z) = 1 - Γ(n, z)/(n-1)!, the regularized lower incomplete gamma
/// function. For z < n the complement is close to 1 and is summed directly
/// from the series z^n e^{-z}/n! Σ_k z^k / ((n+1)...(n+k)) instead.
inline double regularized_lower_gamma_int(int n, double z) {
  if (n <= 0)
    throw DomainError("regularized_lower_gamma_int: order must be >= 1, got " + std::to_string(n));
  if (!(z >= 0.0))
    throw DomainError("regularized_lower_gamma_int: argument must be >= 0");
  if (z == 0.0) return 0.0;
  if (z >= n) {
    // Q(n, z) = e^{-z} Σ_{k<n} z^k/k!, summed in the scaled form of the recurrence.
    double term = std::exp(-z), q = term;
    for (int k = 1; k < n; ++k) {
      term *= z / k;
      q += term;
    }
    return 1.0 - q;
  }
  const double lead = std::exp(n * std::log(z) - z - std::lgamma(n + 1.0));
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 100000; ++k) {
    term *= z / (n + k);
    sum += term;
    if (term < sum * std::numeric_limits<double>::epsilon()) break;
  }
  return lead * sum;
}

}  // namespace oamspec
