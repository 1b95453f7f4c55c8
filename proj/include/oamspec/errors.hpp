#pragma once

#include <stdexcept>
#include <string>

namespace oamspec {

/// Base of every error thrown by the library. `kind()` is a stable,
/// machine-readable tag used by the CLI error line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error("domain", m) {}
};

/// Invalid or inconsistent OAM window.
class WindowError : public Error {
 public:
  explicit WindowError(const std::string& m) : Error("window", m) {}
};

/// Overlap integral does not converge (2γ² + 2η² − a ≤ 0).
class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& m) : Error("divergence", m) {}
};

/// Quadrature failed to reach the requested tolerance.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& m, double residual)
      : Error("accuracy", m), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Spectrum or matrix expected to be normalized but is not.
class NormalizationError : public Error {
 public:
  explicit NormalizationError(const std::string& m) : Error("normalization", m) {}
};

/// Input carries no signal (e.g. an all-zero pump).
class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& m) : Error("degenerate_input", m) {}
};

class DivisionError : public Error {
 public:
  explicit DivisionError(const std::string& m) : Error("division", m) {}
};

/// Ray mapping hits a zero of the target intensity.
class MappingSingularityError : public Error {
 public:
  explicit MappingSingularityError(const std::string& m) : Error("mapping_singularity", m) {}
};

/// Field grid cannot represent the transform (energy leaks past the band).
class SamplingError : public Error {
 public:
  SamplingError(const std::string& m, double leakage)
      : Error("sampling", m), leakage_(leakage) {}
  double leakage() const noexcept { return leakage_; }

 private:
  double leakage_;
};

/// Measurement settings are not informationally complete.
class ConditioningError : public Error {
 public:
  explicit ConditioningError(const std::string& m) : Error("conditioning", m) {}
};

}  // namespace oamspec
