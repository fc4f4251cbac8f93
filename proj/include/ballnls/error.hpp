#pragma once

#include <stdexcept>
#include <string>

namespace ballnls {

/// Base class for every failure raised by the library. `kind()` is a short
/// stable tag used by the CLI to pick an exit code.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

/// A cutoff, quadrature order or sampling grid is too coarse for the request.
struct ResolutionError : Error {
  explicit ResolutionError(const std::string& what) : Error("resolution", what) {}
};

/// Monte Carlo request with too few trials to be meaningful.
struct PrecisionError : Error {
  explicit PrecisionError(const std::string& what) : Error("precision", what) {}
};

/// Reading or writing a persisted artifact failed (I/O, bad magic, digest).
struct StorageError : Error {
  explicit StorageError(const std::string& what) : Error("storage", what) {}
};

/// Ratio with a vanishing denominator.
struct UndefinedRatioError : Error {
  explicit UndefinedRatioError(const std::string& what) : Error("undefined-ratio", what) {}
};

/// Tail fit attempted on data with no usable tail.
struct FitDegenerateError : Error {
  explicit FitDegenerateError(const std::string& what) : Error("fit-degenerate", what) {}
};

/// Invalid configuration value (bad flag combination, malformed config file).
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

/// Rejection sampler ran out of attempts.
struct SamplingError : Error {
  SamplingError(const std::string& what, double acceptance_rate)
      : Error("sampling", what), acceptance_rate(acceptance_rate) {}
  double acceptance_rate;
};

}  // namespace ballnls
