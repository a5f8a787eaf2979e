#pragma once

#include <stdexcept>
#include <string>

namespace pauli {

enum class ErrorKind {
  InvalidArgument,
  InvalidDomain,
  EmptyInterior,
  DisconnectedInterior,
  NoConvergence,
  UnsupportedDomain,
  NonPositiveHessian,
  FluxTooLarge,
  WeightUnderflow,
  SingularShift,
  InsufficientRange,
  Overflow,
  BracketFailure,
  TempleInapplicable,
  ConfigError,
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure raised by the toolkit. Carries the
/// module that raised it so the CLI can surface provenance.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message)
      : std::runtime_error(module + ": " + to_string(kind) + ": " + message),
        kind_(kind),
        module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

/// Iterative solver gave up. `residual` is the best residual reached.
class NoConvergence : public Error {
 public:
  NoConvergence(std::string module, int iterations, double residual, const std::string& what)
      : Error(ErrorKind::NoConvergence, std::move(module),
              what + " (iterations=" + std::to_string(iterations) +
                  ", residual=" + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidDomain: return "InvalidDomain";
    case ErrorKind::EmptyInterior: return "EmptyInterior";
    case ErrorKind::DisconnectedInterior: return "DisconnectedInterior";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::UnsupportedDomain: return "UnsupportedDomain";
    case ErrorKind::NonPositiveHessian: return "NonPositiveHessian";
    case ErrorKind::FluxTooLarge: return "FluxTooLarge";
    case ErrorKind::WeightUnderflow: return "WeightUnderflow";
    case ErrorKind::SingularShift: return "SingularShift";
    case ErrorKind::InsufficientRange: return "InsufficientRange";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::TempleInapplicable: return "TempleInapplicable";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace pauli
