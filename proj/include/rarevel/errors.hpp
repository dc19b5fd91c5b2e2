#pragma once

#include <stdexcept>
#include <string>

namespace rarevel {

/// Malformed input: bad files, inconsistent shapes, invalid configuration.
class InputError : public std::runtime_error {
public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parse failure carrying a 1-based line number when available.
class ParseError : public InputError {
public:
  ParseError(const std::string& msg, long line)
      : InputError(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg), line_(line) {}
  long line() const { return line_; }

private:
  long line_;
};

/// A state violates a physical precondition (non-positive density,
/// negative internal energy, subsonic upstream, ...).
class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Base for failures of the numerical machinery.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The velocity grid cannot represent the requested state (singular or
/// ill-conditioned moment system, no outgoing velocities at a wall face).
class GridInadequacyError : public NumericalError {
public:
  explicit GridInadequacyError(const std::string& msg) : NumericalError(msg) {}
};

/// An iteration exhausted its budget; carries the last residual.
class ConvergenceError : public NumericalError {
public:
  ConvergenceError(const std::string& msg, double residual)
      : NumericalError(msg), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_ = 0.0;
};

/// AMR recursion exceeded the configured depth cap.
class RefinementOverflowError : public NumericalError {
public:
  explicit RefinementOverflowError(const std::string& msg) : NumericalError(msg) {}
};

/// The time iteration produced NaN/Inf.
class DivergenceError : public NumericalError {
public:
  DivergenceError(const std::string& msg, long iteration)
      : NumericalError(msg + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  long iteration() const { return iteration_; }

private:
  long iteration_;
};

} // namespace rarevel
