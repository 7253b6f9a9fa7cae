#pragma once

#include <stdexcept>
#include <string>

namespace kwc {

/// Inputs that do not satisfy a documented precondition (bad ranges, bad
/// configuration values, infeasible jump sets).
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Two fields that should live on the same grid do not.
class DimensionError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

/// A field violates a domain constraint (e.g. theta not pinned to gamma).
class DomainError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

/// Argument outside the supported evaluation range.
class RangeError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

/// An iterative solver did not reach its tolerance.
class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

/// A discrete invariant that the scheme guarantees was violated (maximum
/// principle, energy inequality). Always indicates a bug or a broken input.
class SchemeError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// A file could not be written.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace kwc
