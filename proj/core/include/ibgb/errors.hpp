#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ibgb {

/// Bad input to a public operation (bad sizes, out-of-range parameters, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition on the *values* of an input does not hold.
/// `index` points at the offending element when there is one.
class PreconditionError : public InvalidArgument {
 public:
  PreconditionError(const std::string& what, std::size_t index)
      : InvalidArgument(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Non-finite value produced inside a forward pass.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, int layer) : std::runtime_error(what), layer_(layer) {}
  /// 1-based layer index (see MlpShape).
  int layer() const noexcept { return layer_; }

 private:
  int layer_;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// Correlation with a zero-variance argument.
class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class RescaleUndefined : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ibgb
