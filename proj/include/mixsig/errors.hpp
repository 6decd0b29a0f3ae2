#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixsig {

/// Base class for every failure raised by the model. Catch this to handle
/// any regime or domain violation in one place.
class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public ModelError {
public:
  using ModelError::ModelError;
};

/// Arrival rate is not below the service rate (q >= c).
class OverCapacityError : public ModelError {
public:
  using ModelError::ModelError;
};

/// The queue does not clear within the effective green.
class SaturationError : public ModelError {
public:
  using ModelError::ModelError;
};

/// HDV queue dissolves before the acceleration phase ends; the closed-form
/// clearance time would be negative.
class EarlyClearanceError : public ModelError {
public:
  using ModelError::ModelError;
};

/// No cycle length satisfies the constraints.
class InfeasibleError : public ModelError {
public:
  using ModelError::ModelError;
};

/// A ratio whose denominator vanishes (e.g. every green ratio equals one).
class DegenerateError : public ModelError {
public:
  using ModelError::ModelError;
};

class ConvergenceError : public ModelError {
public:
  using ModelError::ModelError;
};

/// Aggregated failure over the approaches of an intersection.
class ApproachRegimeError : public SaturationError {
public:
  ApproachRegimeError(const std::string& what, std::vector<std::size_t> indices)
      : SaturationError(what), indices_(std::move(indices)) {}

  const std::vector<std::size_t>& indices() const { return indices_; }

private:
  std::vector<std::size_t> indices_;
};

} // namespace mixsig
