#pragma once

#include <stdexcept>
#include <string>

namespace scdiff {

/// File could not be opened, read or written, or its bytes are malformed.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Run configuration failed schema validation.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Marginal-likelihood fit could not proceed (degenerate data, no PD factor).
struct GpFitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Base of every failure raised while talking to an evaluator.
struct EvaluatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Process could not be launched, handshake failed, pipe closed, or timeout.
struct TransportError : EvaluatorError {
  using EvaluatorError::EvaluatorError;
};

/// Evaluator answered, but the answer breaks the protocol or score contract.
struct ContractError : EvaluatorError {
  using EvaluatorError::EvaluatorError;
};

/// Evaluator reported an error for this request.
struct EvaluationFailed : EvaluatorError {
  using EvaluatorError::EvaluatorError;
};

/// An optimizer could not produce a result (too few successful evaluations).
struct OptimizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace scdiff
