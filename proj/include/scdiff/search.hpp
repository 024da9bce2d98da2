#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scdiff/bayesopt.hpp"
#include "scdiff/modulation.hpp"
#include "scdiff/spsa.hpp"
#include "scdiff/windows.hpp"

namespace scdiff {

/// One query of the black box: generate I(alpha, beta) and score it.
struct EvalRequest {
  double alpha = 1.0;
  double beta = 7.0;
  double radius = 15.0;
  BlockTag block = BlockTag::down0;
  Center center;
  std::uint64_t seed = 0;
  std::string prompt;  // opaque to the library

  void validate() const;
};

struct EvalResult {
  double s_text = 0.0;  // cosine similarity to the prompt
  double s_img = 0.0;   // cosine similarity to the unmodulated image
  std::int64_t latency_ms = 0;
  std::string evaluator_id;
};

/// Black-box scorer. Implementations: the synthetic fixtures and the
/// external-process bridge.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual std::string name() const = 0;
  /// True when several requests may be in flight at once.
  virtual bool concurrent_safe() const { return false; }
  virtual EvalResult evaluate(const EvalRequest& request) = 0;
  /// Default answers requests one by one, in order.
  virtual std::vector<EvalResult> evaluate_batch(std::span<const EvalRequest> requests);
};

/// Validates the request, calls the evaluator and enforces the score
/// contract (finite, within [-1, 1]); violations raise ContractError.
EvalResult evaluate(Evaluator& evaluator, const EvalRequest& request);
std::vector<EvalResult> evaluate_batch(Evaluator& evaluator, std::span<const EvalRequest> requests);

/// S = s_text + lambda (1 - s_img)
double vsml_score(double s_text, double s_img, double lambda);

/// g = tau - s_img; feasible iff g <= 0.
double constraint_g(double s_img, double tau);

/// Request fields that stay fixed across a search.
struct RequestTemplate {
  double radius = 15.0;
  BlockTag block = BlockTag::down0;
  Center center{32.0, 32.0};
  std::uint64_t seed = 0;
  std::string prompt = "a photo of a creative object";
};

struct VsmlConfig {
  double lambda = 1.0;
  double tau = 0.7;
  BayesOptConfig stage1;
  SpsaConfig stage2;
  RequestTemplate request;

  void validate() const;
};

struct SearchResult {
  double alpha_star = 0.0;
  double beta_star = 0.0;
  bool feasible = false;
  double score = 0.0;
  EvalResult confirmation;
  BoTrace stage1;
  std::optional<SpsaTrace> stage2;
  std::size_t evaluator_calls = 0;
  std::vector<std::string> errors;
  VsmlConfig config;
};

/// Stage 1: unconstrained Bayesian optimization of S over alpha at the
/// fixed beta. Stage 2: constrained SPSA over beta at alpha*. Finishes with
/// one confirmation evaluation at (alpha*, beta*), which sets `feasible`.
/// Transport failures propagate; a stage-2 failure falls back to beta0.
SearchResult hierarchical_search(Evaluator& evaluator, const VsmlConfig& config);

}  // namespace scdiff
