#include "scdiff/search.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>

#include "scdiff/errors.hpp"

namespace scdiff {

void EvalRequest::validate() const {
  if (!std::isfinite(alpha)) throw std::invalid_argument("EvalRequest.alpha must be finite");
  if (!std::isfinite(beta)) throw std::invalid_argument("EvalRequest.beta must be finite");
  if (!std::isfinite(radius) || !(radius > 0.0)) {
    throw std::invalid_argument("EvalRequest.radius must be positive");
  }
  if (!std::isfinite(center.cx) || !std::isfinite(center.cy)) {
    throw std::invalid_argument("EvalRequest.center must be finite");
  }
}

std::vector<EvalResult> Evaluator::evaluate_batch(std::span<const EvalRequest> requests) {
  std::vector<EvalResult> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(evaluate(r));
  return out;
}

namespace {

void check_scores(const EvalResult& r, const std::string& who) {
  auto bad = [](double v) { return !std::isfinite(v) || v < -1.0 || v > 1.0; };
  if (bad(r.s_text)) {
    throw ContractError(who + ": s_text = " + std::to_string(r.s_text) + " outside [-1, 1]");
  }
  if (bad(r.s_img)) {
    throw ContractError(who + ": s_img = " + std::to_string(r.s_img) + " outside [-1, 1]");
  }
}

}  // namespace

EvalResult evaluate(Evaluator& evaluator, const EvalRequest& request) {
  request.validate();
  EvalResult r = evaluator.evaluate(request);
  check_scores(r, evaluator.name());
  return r;
}

std::vector<EvalResult> evaluate_batch(Evaluator& evaluator, std::span<const EvalRequest> requests) {
  for (const auto& r : requests) r.validate();
  auto results = evaluator.evaluate_batch(requests);
  if (results.size() != requests.size()) {
    throw ContractError(evaluator.name() + ": batch answered " + std::to_string(results.size()) +
                        " of " + std::to_string(requests.size()) + " requests");
  }
  for (const auto& r : results) check_scores(r, evaluator.name());
  return results;
}

double vsml_score(double s_text, double s_img, double lambda) {
  return s_text + lambda * (1.0 - s_img);
}

double constraint_g(double s_img, double tau) { return tau - s_img; }

void VsmlConfig::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0) throw std::invalid_argument("VsmlConfig.lambda must be >= 0");
  if (!(tau > -1.0 && tau < 1.0)) throw std::invalid_argument("VsmlConfig.tau must lie in (-1, 1)");
  stage1.validate();
  stage2.validate();
  if (!std::isfinite(stage1.fixed_beta)) throw std::invalid_argument("stage1.fixed_beta must be finite");
  if (!(request.radius > 0.0)) throw std::invalid_argument("request radius must be positive");
}

namespace {

// Counts every call and remembers the first transport failure so it can be
// rethrown after an optimizer has swallowed it into its trace.
class Session {
 public:
  Session(Evaluator& ev, const VsmlConfig& cfg) : ev_(ev), cfg_(cfg) {}

  EvalRequest request(double alpha, double beta) const {
    const auto& t = cfg_.request;
    return EvalRequest{alpha, beta, t.radius, t.block, t.center, t.seed, t.prompt};
  }

  EvalResult call(double alpha, double beta) {
    ++calls_;
    try {
      return evaluate(ev_, request(alpha, beta));
    } catch (const TransportError&) {
      if (!transport_) transport_ = std::current_exception();
      throw;
    }
  }

  std::vector<EvalResult> call_batch(std::span<const double> alphas, double beta) {
    std::vector<EvalRequest> reqs;
    for (double a : alphas) reqs.push_back(request(a, beta));
    calls_ += reqs.size();
    try {
      return evaluate_batch(ev_, reqs);
    } catch (const TransportError&) {
      if (!transport_) transport_ = std::current_exception();
      throw;
    }
  }

  void rethrow_transport() const {
    if (transport_) std::rethrow_exception(transport_);
  }

  std::size_t calls() const { return calls_; }

 private:
  Evaluator& ev_;
  const VsmlConfig& cfg_;
  std::size_t calls_ = 0;
  std::exception_ptr transport_;
};

}  // namespace

SearchResult hierarchical_search(Evaluator& evaluator, const VsmlConfig& config) {
  config.validate();
  SearchResult result;
  result.config = config;
  Session session(evaluator, config);

  const double beta_fixed = config.stage1.fixed_beta;
  const ScalarObjective stage1 = [&](double alpha) {
    const auto r = session.call(alpha, beta_fixed);
    return vsml_score(r.s_text, r.s_img, config.lambda);
  };
  BatchObjective stage1_batch;
  if (evaluator.concurrent_safe()) {
    stage1_batch = [&](std::span<const double> alphas) {
      std::vector<double> out;
      for (const auto& r : session.call_batch(alphas, beta_fixed)) {
        out.push_back(vsml_score(r.s_text, r.s_img, config.lambda));
      }
      return out;
    };
  }

  try {
    result.stage1 = run_bayes_opt(stage1, config.stage1, stage1_batch);
  } catch (...) {
    session.rethrow_transport();
    throw;
  }
  session.rethrow_transport();
  for (const auto& rec : result.stage1.records) {
    if (!rec.error.empty()) result.errors.push_back("stage1: " + rec.error);
  }
  result.alpha_star = result.stage1.alpha_star;

  const double alpha = result.alpha_star;
  SpsaProblem problem;
  problem.objective = [&](double beta) {
    const auto r = session.call(alpha, beta);
    return vsml_score(r.s_text, r.s_img, config.lambda);
  };
  problem.constraint = [&](double beta) { return constraint_g(session.call(alpha, beta).s_img, config.tau); };
  problem.probe = [&](double beta) {
    const auto r = session.call(alpha, beta);
    return Probe{vsml_score(r.s_text, r.s_img, config.lambda), constraint_g(r.s_img, config.tau)};
  };

  result.beta_star = config.stage2.beta0;
  try {
    result.stage2 = run_spsa(problem, config.stage2);
    result.beta_star = result.stage2->beta_star;
    for (const auto& run : result.stage2->runs) {
      if (!run.error.empty()) result.errors.push_back("stage2: " + run.error);
    }
  } catch (const std::exception& e) {
    session.rethrow_transport();
    result.errors.push_back(std::string("stage2: ") + e.what());
  }
  session.rethrow_transport();

  result.confirmation = session.call(result.alpha_star, result.beta_star);
  result.score = vsml_score(result.confirmation.s_text, result.confirmation.s_img, config.lambda);
  result.feasible = constraint_g(result.confirmation.s_img, config.tau) <= 0.0;
  result.evaluator_calls = session.calls();
  return result;
}

}  // namespace scdiff
