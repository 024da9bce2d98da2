#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace scdiff {

struct SpsaConfig {
  double beta0 = 8.0;
  double beta_min = 6.0;
  double beta_max = 12.0;
  int iterations = 50;
  double a = 0.5;
  double gain_exponent = 0.602;
  double c = 0.1;
  double gamma = 0.101;
  int n_runs = 5;
  int max_backtracks = 8;
  std::uint64_t seed = 0;

  void validate() const;
  double step_gain(int t) const;          // a / t^gain_exponent
  double perturbation_gain(int t) const;  // c / t^gamma
};

/// Symmetric +-1 draws from a seeded engine.
class BernoulliStream {
 public:
  explicit BernoulliStream(std::uint64_t seed) : rng_(seed) {}
  int next() { return coin_(rng_) ? 1 : -1; }

 private:
  std::mt19937_64 rng_;
  std::bernoulli_distribution coin_{0.5};
};

/// Objective and constraint value at one point; a point is feasible when
/// constraint <= 0.
struct Probe {
  double objective = 0.0;
  double constraint = 0.0;

  bool feasible() const noexcept { return constraint <= 0.0; }
};

/// f is maximized subject to g <= 0. `probe` evaluates both at a candidate
/// iterate; when empty it calls objective and constraint separately.
struct SpsaProblem {
  std::function<double(double)> objective;
  std::function<double(double)> constraint;
  std::function<Probe(double)> probe;

  Probe probe_at(double beta) const;
};

/// [f(beta + c delta) - f(beta - c delta)] / (2c) * delta. Exactly two
/// objective evaluations.
double pseudo_gradient(const std::function<double(double)>& f, double beta, double c_t, int delta);

struct GradientSample {
  double plus_point = 0.0;
  double minus_point = 0.0;
  double f_plus = 0.0;
  double f_minus = 0.0;
  double gradient = 0.0;
};

/// Same estimate with both probe points clipped into [lo, hi]; the
/// difference quotient then uses the clipped spacing.
GradientSample pseudo_gradient_clipped(const std::function<double(double)>& f, double beta,
                                       double c_t, int delta, double lo, double hi);

struct SpsaAttempt {
  int delta = 0;
  double step = 0.0;  // a_t after halvings
  GradientSample sample;
  double candidate = 0.0;
  Probe at_candidate;
  bool accepted = false;
};

struct SpsaStepRecord {
  int t = 0;
  double beta_before = 0.0;
  double beta_after = 0.0;
  double a_t = 0.0;
  double c_t = 0.0;
  std::vector<SpsaAttempt> attempts;
  bool stalled = false;
  Probe at_beta;  // probe of beta_after
  std::size_t gradient_evaluations = 0;
  std::size_t probe_evaluations = 0;

  int backtracks() const { return attempts.empty() ? 0 : static_cast<int>(attempts.size()) - 1; }
};

struct SpsaState {
  double beta = 0.0;
  Probe at_beta;
  BernoulliStream deltas;
};

/// One projected ascent step with halving backtracks on infeasible
/// candidates. A candidate is accepted when feasible, or when the current
/// iterate is infeasible and the candidate strictly reduces the violation.
/// After max_backtracks failed halvings the iterate stays put.
SpsaStepRecord spsa_step(SpsaState& state, const SpsaProblem& problem, const SpsaConfig& config,
                         int t);

struct SpsaRun {
  std::uint64_t seed = 0;
  Probe initial;
  std::vector<SpsaStepRecord> steps;
  bool has_feasible = false;
  double best_beta = 0.0;  // best feasible iterate, or minimum violation
  Probe best;
  std::size_t gradient_evaluations = 0;
  std::size_t probe_evaluations = 0;
  std::string error;

  std::size_t evaluations() const { return gradient_evaluations + probe_evaluations; }
};

struct SpsaTrace {
  std::vector<SpsaRun> runs;
  double beta_star = 0.0;
  Probe at_star;
  bool feasible = false;
  int selected_run = -1;

  std::size_t evaluations() const;
};

/// n_runs independent seeded runs of `iterations` steps each. Each run
/// probes beta0 once, then spends 3 evaluations per attempt (two gradient
/// probes plus the candidate). Throws OptimizationError when every run
/// fails before producing an iterate.
SpsaTrace run_spsa(const SpsaProblem& problem, const SpsaConfig& config);

}  // namespace scdiff
