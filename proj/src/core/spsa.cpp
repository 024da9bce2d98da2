#include "scdiff/spsa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scdiff/errors.hpp"

namespace scdiff {

void SpsaConfig::validate() const {
  if (!std::isfinite(beta_min) || !std::isfinite(beta_max) || !(beta_min < beta_max)) {
    throw std::invalid_argument("SpsaConfig: need beta_min < beta_max");
  }
  if (!(beta0 >= beta_min && beta0 <= beta_max)) {
    throw std::invalid_argument("SpsaConfig.beta0 must lie within [beta_min, beta_max]");
  }
  if (iterations < 1) throw std::invalid_argument("SpsaConfig.iterations must be >= 1");
  if (!(a > 0.0)) throw std::invalid_argument("SpsaConfig.a must be positive");
  if (!(c > 0.0)) throw std::invalid_argument("SpsaConfig.c must be positive");
  if (!(gain_exponent > 0.0)) throw std::invalid_argument("SpsaConfig.gain_exponent must be positive");
  if (!(gamma > 0.0)) throw std::invalid_argument("SpsaConfig.gamma must be positive");
  if (n_runs < 1) throw std::invalid_argument("SpsaConfig.n_runs must be >= 1");
  if (max_backtracks < 1) throw std::invalid_argument("SpsaConfig.max_backtracks must be >= 1");
}

double SpsaConfig::step_gain(int t) const { return a / std::pow(static_cast<double>(t), gain_exponent); }

double SpsaConfig::perturbation_gain(int t) const {
  return c / std::pow(static_cast<double>(t), gamma);
}

Probe SpsaProblem::probe_at(double beta) const {
  if (probe) return probe(beta);
  return Probe{objective(beta), constraint(beta)};
}

double pseudo_gradient(const std::function<double(double)>& f, double beta, double c_t, int delta) {
  if (!(c_t > 0.0)) throw std::invalid_argument("pseudo_gradient: c_t must be positive");
  if (delta != 1 && delta != -1) throw std::invalid_argument("pseudo_gradient: delta must be +-1");
  const double d = static_cast<double>(delta);
  const double f_plus = f(beta + c_t * d);
  const double f_minus = f(beta - c_t * d);
  return (f_plus - f_minus) / (2.0 * c_t) * d;
}

GradientSample pseudo_gradient_clipped(const std::function<double(double)>& f, double beta,
                                       double c_t, int delta, double lo, double hi) {
  if (!(c_t > 0.0)) throw std::invalid_argument("pseudo_gradient: c_t must be positive");
  if (delta != 1 && delta != -1) throw std::invalid_argument("pseudo_gradient: delta must be +-1");
  const double d = static_cast<double>(delta);
  GradientSample s;
  s.plus_point = std::clamp(beta + c_t * d, lo, hi);
  s.minus_point = std::clamp(beta - c_t * d, lo, hi);
  s.f_plus = f(s.plus_point);
  s.f_minus = f(s.minus_point);
  const double spacing = s.plus_point - s.minus_point;
  s.gradient = spacing != 0.0 ? (s.f_plus - s.f_minus) / spacing : 0.0;
  return s;
}

SpsaStepRecord spsa_step(SpsaState& state, const SpsaProblem& problem, const SpsaConfig& config,
                         int t) {
  if (t < 1) throw std::invalid_argument("spsa_step: t must be >= 1");
  SpsaStepRecord rec;
  rec.t = t;
  rec.beta_before = state.beta;
  rec.a_t = config.step_gain(t);
  rec.c_t = config.perturbation_gain(t);

  double step = rec.a_t;
  for (int k = 0; k <= config.max_backtracks; ++k) {
    SpsaAttempt attempt;
    attempt.delta = state.deltas.next();
    attempt.step = step;
    attempt.sample = pseudo_gradient_clipped(problem.objective, state.beta, rec.c_t, attempt.delta,
                                             config.beta_min, config.beta_max);
    rec.gradient_evaluations += 2;
    attempt.candidate =
        std::clamp(state.beta + step * attempt.sample.gradient, config.beta_min, config.beta_max);
    attempt.at_candidate = problem.probe_at(attempt.candidate);
    rec.probe_evaluations += 1;

    const bool feasible = attempt.at_candidate.feasible();
    const bool less_violation = !state.at_beta.feasible() &&
                                attempt.at_candidate.constraint < state.at_beta.constraint;
    attempt.accepted = feasible || less_violation;
    rec.attempts.push_back(attempt);
    if (attempt.accepted) {
      state.beta = attempt.candidate;
      state.at_beta = attempt.at_candidate;
      break;
    }
    step *= 0.5;
  }
  rec.stalled = !rec.attempts.back().accepted;
  rec.beta_after = state.beta;
  rec.at_beta = state.at_beta;
  return rec;
}

namespace {

std::uint64_t run_seed(std::uint64_t seed, int run) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(run + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Better = feasible beats infeasible; among feasible higher objective; among
// infeasible lower violation. Ties keep the incumbent.
bool improves(const Probe& cand, const Probe& inc) {
  if (cand.feasible() != inc.feasible()) return cand.feasible();
  if (cand.feasible()) return cand.objective > inc.objective;
  return cand.constraint < inc.constraint;
}

}  // namespace

std::size_t SpsaTrace::evaluations() const {
  std::size_t n = 0;
  for (const auto& r : runs) n += r.evaluations();
  return n;
}

SpsaTrace run_spsa(const SpsaProblem& problem, const SpsaConfig& config) {
  config.validate();
  if (!problem.objective) throw std::invalid_argument("run_spsa: objective is required");
  if (!problem.constraint && !problem.probe) {
    throw std::invalid_argument("run_spsa: constraint or probe is required");
  }

  SpsaTrace trace;
  bool any_iterate = false;
  for (int r = 0; r < config.n_runs; ++r) {
    SpsaRun run;
    run.seed = run_seed(config.seed, r);
    try {
      run.initial = problem.probe_at(config.beta0);
      run.probe_evaluations = 1;
      run.best_beta = config.beta0;
      run.best = run.initial;
      SpsaState state{config.beta0, run.initial, BernoulliStream(run.seed)};
      for (int t = 1; t <= config.iterations; ++t) {
        auto step = spsa_step(state, problem, config, t);
        run.gradient_evaluations += step.gradient_evaluations;
        run.probe_evaluations += step.probe_evaluations;
        if (improves(step.at_beta, run.best)) {
          run.best = step.at_beta;
          run.best_beta = step.beta_after;
        }
        run.steps.push_back(std::move(step));
      }
    } catch (const std::exception& e) {
      run.error = e.what();
    }
    if (run.probe_evaluations > 0) {
      run.has_feasible = run.best.feasible();
      const bool first = !any_iterate;
      any_iterate = true;
      if (first || improves(run.best, trace.at_star)) {
        trace.selected_run = r;
        trace.beta_star = run.best_beta;
        trace.at_star = run.best;
        trace.feasible = run.best.feasible();
      }
    }
    trace.runs.push_back(std::move(run));
  }
  if (!any_iterate) {
    throw OptimizationError("SPSA: every run failed: " + trace.runs.front().error);
  }
  return trace;
}

}  // namespace scdiff
