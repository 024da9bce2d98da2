#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scdiff/gp.hpp"

namespace scdiff {

using ScalarObjective = std::function<double(double)>;
/// Evaluates several points in one go; used for the Latin-hypercube batch
/// when the objective may be queried concurrently.
using BatchObjective = std::function<std::vector<double>(std::span<const double>)>;

struct BayesOptConfig {
  double lo = 1.5;
  double hi = 8.0;
  int n_init = 5;
  int n_iter = 10;
  int restarts = 10;
  std::uint64_t seed = 0;
  /// Held-fixed window shape while this stage runs; not used by run_bayes_opt.
  double fixed_beta = 7.0;
  HyperparamBounds gp_bounds;
  int gp_starts = 8;
  int posterior_grid = 2001;

  void validate() const;
};

/// One point per stratum of [lo, hi] split into n equal strata, in a
/// seeded random order.
std::vector<double> lhs_sample(std::size_t n, double lo, double hi, std::uint64_t seed);

/// (mu - f_best) Phi(Z) + sigma phi(Z), Z = (mu - f_best) / sigma;
/// max(mu - f_best, 0) when sigma == 0.
double expected_improvement(double mu, double sigma, double f_best);

/// EI of the model's posterior against its best observed value.
double acquisition(const GpModel& model, double x);

/// Multi-start bounded local ascent of EI. Starts are `restarts` seeded
/// uniform points plus the best point of a 201-point grid.
double maximize_acquisition(const GpModel& model, double lo, double hi, int restarts,
                            std::uint64_t seed);

/// argmax of the posterior mean on a uniform grid, refined locally.
double maximize_posterior_mean(const GpModel& model, double lo, double hi, int grid_points);

struct BoRecord {
  double alpha = 0.0;
  bool initial = false;  // Latin-hypercube design point
  std::optional<double> value;
  std::optional<double> ei;     // EI when the point was chosen
  std::optional<double> mu;     // posterior before observing it
  std::optional<double> sigma;
  std::string error;
};

struct BoTrace {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t seed = 0;
  std::vector<BoRecord> records;
  double alpha_star = 0.0;
  double mu_star = 0.0;
  GpHyperparams hyperparams;
  std::vector<std::pair<double, double>> posterior_curve;  // (alpha, mean)
  std::size_t evaluations = 0;
  bool truncated = false;
};

/// n_init Latin-hypercube points, then n_iter EI-chosen points with a GP
/// refit after each. Evaluation failures truncate the trace; fewer than two
/// successes throws OptimizationError.
BoTrace run_bayes_opt(const ScalarObjective& objective, const BayesOptConfig& config,
                      const BatchObjective& batch = {});

namespace detail {
/// Step-doubling bracket search from x0 followed by Brent refinement.
/// Never returns a point with a lower value than x0.
double local_ascent(const std::function<double(double)>& f, double x0, double lo, double hi,
                    double step);
}  // namespace detail

}  // namespace scdiff
