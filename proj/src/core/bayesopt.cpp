#include "scdiff/bayesopt.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "scdiff/errors.hpp"
#include "scdiff/special_fns.hpp"

namespace scdiff {

void BayesOptConfig::validate() const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw std::invalid_argument("BayesOptConfig: bounds need lo < hi");
  }
  if (n_init < 2) throw std::invalid_argument("BayesOptConfig.n_init must be >= 2");
  if (n_iter < 1) throw std::invalid_argument("BayesOptConfig.n_iter must be >= 1");
  if (restarts < 1) throw std::invalid_argument("BayesOptConfig.restarts must be >= 1");
  if (gp_starts < 1) throw std::invalid_argument("BayesOptConfig.gp_starts must be >= 1");
  if (posterior_grid < 2) throw std::invalid_argument("BayesOptConfig.posterior_grid must be >= 2");
  gp_bounds.validate();
}

std::vector<double> lhs_sample(std::size_t n, double lo, double hi, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("lhs_sample: n must be >= 1");
  if (!(lo < hi)) throw std::invalid_argument("lhs_sample: need lo < hi");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double width = (hi - lo) / static_cast<double>(n);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t k : order) {
    const double x = lo + (static_cast<double>(k) + unit(rng)) * width;
    // Rounding can push the last stratum's point onto hi; keep it inside.
    out.push_back(std::min(x, hi));
  }
  return out;
}

double expected_improvement(double mu, double sigma, double f_best) {
  const double delta = mu - f_best;
  if (!(sigma > 0.0)) return std::max(delta, 0.0);
  const double z = delta / sigma;
  return std::max(0.0, delta * std_normal_cdf(z) + sigma * std_normal_pdf(z));
}

double acquisition(const GpModel& model, double x) {
  const auto p = model.posterior(x);
  return expected_improvement(p.mean, p.stddev, model.best_observed());
}

namespace detail {

double local_ascent(const std::function<double(double)>& f, double x0, double lo, double hi,
                    double step) {
  const double f0 = f(x0);
  const double xr = std::min(x0 + step, hi);
  const double xl = std::max(x0 - step, lo);
  const double fr = f(xr);
  const double fl = f(xl);

  double a = xl;
  double b = xr;
  if (fr > f0 || fl > f0) {
    const double dir = fr >= fl ? 1.0 : -1.0;
    double prev = x0;
    double cur = dir > 0 ? xr : xl;
    double fcur = std::max(fr, fl);
    double s = step;
    const double bound = dir > 0 ? hi : lo;
    double next = cur;
    while (cur != bound) {
      s *= 2.0;
      next = std::clamp(cur + dir * s, lo, hi);
      const double fnext = f(next);
      if (fnext <= fcur) break;
      prev = cur;
      cur = next;
      fcur = fnext;
    }
    a = std::min(prev, next);
    b = std::max(prev, next);
  }

  double best_x = x0;
  double best_f = f0;
  if (b > a) {
    auto neg = [&f](double x) { return -f(x); };
    const auto [x, negf] =
        boost::math::tools::brent_find_minima(neg, a, b, std::numeric_limits<double>::digits / 2);
    if (-negf > best_f) {
      best_x = x;
      best_f = -negf;
    }
  }
  for (double x : {xr, xl}) {
    const double v = f(x);
    if (v > best_f) {
      best_f = v;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace detail

double maximize_acquisition(const GpModel& model, double lo, double hi, int restarts,
                            std::uint64_t seed) {
  if (!(lo < hi)) throw std::invalid_argument("maximize_acquisition: need lo < hi");
  if (restarts < 1) throw std::invalid_argument("maximize_acquisition: restarts must be >= 1");
  const double f_best = model.best_observed();
  auto ei = [&](double x) {
    const auto p = model.posterior(x);
    return expected_improvement(p.mean, p.stddev, f_best);
  };

  constexpr int kGrid = 201;
  std::vector<double> starts;
  double grid_best = lo;
  double grid_best_v = -1.0;
  for (int k = 0; k < kGrid; ++k) {
    const double x = lo + (hi - lo) * k / (kGrid - 1);
    const double v = ei(x);
    if (v > grid_best_v) {
      grid_best_v = v;
      grid_best = x;
    }
  }
  starts.push_back(grid_best);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(lo, hi);
  for (int r = 0; r < restarts; ++r) starts.push_back(unit(rng));

  const double step = (hi - lo) / (kGrid - 1);
  double best_x = starts.front();
  double best_v = ei(best_x);
  for (double s : starts) {
    const double x = detail::local_ascent(ei, s, lo, hi, step);
    const double v = ei(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return std::clamp(best_x, lo, hi);
}

double maximize_posterior_mean(const GpModel& model, double lo, double hi, int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("maximize_posterior_mean: need >= 2 grid points");
  auto mean = [&](double x) { return model.posterior(x).mean; };
  double best_x = lo;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid_points; ++k) {
    const double x = lo + (hi - lo) * k / (grid_points - 1);
    const double v = mean(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return std::clamp(detail::local_ascent(mean, best_x, lo, hi, (hi - lo) / (grid_points - 1)), lo, hi);
}

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

BoTrace run_bayes_opt(const ScalarObjective& objective, const BayesOptConfig& config,
                      const BatchObjective& batch) {
  config.validate();
  BoTrace trace;
  trace.lo = config.lo;
  trace.hi = config.hi;
  trace.seed = config.seed;

  std::vector<Observation> data;
  auto fit_options = [&](std::uint64_t salt) {
    FitOptions fo;
    fo.bounds = config.gp_bounds;
    fo.starts = config.gp_starts;
    fo.seed = mix(config.seed, 1000 + salt);
    fo.gp = GpOptions{config.lo, config.hi, true};
    return fo;
  };

  const auto init = lhs_sample(static_cast<std::size_t>(config.n_init), config.lo, config.hi,
                               mix(config.seed, 0));
  if (batch) {
    std::vector<double> values;
    std::string error;
    try {
      values = batch(init);
      if (values.size() != init.size()) error = "batch objective returned wrong number of values";
    } catch (const std::exception& e) {
      error = e.what();
    }
    trace.evaluations += init.size();
    for (std::size_t k = 0; k < init.size(); ++k) {
      BoRecord rec{init[k], true, {}, {}, {}, {}, {}};
      if (error.empty()) {
        rec.value = values[k];
        data.push_back({init[k], values[k]});
      } else {
        rec.error = error;
      }
      trace.records.push_back(std::move(rec));
    }
    trace.truncated = !error.empty();
  } else {
    for (double a : init) {
      BoRecord rec{a, true, {}, {}, {}, {}, {}};
      ++trace.evaluations;
      try {
        const double v = objective(a);
        rec.value = v;
        data.push_back({a, v});
        trace.records.push_back(std::move(rec));
      } catch (const std::exception& e) {
        rec.error = e.what();
        trace.records.push_back(std::move(rec));
        trace.truncated = true;
        break;
      }
    }
  }

  for (int it = 0; it < config.n_iter && !trace.truncated; ++it) {
    if (data.size() < 2) break;
    const GpModel model = fit(data, fit_options(static_cast<std::uint64_t>(it)));
    const double next = maximize_acquisition(model, config.lo, config.hi, config.restarts,
                                             mix(config.seed, 2000 + static_cast<std::uint64_t>(it)));
    const auto p = model.posterior(next);
    BoRecord rec{next, false, {}, expected_improvement(p.mean, p.stddev, model.best_observed()),
                 p.mean, p.stddev, {}};
    ++trace.evaluations;
    try {
      const double v = objective(next);
      rec.value = v;
      data.push_back({next, v});
    } catch (const std::exception& e) {
      rec.error = e.what();
      trace.truncated = true;
    }
    trace.records.push_back(std::move(rec));
  }

  if (data.size() < 2) {
    throw OptimizationError("Bayesian optimization: only " + std::to_string(data.size()) +
                            " successful evaluation(s); need at least 2");
  }
  const GpModel final_model = fit(data, fit_options(static_cast<std::uint64_t>(config.n_iter)));
  trace.hyperparams = final_model.hyperparams();
  trace.alpha_star = maximize_posterior_mean(final_model, config.lo, config.hi, config.posterior_grid);
  trace.mu_star = final_model.posterior(trace.alpha_star).mean;
  constexpr int kCurve = 101;
  for (int k = 0; k < kCurve; ++k) {
    const double a = config.lo + (config.hi - config.lo) * k / (kCurve - 1);
    trace.posterior_curve.emplace_back(a, final_model.posterior(a).mean);
  }
  return trace;
}

}  // namespace scdiff
