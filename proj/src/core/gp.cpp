#include "scdiff/gp.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "scdiff/errors.hpp"

namespace scdiff {
namespace {

constexpr int kMaxJitterSteps = 6;
constexpr int kNelderMeadIterations = 400;

const double kSqrt5 = std::sqrt(5.0);

double matern52_scaled(double r, double l, double s2) {
  const double u = kSqrt5 * r / l;
  return s2 * (1.0 + u + u * u / 3.0) * std::exp(-u);
}

void check_finite(std::span<const Observation> obs) {
  for (const auto& o : obs) {
    if (!std::isfinite(o.x) || !std::isfinite(o.y)) {
      throw std::invalid_argument("GP observation is not finite");
    }
  }
}

}  // namespace

void GpHyperparams::validate() const {
  if (!(length_scale > 0.0) || !std::isfinite(length_scale)) {
    throw std::invalid_argument("GpHyperparams.length_scale must be positive");
  }
  if (!(signal_var > 0.0) || !std::isfinite(signal_var)) {
    throw std::invalid_argument("GpHyperparams.signal_var must be positive");
  }
  if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) {
    throw std::invalid_argument("GpHyperparams.noise_var must be non-negative");
  }
}

void HyperparamBounds::validate() const {
  const bool ok = length_scale_lo > 0 && length_scale_lo <= length_scale_hi && signal_var_lo > 0 &&
                  signal_var_lo <= signal_var_hi && noise_var_lo > 0 && noise_var_lo <= noise_var_hi;
  if (!ok) throw std::invalid_argument("HyperparamBounds: need 0 < lo <= hi for every parameter");
}

double matern52(double x, double x2, const GpHyperparams& hp) {
  return matern52_scaled(std::abs(x - x2), hp.length_scale, hp.signal_var);
}

GpModel GpModel::condition(std::vector<Observation> observations, const GpHyperparams& hp,
                           const GpOptions& options) {
  hp.validate();
  if (observations.empty()) throw std::invalid_argument("GpModel: need at least one observation");
  if (!(options.input_hi > options.input_lo)) {
    throw std::invalid_argument("GpOptions: input_hi must exceed input_lo");
  }
  check_finite(observations);

  GpModel m;
  m.hp_ = hp;
  m.options_ = options;
  m.observations_ = std::move(observations);
  const auto n = static_cast<Eigen::Index>(m.observations_.size());

  if (options.center_outputs) {
    double sum = 0.0;
    for (const auto& o : m.observations_) sum += o.y;
    m.y_offset_ = sum / static_cast<double>(n);
  }

  Eigen::VectorXd y(n);
  m.scaled_x_.resize(m.observations_.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    m.scaled_x_[i] = m.scale(m.observations_[i].x);
    y(i) = m.observations_[i].y - m.y_offset_;
  }

  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double k = matern52_scaled(std::abs(m.scaled_x_[i] - m.scaled_x_[j]), hp.length_scale,
                                       hp.signal_var);
      K(i, j) = k;
      K(j, i) = k;
    }
  }
  K.diagonal().array() += hp.noise_var;

  m.factor_.compute(K);
  double jitter = 1e-9 * hp.signal_var;
  for (int step = 0; m.factor_.info() != Eigen::Success; ++step) {
    if (step == kMaxJitterSteps) {
      throw GpFitError("GP Gram matrix is not positive definite even with jitter " +
                       std::to_string(m.jitter_));
    }
    Eigen::MatrixXd Kj = K;
    Kj.diagonal().array() += jitter;
    m.factor_.compute(Kj);
    m.jitter_ = jitter;
    jitter *= 10.0;
  }

  m.weights_ = m.factor_.solve(y);
  const Eigen::MatrixXd L = m.factor_.matrixL();
  double log_det_half = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) log_det_half += std::log(L(i, i));
  m.log_likelihood_ = -0.5 * y.dot(m.weights_) - log_det_half -
                      0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  return m;
}

Prediction GpModel::posterior(double x) const {
  const double xs = scale(x);
  const auto n = static_cast<Eigen::Index>(scaled_x_.size());
  Eigen::VectorXd kstar(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    kstar(i) = matern52_scaled(std::abs(xs - scaled_x_[i]), hp_.length_scale, hp_.signal_var);
  }
  const double mean = kstar.dot(weights_) + y_offset_;
  const Eigen::VectorXd v = factor_.matrixL().solve(kstar);
  const double var = std::max(0.0, hp_.signal_var - v.squaredNorm());
  return {mean, std::sqrt(var)};
}

double GpModel::best_observed() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& o : observations_) best = std::max(best, o.y);
  return best;
}

namespace {

struct FitContext {
  const std::vector<Observation>* observations;
  const FitOptions* options;
  std::array<double, 3> lo;  // log bounds
  std::array<double, 3> hi;
};

GpHyperparams from_log(const FitContext& ctx, const double* theta) {
  std::array<double, 3> t{};
  for (int d = 0; d < 3; ++d) t[d] = std::clamp(theta[d], ctx.lo[d], ctx.hi[d]);
  return {std::exp(t[0]), std::exp(t[1]), std::exp(t[2])};
}

double log_likelihood_at(const FitContext& ctx, const GpHyperparams& hp) {
  try {
    return GpModel::condition(*ctx.observations, hp, ctx.options->gp).log_marginal_likelihood();
  } catch (const GpFitError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

double negative_ll(const gsl_vector* v, void* params) {
  const auto& ctx = *static_cast<const FitContext*>(params);
  const double ll = log_likelihood_at(ctx, from_log(ctx, v->data));
  return std::isfinite(ll) ? -ll : std::numeric_limits<double>::max();
}

GpHyperparams nelder_mead(const FitContext& ctx, const GpHyperparams& start) {
  gsl_multimin_function fn{&negative_ll, 3, const_cast<FitContext*>(&ctx)};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(3), &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(3), &gsl_vector_free);
  gsl_vector_set(x.get(), 0, std::log(start.length_scale));
  gsl_vector_set(x.get(), 1, std::log(start.signal_var));
  gsl_vector_set(x.get(), 2, std::log(start.noise_var));
  for (int d = 0; d < 3; ++d) {
    gsl_vector_set(step.get(), d, ctx.hi[d] > ctx.lo[d] ? 0.5 : 1e-3);
  }

  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3),
      &gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), step.get());
  for (int iter = 0; iter < kNelderMeadIterations; ++iter) {
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), 1e-7) == GSL_SUCCESS) break;
  }
  return from_log(ctx, s->x->data);
}

}  // namespace

FitResult fit_with_report(std::vector<Observation> observations, const FitOptions& options) {
  static const bool gsl_quiet = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)gsl_quiet;

  if (observations.size() < 2) {
    throw GpFitError("GP fit needs at least 2 observations, got " +
                     std::to_string(observations.size()));
  }
  check_finite(observations);
  const auto [min_it, max_it] = std::minmax_element(
      observations.begin(), observations.end(),
      [](const Observation& a, const Observation& b) { return a.x < b.x; });
  if (min_it->x == max_it->x) {
    throw GpFitError("GP fit: all " + std::to_string(observations.size()) +
                     " inputs are identical (x = " + std::to_string(min_it->x) + ")");
  }
  options.bounds.validate();
  if (options.starts < 1) throw std::invalid_argument("FitOptions.starts must be >= 1");

  const auto& b = options.bounds;
  FitContext ctx{&observations, &options,
                 {std::log(b.length_scale_lo), std::log(b.signal_var_lo), std::log(b.noise_var_lo)},
                 {std::log(b.length_scale_hi), std::log(b.signal_var_hi), std::log(b.noise_var_hi)}};

  // Start 0 is data-driven; the rest are seeded uniform draws in log space.
  double mean = 0.0;
  for (const auto& o : observations) mean += o.y;
  mean /= static_cast<double>(observations.size());
  double var = 0.0;
  for (const auto& o : observations) var += (o.y - mean) * (o.y - mean);
  var = std::max(var / static_cast<double>(observations.size()), 1e-12);

  std::vector<GpHyperparams> starts;
  {
    const double l0 = 0.3;
    const std::array<double, 3> t{std::log(l0), std::log(var), std::log(1e-2 * var)};
    starts.push_back(from_log(ctx, t.data()));
  }
  std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(starts.size()) < options.starts) {
    std::array<double, 3> t{};
    for (int d = 0; d < 3; ++d) t[d] = ctx.lo[d] + unit(rng) * (ctx.hi[d] - ctx.lo[d]);
    starts.push_back(from_log(ctx, t.data()));
  }

  std::vector<double> start_lls;
  double best_ll = -std::numeric_limits<double>::infinity();
  std::optional<GpHyperparams> best;
  for (const auto& start : starts) {
    const double start_ll = log_likelihood_at(ctx, start);
    start_lls.push_back(start_ll);
    const GpHyperparams end = nelder_mead(ctx, start);
    const double end_ll = log_likelihood_at(ctx, end);
    const auto& pick = end_ll >= start_ll ? end : start;
    const double pick_ll = std::max(end_ll, start_ll);
    if (!best || pick_ll > best_ll) {
      best = pick;
      best_ll = pick_ll;
    }
  }
  if (!std::isfinite(best_ll)) throw GpFitError("GP fit: no start produced a finite likelihood");
  return FitResult{GpModel::condition(std::move(observations), *best, options.gp), std::move(starts),
                   std::move(start_lls)};
}

}  // namespace scdiff
