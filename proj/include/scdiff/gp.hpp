#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace scdiff {

struct GpHyperparams {
  double length_scale = 1.0;
  double signal_var = 1.0;
  double noise_var = 0.0;

  void validate() const;
};

struct Observation {
  double x = 0.0;
  double y = 0.0;
};

/// Inputs are mapped affinely so [input_lo, input_hi] becomes [0, 1] before
/// the kernel sees them; length_scale is in those scaled units. With
/// center_outputs the observation mean is subtracted before conditioning
/// and added back to predictions.
struct GpOptions {
  double input_lo = 0.0;
  double input_hi = 1.0;
  bool center_outputs = false;
};

struct Prediction {
  double mean = 0.0;
  double stddev = 0.0;  // latent function, observation noise excluded
};

/// sigma^2 (1 + sqrt5 r/l + 5 r^2 / (3 l^2)) exp(-sqrt5 r/l), r = |x - x2|.
double matern52(double x, double x2, const GpHyperparams& hp);

/// Zero-mean GP conditioned on observations. Immutable once built.
class GpModel {
 public:
  static GpModel condition(std::vector<Observation> observations, const GpHyperparams& hp,
                           const GpOptions& options = {});

  Prediction posterior(double x) const;
  double log_marginal_likelihood() const noexcept { return log_likelihood_; }

  const GpHyperparams& hyperparams() const noexcept { return hp_; }
  const GpOptions& options() const noexcept { return options_; }
  const std::vector<Observation>& observations() const noexcept { return observations_; }
  /// Diagonal jitter that was needed for the Cholesky factor (0 when none).
  double jitter() const noexcept { return jitter_; }
  double best_observed() const;

 private:
  GpModel() = default;
  double scale(double x) const { return (x - options_.input_lo) / (options_.input_hi - options_.input_lo); }

  GpHyperparams hp_;
  GpOptions options_;
  std::vector<Observation> observations_;
  std::vector<double> scaled_x_;
  double y_offset_ = 0.0;
  double jitter_ = 0.0;
  double log_likelihood_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  Eigen::VectorXd weights_;
};

struct HyperparamBounds {
  double length_scale_lo = 0.05, length_scale_hi = 10.0;
  double signal_var_lo = 1e-4, signal_var_hi = 10.0;
  double noise_var_lo = 1e-8, noise_var_hi = 1.0;

  void validate() const;
};

struct FitOptions {
  HyperparamBounds bounds;
  int starts = 8;
  std::uint64_t seed = 0;
  GpOptions gp;
};

struct FitResult {
  GpModel model;
  std::vector<GpHyperparams> start_points;
  std::vector<double> start_log_likelihoods;
};

/// Maximizes the log marginal likelihood over the bounds with multi-start
/// Nelder-Mead in log-hyperparameter space. Throws GpFitError for fewer than
/// two observations or when every input is identical.
FitResult fit_with_report(std::vector<Observation> observations, const FitOptions& options = {});

inline GpModel fit(std::vector<Observation> observations, const FitOptions& options = {}) {
  return fit_with_report(std::move(observations), options).model;
}

}  // namespace scdiff
