#pragma once

// Brute-force reference implementations for testing. None of these call
// into the numerics they are used to check.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scdiff/grid.hpp"

namespace scdiff::oracle {

std::vector<double> linspace(double lo, double hi, std::size_t n);

struct GridOptimum {
  bool found = false;  // false when no grid point satisfies the constraint
  double alpha = 0.0;
  double beta = 0.0;
  double score = 0.0;
  std::size_t evaluated = 0;
};

/// Exhaustive feasible maximizer (constraint <= 0). Ties go to the lowest
/// alpha, then the lowest beta. Throws std::invalid_argument on empty grids.
GridOptimum grid_search(const std::function<double(double, double)>& objective,
                        const std::function<double(double, double)>& constraint,
                        const std::vector<double>& alpha_grid,
                        const std::vector<double>& beta_grid);

/// Direct circular convolution with a kernel whose origin sits at
/// (rows/2, cols/2). O(N^4).
Grid brute_convolve(const Grid& x, const Grid& centered_kernel);

struct MonteCarloEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Seeded sample mean of max(G - f_best, 0), G ~ N(mu, sigma^2).
MonteCarloEstimate mc_expected_improvement(double mu, double sigma, double f_best,
                                           std::size_t n_samples, std::uint64_t seed);

/// I0 by its power series in 50-digit arithmetic. `partial_sums`, when
/// given, receives the running sums.
double bessel_i0_series(double x, std::vector<double>* partial_sums = nullptr);

/// (1/pi) * integral_0^pi exp(-x cos t) dt by the trapezoid rule.
double bessel_i0_quadrature(double x, std::size_t intervals = 4096);

/// J1 by its power series in 50-digit arithmetic.
double bessel_j1_series(double x);

/// Spatial kernel of the disc of frequency bins du^2 + dv^2 <= cutoff^2 (bin
/// offsets from zero frequency), as a
/// literal inverse-DFT double sum. Returned centered.
Grid direct_disc_kernel(std::size_t rows, std::size_t cols, double cutoff);

struct DensePosterior {
  double mean = 0.0;
  double variance = 0.0;  // latent
};

/// Matern-5/2 GP posterior with an explicitly inverted Gram matrix. Inputs
/// are scaled by (x - lo) / (hi - lo) before the kernel is applied.
DensePosterior dense_gp_posterior(const std::vector<double>& xs, const std::vector<double>& ys,
                                  double length_scale, double signal_var, double noise_var,
                                  double lo, double hi, double x_star);

struct OracleReport {
  std::string name;
  std::string inputs_digest;
  nlohmann::json values;
  double tolerance = 0.0;
  double observed = 0.0;
  bool passed = false;
};

nlohmann::json to_json(const OracleReport& report);

/// Runs every oracle against the library and collects the reports.
std::vector<OracleReport> run_verification(std::uint64_t seed);

/// {"schema": "scdiff-oracles/1", "seed", "passed", "reports": [...]}
nlohmann::json verification_document(const std::vector<OracleReport>& reports, std::uint64_t seed);

}  // namespace scdiff::oracle
