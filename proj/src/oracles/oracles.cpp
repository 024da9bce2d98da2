#include "scdiff/oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace scdiff::oracle {

using big = boost::multiprecision::cpp_bin_float_50;

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

GridOptimum grid_search(const std::function<double(double, double)>& objective,
                        const std::function<double(double, double)>& constraint,
                        const std::vector<double>& alpha_grid,
                        const std::vector<double>& beta_grid) {
  if (alpha_grid.empty() || beta_grid.empty()) {
    throw std::invalid_argument("grid_search: empty grid");
  }
  GridOptimum best;
  for (double a : alpha_grid) {
    for (double b : beta_grid) {
      ++best.evaluated;
      if (constraint(a, b) > 0.0) continue;
      const double s = objective(a, b);
      const bool better = !best.found || s > best.score ||
                          (s == best.score && (a < best.alpha || (a == best.alpha && b < best.beta)));
      if (better) {
        best.found = true;
        best.alpha = a;
        best.beta = b;
        best.score = s;
      }
    }
  }
  return best;
}

Grid brute_convolve(const Grid& x, const Grid& k) {
  if (x.rows() != k.rows() || x.cols() != k.cols()) {
    throw std::invalid_argument("brute_convolve: dimension mismatch");
  }
  const std::size_t h = x.rows(), w = x.cols();
  Grid out(h, w);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      long double acc = 0.0L;
      for (std::size_t m = 0; m < h; ++m) {
        const std::size_t di = ((i + h - m) % h + h / 2) % h;
        for (std::size_t n = 0; n < w; ++n) {
          const std::size_t dj = ((j + w - n) % w + w / 2) % w;
          acc += static_cast<long double>(x(m, n)) * k(di, dj);
        }
      }
      out(i, j) = static_cast<double>(acc);
    }
  }
  return out;
}

MonteCarloEstimate mc_expected_improvement(double mu, double sigma, double f_best,
                                           std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) throw std::invalid_argument("mc_expected_improvement: n_samples must be >= 1");
  if (sigma == 0.0) return {std::max(mu - f_best, 0.0), 0.0};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(mu, sigma);
  long double sum = 0.0L, sum_sq = 0.0L;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double v = std::max(g(rng) - f_best, 0.0);
    sum += v;
    sum_sq += static_cast<long double>(v) * v;
  }
  const long double n = static_cast<long double>(n_samples);
  const long double mean = sum / n;
  const long double var = n_samples > 1 ? (sum_sq - n * mean * mean) / (n - 1) : 0.0L;
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(std::max(var, 0.0L) / n))};
}

double bessel_i0_series(double x, std::vector<double>* partial_sums) {
  const big q = big(x) * big(x) / 4;
  big term = 1, sum = 1;
  if (partial_sums) partial_sums->assign(1, 1.0);
  for (int k = 1; k < 400; ++k) {
    term *= q / (big(k) * k);
    sum += term;
    if (partial_sums) partial_sums->push_back(static_cast<double>(sum));
    if (term < sum * big("1e-40")) break;
  }
  return static_cast<double>(sum);
}

double bessel_i0_quadrature(double x, std::size_t intervals) {
  const long double h = std::numbers::pi_v<long double> / static_cast<long double>(intervals);
  long double acc = 0.5L * (std::exp(-static_cast<long double>(x)) + std::exp(static_cast<long double>(x)));
  for (std::size_t i = 1; i < intervals; ++i) {
    acc += std::exp(-static_cast<long double>(x) * std::cos(h * static_cast<long double>(i)));
  }
  return static_cast<double>(acc * h / std::numbers::pi_v<long double>);
}

double bessel_j1_series(double x) {
  const big half = big(x) / 2;
  const big q = -half * half;
  big term = half, sum = half;
  for (int k = 1; k < 400; ++k) {
    term *= q / (big(k) * (k + 1));
    sum += term;
    if (abs(term) < big("1e-45") * (1 + abs(sum))) break;
  }
  return static_cast<double>(sum);
}

Grid direct_disc_kernel(std::size_t rows, std::size_t cols, double cutoff) {
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double cut2 = static_cast<long double>(cutoff) * cutoff;
  // Frequencies inside the disc, as signed integer offsets from zero.
  std::vector<std::pair<long, long>> inside;
  for (std::size_t u = 0; u < rows; ++u) {
    for (std::size_t v = 0; v < cols; ++v) {
      const long du = static_cast<long>(u) - static_cast<long>(rows / 2);
      const long dv = static_cast<long>(v) - static_cast<long>(cols / 2);
      if (static_cast<long double>(du * du + dv * dv) <= cut2) inside.emplace_back(du, dv);
    }
  }
  Grid out(rows, cols);
  const long double norm = static_cast<long double>(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const long di = static_cast<long>(i) - static_cast<long>(rows / 2);
    for (std::size_t j = 0; j < cols; ++j) {
      const long dj = static_cast<long>(j) - static_cast<long>(cols / 2);
      long double acc = 0.0L;
      for (const auto& [du, dv] : inside) {
        acc += std::cos(two_pi * (static_cast<long double>(du * di) / rows +
                                  static_cast<long double>(dv * dj) / cols));
      }
      out(i, j) = static_cast<double>(acc / norm);
    }
  }
  return out;
}

namespace {

double matern(double r, double l, double s2) {
  const double z = std::sqrt(5.0) * std::fabs(r) / l;
  return s2 * (1.0 + z + z * z / 3.0) * std::exp(-z);
}

}  // namespace

DensePosterior dense_gp_posterior(const std::vector<double>& xs, const std::vector<double>& ys,
                                  double length_scale, double signal_var, double noise_var,
                                  double lo, double hi, double x_star) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  if (n == 0 || ys.size() != xs.size()) throw std::invalid_argument("dense_gp_posterior: bad data");
  auto s = [&](double v) { return (v - lo) / (hi - lo); };
  Eigen::MatrixXd k(n, n);
  Eigen::VectorXd ks(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = ys[i];
    ks(i) = matern(s(xs[i]) - s(x_star), length_scale, signal_var);
    for (Eigen::Index j = 0; j < n; ++j) {
      k(i, j) = matern(s(xs[i]) - s(xs[j]), length_scale, signal_var) + (i == j ? noise_var : 0.0);
    }
  }
  const Eigen::MatrixXd inv = k.fullPivLu().inverse();
  return {ks.dot(inv * y), signal_var - ks.dot(inv * ks)};
}

}  // namespace scdiff::oracle
