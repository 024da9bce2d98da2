#include "scdiff/special_fns.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace scdiff {
namespace {

constexpr double kI0SeriesLimit = 15.0;
constexpr double kJ1SeriesLimit = 12.0;

void require_finite(double x, const char* fn) {
  if (!std::isfinite(x)) {
    throw std::domain_error(std::string(fn) + ": non-finite argument");
  }
}

// sum_k (x/2)^{2k} / (k!)^2, all terms positive so no cancellation.
double i0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  double comp = 0.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * k);
    // Kahan summation keeps the long tail at x ~ 15 from drifting.
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// e^x / sqrt(2 pi x) * sum_k prod_{j<=k} (2j-1)^2 / (k! (8x)^k),
// truncated at the smallest term.
double i0_asymptotic(double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * odd * odd / (k * 8.0 * x);
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return std::exp(x) / std::sqrt(2.0 * std::numbers::pi * x) * sum;
}

// sum_k (-1)^k (x/2)^{2k+1} / (k! (k+1)!)
double j1_series(double x) {
  const double half = 0.5 * x;
  const double q = -half * half;
  double term = half;
  double sum = half;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

// Hankel expansion: J1(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi),
// chi = x - 3pi/4, mu = 4.
double j1_asymptotic(double x) {
  constexpr double mu = 4.0;
  const double z = 8.0 * x;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double prev_mag = 1.0;
  for (int k = 1; k < 80; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * z);
    const double mag = std::abs(term);
    if (mag > prev_mag) break;
    prev_mag = mag;
    // Odd k feeds Q with signs +,-,+..., even k feeds P with signs -,+,...
    if (k % 2 == 1) {
      q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    } else {
      p += ((k / 2) % 2 == 1 ? -1.0 : 1.0) * term;
    }
    if (mag < 1e-17) break;
  }
  const double chi = x - 0.75 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_i0(double x) {
  require_finite(x, "bessel_i0");
  x = std::abs(x);
  return x <= kI0SeriesLimit ? i0_series(x) : i0_asymptotic(x);
}

double bessel_j1(double x) {
  require_finite(x, "bessel_j1");
  const double ax = std::abs(x);
  const double v = ax <= kJ1SeriesLimit ? j1_series(ax) : j1_asymptotic(ax);
  return x < 0.0 ? -v : v;
}

double std_normal_pdf(double x) {
  require_finite(x, "std_normal_pdf");
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double x) {
  require_finite(x, "std_normal_cdf");
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

}  // namespace scdiff
