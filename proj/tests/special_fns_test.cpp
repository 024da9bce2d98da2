#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "scdiff/oracles.hpp"
#include "scdiff/special_fns.hpp"

using namespace scdiff;

namespace {

// Bisection on the series oracle, independent of the library's J1.
double j1_first_root() {
  double lo = 3.0, hi = 4.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (oracle::bessel_j1_series(lo) * oracle::bessel_j1_series(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("bessel_i0 reference values") {
  CHECK(bessel_i0(0.0) == 1.0);
  CHECK(bessel_i0(1.0) == doctest::Approx(1.2660658777520084).epsilon(1e-15));
  const double ref7 = oracle::bessel_i0_series(7.0);
  CHECK(std::fabs(bessel_i0(7.0) - ref7) / ref7 < 1e-12);
  CHECK(ref7 > 100.0);
  CHECK(ref7 < 1000.0);
}

TEST_CASE("bessel_i0 matches the series oracle up to 50") {
  for (double x = 0.0; x <= 50.0; x += 0.173) {
    const double ref = oracle::bessel_i0_series(x);
    INFO("x = " << x);
    CHECK(std::fabs(bessel_i0(x) - ref) / ref <= 1e-10);
  }
  // Regime switch.
  for (double x : {14.999999, 15.0, 15.000001}) {
    const double ref = oracle::bessel_i0_series(x);
    CHECK(std::fabs(bessel_i0(x) - ref) / ref <= 1e-12);
  }
}

TEST_CASE("bessel_i0 is even and monotone on a grid") {
  double prev = bessel_i0(0.0);
  for (double x = 0.01; x <= 40.0; x += 0.01) {
    const double v = bessel_i0(x);
    REQUIRE(v > prev);
    prev = v;
  }
  CHECK(bessel_i0(-3.3) == bessel_i0(3.3));
}

TEST_CASE("bessel_i0 lies between bracketing partial sums") {
  for (double x : {0.5, 3.0, 7.0, 12.0, 20.0}) {
    std::vector<double> partial;
    oracle::bessel_i0_series(x, &partial);
    REQUIRE(partial.size() >= 2);
    // Terms are positive, so partial sums increase to the limit; the value must
    // exceed every sum that is still measurably short of it.
    const double v = bessel_i0(x);
    const double last = partial.back();
    for (double p : partial) {
      if (p < last * (1.0 - 1e-12)) CHECK(v > p);
    }
    CHECK(std::fabs(v - last) / last < 1e-12);
  }
}

TEST_CASE("bessel_i0 against the integral definition") {
  for (double x = 0.0; x <= 20.0; x += 1.0) {
    const double ref = oracle::bessel_i0_quadrature(x);
    CHECK(std::fabs(bessel_i0(x) - ref) / ref <= 1e-8);
  }
}

TEST_CASE("bessel_j1 values and symmetry") {
  CHECK(bessel_j1(0.0) == 0.0);
  for (double x = -100.0; x <= 100.0; x += 0.37) {
    INFO("x = " << x);
    if (std::fabs(x) <= 30.0) CHECK(std::fabs(bessel_j1(x) - oracle::bessel_j1_series(x)) <= 1e-9);
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int i = 0; i < 20; ++i) {
    const double x = u(rng);
    CHECK(bessel_j1(-x) == -bessel_j1(x));
  }
}

TEST_CASE("bessel_j1 asymptotic branch against Boost") {
  // The series oracle loses digits past ~30; Boost's independent J1 covers the rest.
  for (double x = 12.0; x <= 100.0; x += 0.91) {
    INFO("x = " << x);
    CHECK(std::fabs(bessel_j1(x) - boost::math::cyl_bessel_j(1, x)) <= 1e-9);
  }
}

TEST_CASE("bessel_j1 first positive root") {
  const double x0 = j1_first_root();
  CHECK(x0 == doctest::Approx(3.8317).epsilon(1e-4));
  CHECK(std::fabs(bessel_j1(x0)) < 1e-12);
}

TEST_CASE("normal pdf and cdf") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std_normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-16));
  using boost::math::quadrature::gauss_kronrod;
  const double inv = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto density = [&](double t) { return inv * std::exp(-0.5 * t * t); };
  for (double x : {-3.0, -1.0, 0.3, 1.0, 2.5}) {
    const double ref = gauss_kronrod<double, 61>::integrate(density, -40.0, x, 15, 1e-14);
    CHECK(std::fabs(std_normal_cdf(x) - ref) < 1e-9);
  }
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double x = g(rng);
    CHECK(std::fabs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) < 1e-12);
    CHECK(std_normal_pdf(x) == doctest::Approx(inv * std::exp(-0.5 * x * x)).epsilon(1e-14));
  }
  double prev = 0.0;
  for (double x = -8.0; x <= 8.0; x += 0.05) {
    const double c = std_normal_cdf(x);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("non-finite inputs are domain errors") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(bessel_i0(nan), std::domain_error);
  CHECK_THROWS_AS(bessel_i0(inf), std::domain_error);
  CHECK_THROWS_AS(bessel_j1(nan), std::domain_error);
  CHECK_THROWS_AS(std_normal_pdf(inf), std::domain_error);
  CHECK_THROWS_AS(std_normal_cdf(nan), std::domain_error);
}
