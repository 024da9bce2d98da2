#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "scdiff/oracles.hpp"
#include "scdiff/special_fns.hpp"
#include "scdiff/spectral.hpp"

using namespace scdiff;

namespace {

double max_abs(const Grid& g) {
  double m = 0.0;
  for (double v : g.values()) m = std::max(m, std::fabs(v));
  return m;
}

Grid slice_grid(const FeatureMap& x, std::size_t b = 0, std::size_t c = 0) {
  const auto s = x.slice(b, c);
  return Grid(x.height(), x.width(), std::vector<double>(s.begin(), s.end()));
}

Window kb_window(std::size_t n, double r) {
  WindowSpec s;
  s.height = s.width = n;
  s.radius = r;
  s.beta = 7.0;
  return build_window(s);
}

}  // namespace

TEST_CASE("mask is a centered binary disc") {
  const auto m = make_freq_mask(16, 12, 3.0);
  std::size_t ones = 0;
  for (int u = 0; u < 16; ++u)
    for (int v = 0; v < 12; ++v) {
      const int du = u - 8, dv = v - 6;
      const double expect = du * du + dv * dv <= 9 ? 1.0 : 0.0;
      CHECK(m.values(u, v) == expect);
      ones += expect == 1.0;
    }
  CHECK(m.ones() == ones);
  CHECK(is_negation_symmetric(m.values));
  CHECK_THROWS_AS(make_freq_mask(4, 4, 0.0), std::invalid_argument);
}

TEST_CASE("odd grids are symmetric too") {
  CHECK(is_negation_symmetric(make_freq_mask(15, 9, 2.5).values));
}

TEST_CASE("asymmetric or non-binary masks are rejected") {
  auto m = make_freq_mask(8, 8, 2.0);
  m.values(4, 7) = 1.0;  // (0, +3) set but (0, -3) is not
  CHECK_FALSE(is_negation_symmetric(m.values));
  CHECK_THROWS_AS(mask_to_kernel(m), std::invalid_argument);
  auto h = make_freq_mask(8, 8, 2.0);
  h.values(4, 4) = 0.5;
  CHECK_THROWS_AS(mask_to_kernel(h), std::invalid_argument);
}

TEST_CASE("all-ones mask gives a centered delta") {
  const auto k = mask_to_kernel(make_freq_mask(16, 16, 100.0));
  CHECK(k.peak_row == 8);
  CHECK(k.peak_col == 8);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j) {
      CHECK(std::fabs(k.values(i, j) - (i == 8 && j == 8 ? 1.0 : 0.0)) < 1e-9);
    }
}

TEST_CASE("kernel matches the direct inverse DFT sum") {
  for (auto [h, w, c] : {std::tuple{64, 64, 8.0}, {20, 14, 3.5}, {15, 15, 4.0}}) {
    const auto k = mask_to_kernel(make_freq_mask(h, w, c));
    const Grid ref = oracle::direct_disc_kernel(h, w, c);
    double err = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::fabs(k.values.values()[i] - ref.values()[i]));
    CHECK(err <= 1e-12 * max_abs(ref));
    CHECK(k.imag_residue < 1e-9 * k.peak);
  }
}

TEST_CASE("kernel has long-range support and oscillating lobes") {
  const auto k = mask_to_kernel(make_freq_mask(64, 64, 8.0));
  const Grid ref = oracle::direct_disc_kernel(64, 64, 8.0);
  const double peak = ref(32, 32);
  CHECK(k.peak == doctest::Approx(peak).epsilon(1e-12));
  // Max magnitude over pixels at rounded distance 24 from the center.
  double at24 = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j)
      if (std::lround(std::hypot(i - 32, j - 32)) == 24) at24 = std::max(at24, std::fabs(k.values(i, j)));
  CHECK(at24 > 1e-6 * peak);

  const auto prof = radial_profile(k.values);
  CHECK(prof.size() == 33);
  int changes = 0;
  for (std::size_t r = 1; r + 1 < prof.size(); ++r) changes += (prof[r] > 0) != (prof[r + 1] > 0);
  CHECK(changes >= 2);
}

TEST_CASE("Parseval: kernel energy equals mask ones over HW") {
  for (double c : {2.0, 5.0, 8.0}) {
    const auto mask = make_freq_mask(32, 24, c);
    const auto k = mask_to_kernel(mask);
    double e = 0.0;
    for (double v : k.values.values()) e += v * v;
    const double expect = static_cast<double>(mask.ones()) / (32.0 * 24.0);
    CHECK(std::fabs(e - expect) <= 1e-9 * expect);
  }
}

TEST_CASE("radial profile sign pattern follows jinc over three lobes") {
  const double cutoff = 8.0;
  const auto k = mask_to_kernel(make_freq_mask(64, 64, cutoff));
  const auto prof = radial_profile(k.values);
  const double fc = cutoff / 64.0;
  // Compare signs at radii well inside each of the first three lobes.
  std::vector<double> roots{0.0};
  for (double x0 : {3.8317059702075123, 7.0155866698156187, 10.173468135062722}) roots.push_back(x0 / (2 * std::numbers::pi * fc));
  for (std::size_t lobe = 0; lobe + 1 < roots.size(); ++lobe) {
    const double mid = 0.5 * (roots[lobe] + roots[lobe + 1]);
    const auto r = static_cast<std::size_t>(std::lround(mid));
    CHECK((prof[r] > 0) == (jinc(fc, static_cast<double>(r)) > 0));
  }
}

TEST_CASE("jinc limit, zeros and alternation") {
  const double fc = 0.125;
  CHECK(jinc(fc, 0.0) == doctest::Approx(std::numbers::pi * fc).epsilon(1e-15));
  CHECK(jinc(fc, 1e-9) == doctest::Approx(std::numbers::pi * fc).epsilon(1e-9));
  // Roots of J1 located by bisection on the series oracle.
  std::vector<double> roots;
  double prev = oracle::bessel_j1_series(0.5);
  for (double x = 0.6; x < 20.0; x += 0.1) {
    const double v = oracle::bessel_j1_series(x);
    if ((v > 0) != (prev > 0)) {
      double lo = x - 0.1, hi = x;
      for (int i = 0; i < 100; ++i) {
        const double m = 0.5 * (lo + hi);
        ((oracle::bessel_j1_series(lo) > 0) != (oracle::bessel_j1_series(m) > 0) ? hi : lo) = m;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev = v;
  }
  REQUIRE(roots.size() >= 5);
  CHECK(std::fabs(jinc(fc, roots[0] / (2 * std::numbers::pi * fc))) < 1e-12);
  for (std::size_t k = 0; k + 1 < roots.size(); ++k) {
    const double r = 0.5 * (roots[k] + roots[k + 1]) / (2 * std::numbers::pi * fc);
    CHECK((jinc(fc, r) > 0) == (k % 2 == 1));
  }
  CHECK_THROWS(jinc(0.0, 1.0));
}

TEST_CASE("freq_amplify identity, constant and impulse responses") {
  const auto x = random_feature_map(2, 3, 16, 16, 3);
  const auto same = freq_amplify(x, 4.0, 1.0);
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::fabs(same.values()[k] - x.values()[k]) < 1e-9);

  const auto flat = freq_amplify(FeatureMap(1, 1, 8, 8, 0.75), 0.5, 3.0);
  for (double v : flat.values()) CHECK(v == doctest::Approx(2.25).epsilon(1e-12));

  FeatureMap imp(1, 1, 64, 64, 0.0);
  imp.at(0, 0, 32, 32) = 1.0;
  const auto out = freq_amplify(imp, 8.0, 3.0);
  const auto k = mask_to_kernel(make_freq_mask(64, 64, 8.0));
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j) {
      const double expect = imp.at(0, 0, i, j) + 2.0 * k.values(i, j);
      CHECK(std::fabs(out.at(0, 0, i, j) - expect) < 1e-12);
    }
}

TEST_CASE("freq_amplify follows the convolution theorem") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 3; ++n) {
    const auto x = random_feature_map(1, 1, 16, 16, 100 + n);
    const double alpha = 2.5;
    const auto got = freq_amplify(x, 4.0, alpha);
    const Grid conv = oracle::brute_convolve(slice_grid(x), oracle::direct_disc_kernel(16, 16, 4.0));
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double ref = x.values()[k] + (alpha - 1) * conv.values()[k];
      err = std::max(err, std::fabs(got.values()[k] - ref));
      scale = std::max(scale, std::fabs(ref));
    }
    CHECK(err <= 1e-9 * scale);
  }
}

TEST_CASE("convolve_centered agrees with brute force") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto [h, w] : {std::pair{16, 16}, {9, 12}}) {
    Grid x(h, w), k(h, w);
    for (auto& v : x.values()) v = u(rng);
    for (auto& v : k.values()) v = u(rng);
    const Grid a = convolve_centered(x, k), b = oracle::brute_convolve(x, k);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::fabs(a.values()[i] - b.values()[i]) < 1e-12);
  }
  CHECK_THROWS_AS(convolve_centered(Grid(4, 4), Grid(4, 5)), std::invalid_argument);
}

TEST_CASE("dft2d round trip") {
  std::vector<std::complex<double>> d(6 * 5);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = {std::sin(i * 0.7), std::cos(i * 1.3)};
  const auto orig = d;
  dft2d(d, 6, 5, -1);
  // Zero-frequency bin is the plain sum.
  std::complex<double> sum = 0;
  for (const auto& v : orig) sum += v;
  CHECK(std::abs(d[0] - sum) < 1e-12);
  dft2d(d, 6, 5, +1);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(d[i] / 30.0 - orig[i]) < 1e-12);
}

TEST_CASE("leakage") {
  const auto x = random_feature_map(1, 1, 64, 64, 21);
  CHECK(leakage(x, x, 8.0, {32, 32}) == 0.0);
  const auto w = kb_window(64, 8.0);
  CHECK(leakage(x, modulate(x, w, 5.0), 8.0, {32, 32}) == 0.0);
  CHECK(leakage(x, freq_amplify(x, 8.0, 5.0), 8.0, {32, 32}) > 0.0);
  FeatureMap y = x;
  y.at(0, 0, 0, 0) += 0.25;
  CHECK(leakage(x, y, 8.0, {32, 32}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(leakage(x, FeatureMap(1, 1, 64, 63), 8.0, {32, 32}), std::invalid_argument);
}

TEST_CASE("locality dichotomy over seeds") {
  const auto w = kb_window(64, 8.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = random_feature_map(1, 1, 64, 64, seed);
    double xmax = 0;
    for (double v : x.values()) xmax = std::max(xmax, std::fabs(v));
    for (double alpha : {2.0, 5.0}) {
      CHECK(leakage(x, modulate(x, w, alpha), 8.0, {32, 32}) == 0.0);
      CHECK(leakage(x, freq_amplify(x, 8.0, alpha), 8.0, {32, 32}) > 1e-3 * xmax);
    }
  }
}
