#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <set>
#include <stdexcept>

#include "scdiff/bayesopt.hpp"
#include "scdiff/errors.hpp"
#include "scdiff/oracles.hpp"

using namespace scdiff;

namespace {

// Seeded, call-order independent noise for a given alpha.
double hashed_noise(double alpha, std::uint64_t seed, double sd) {
  std::uint64_t bits;
  std::memcpy(&bits, &alpha, sizeof bits);
  std::mt19937_64 rng(bits ^ (seed * 0x9e3779b97f4a7c15ULL));
  return std::normal_distribution<double>(0.0, sd)(rng);
}

double grid_max_ei(const GpModel& m, double lo, double hi, std::size_t n) {
  double best = 0.0;
  for (double x : oracle::linspace(lo, hi, n)) best = std::max(best, acquisition(m, x));
  return best;
}

}  // namespace

TEST_CASE("latin hypercube stratification") {
  const auto one = lhs_sample(1, 1.5, 8.0, 3);
  REQUIRE(one.size() == 1);
  CHECK(one[0] >= 1.5);
  CHECK(one[0] <= 8.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = lhs_sample(5, 1.5, 8.0, seed);
    std::set<int> strata;
    for (double v : s) {
      REQUIRE(v >= 1.5);
      REQUIRE(v <= 8.0);
      strata.insert(std::min(4, static_cast<int>((v - 1.5) / 1.3)));
    }
    CHECK(strata.size() == 5);
  }
  CHECK(lhs_sample(5, 1.5, 8.0, 7) == lhs_sample(5, 1.5, 8.0, 7));
  CHECK(lhs_sample(5, 1.5, 8.0, 7) != lhs_sample(5, 1.5, 8.0, 8));
}

TEST_CASE("expected improvement closed form") {
  CHECK(expected_improvement(0.2, 0.0, 0.5) == 0.0);
  CHECK(expected_improvement(0.5, 0.0, 0.5) == 0.0);
  CHECK(expected_improvement(0.9, 0.0, 0.5) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(expected_improvement(1.0, 0.3, 1.0) == doctest::Approx(0.3 * 0.3989422804014327).epsilon(1e-14));
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2, 2), s(0.01, 2);
  for (int i = 0; i < 200; ++i) CHECK(expected_improvement(u(rng), s(rng), u(rng)) >= 0.0);
  // Monotone in mu.
  CHECK(expected_improvement(-0.2, 0.5, 0.0) < expected_improvement(0.0, 0.5, 0.0));
  CHECK(expected_improvement(0.0, 0.5, 0.0) < expected_improvement(0.3, 0.5, 0.0));
}

TEST_CASE("expected improvement against Monte Carlo") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1), s(0.05, 1.5);
  for (int i = 0; i < 4; ++i) {
    const double mu = u(rng), sigma = s(rng), fb = u(rng);
    const auto mc = oracle::mc_expected_improvement(mu, sigma, fb, 400000, 1000 + i);
    CHECK(std::fabs(expected_improvement(mu, sigma, fb) - mc.mean) <= 3 * mc.stderr_);
  }
}

TEST_CASE("acquisition maximizer matches a dense grid") {
  SUBCASE("single observation at the center") {
    const auto m = GpModel::condition({{4.75, 0.3}}, {0.2, 0.05, 1e-6}, {1.5, 8.0, true});
    const double a = maximize_acquisition(m, 1.5, 8.0, 10, 1);
    CHECK(acquisition(m, a) >= grid_max_ei(m, 1.5, 8.0, 10001) - 1e-6);
    CHECK(acquisition(m, 3.0) == doctest::Approx(acquisition(m, 6.5)).epsilon(1e-9));
  }
  SUBCASE("flat data") {
    const auto m = GpModel::condition({{2.0, 0.4}, {2.5, 0.4}, {3.0, 0.4}}, {0.1, 0.01, 1e-8}, {1.5, 8.0, true});
    const double a = maximize_acquisition(m, 1.5, 8.0, 10, 2);
    CHECK(acquisition(m, a) >= grid_max_ei(m, 1.5, 8.0, 10001) - 1e-4);
    CHECK(a > 4.0);
  }
  SUBCASE("random models stay in bounds") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> x(1.5, 8.0), y(0.0, 1.0), l(0.05, 2.0);
    for (int n = 0; n < 50; ++n) {
      std::vector<Observation> data;
      for (int k = 0; k < 4; ++k) data.push_back({x(rng), y(rng)});
      const auto m = GpModel::condition(data, {l(rng), 0.1, 1e-4}, {1.5, 8.0, true});
      const double a = maximize_acquisition(m, 1.5, 8.0, 10, n);
      CHECK(a >= 1.5);
      CHECK(a <= 8.0);
      CHECK(acquisition(m, a) >= grid_max_ei(m, 1.5, 8.0, 2001) - 1e-6);
    }
  }
}

TEST_CASE("posterior-mean maximizer") {
  const auto m = GpModel::condition({{2.0, 0.1}, {4.0, 0.9}, {6.0, 0.2}}, {0.3, 1.0, 1e-6}, {1.5, 8.0, false});
  const double a = maximize_posterior_mean(m, 1.5, 8.0, 2001);
  for (double x : oracle::linspace(1.5, 8.0, 5001)) CHECK(m.posterior(a).mean >= m.posterior(x).mean - 1e-12);
}

TEST_CASE("run_bayes_opt on the quadratic") {
  BayesOptConfig cfg;
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    std::size_t calls = 0;
    const auto t = run_bayes_opt([&](double a) { ++calls; return -(a - 4.2) * (a - 4.2); }, cfg);
    CHECK(calls == 15);
    CHECK(t.evaluations == 15);
    CHECK(t.records.size() == 15);
    for (std::size_t i = 0; i < t.records.size(); ++i) {
      const auto& r = t.records[i];
      CHECK(r.initial == (i < 5));
      CHECK(r.alpha >= 1.5);
      CHECK(r.alpha <= 8.0);
      if (!r.initial) CHECK(*r.ei >= 0.0);
    }
    good += std::fabs(t.alpha_star - 4.2) < 0.2;
  }
  CHECK(good >= 18);
}

TEST_CASE("run_bayes_opt on the noisy bump") {
  BayesOptConfig cfg;
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    const auto t = run_bayes_opt(
        [&](double a) { return std::exp(-(a - 4.2) * (a - 4.2) / 2) + hashed_noise(a, seed, 0.01); }, cfg);
    good += std::fabs(t.alpha_star - 4.2) < 0.3;
  }
  CHECK(good >= 17);
}

TEST_CASE("constant objective completes") {
  BayesOptConfig cfg;
  const auto t = run_bayes_opt([](double) { return 0.42; }, cfg);
  CHECK(t.alpha_star >= 1.5);
  CHECK(t.alpha_star <= 8.0);
  CHECK(t.records.size() == 15);
}

TEST_CASE("deterministic under seed; batch path agrees with serial") {
  BayesOptConfig cfg;
  cfg.seed = 99;
  auto f = [](double a) { return std::sin(a) + 0.1 * a; };
  const auto a = run_bayes_opt(f, cfg);
  const auto b = run_bayes_opt(f, cfg);
  int batches = 0;
  const auto c = run_bayes_opt(f, cfg, [&](std::span<const double> xs) {
    ++batches;
    std::vector<double> out;
    for (double x : xs) out.push_back(f(x));
    return out;
  });
  CHECK(batches == 1);
  REQUIRE(a.records.size() == b.records.size());
  REQUIRE(a.records.size() == c.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].alpha == b.records[i].alpha);
    CHECK(a.records[i].alpha == c.records[i].alpha);
  }
  CHECK(a.alpha_star == b.alpha_star);
  CHECK(a.alpha_star == c.alpha_star);
}

TEST_CASE("evaluation failure truncates; too few successes throws") {
  BayesOptConfig cfg;
  int calls = 0;
  const auto t = run_bayes_opt(
      [&](double a) {
        if (++calls == 8) throw EvaluationFailed("boom");
        return -(a - 4.2) * (a - 4.2);
      },
      cfg);
  CHECK(t.truncated);
  CHECK(t.records.size() == 8);
  CHECK(t.records.back().error.find("boom") != std::string::npos);
  CHECK_FALSE(t.records.back().value);
  CHECK(t.evaluations == 8);

  calls = 0;
  CHECK_THROWS_AS(run_bayes_opt([&](double) -> double {
                    if (++calls == 2) throw EvaluationFailed("early");
                    return 0.0;
                  }, cfg),
                  OptimizationError);
}

TEST_CASE("config validation") {
  BayesOptConfig cfg;
  cfg.lo = 3;
  cfg.hi = 2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.n_init = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
