#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "scdiff/errors.hpp"
#include "scdiff/spsa.hpp"

using namespace scdiff;

namespace {

struct Counted {
  Counted(std::function<double(double)> f_, std::function<double(double)> g_) : f(std::move(f_)), g(std::move(g_)) {}

  std::function<double(double)> f;
  std::function<double(double)> g;
  std::size_t f_calls = 0;
  std::size_t g_calls = 0;
  std::vector<double> points;

  SpsaProblem problem() {
    SpsaProblem p;
    p.objective = [this](double b) {
      ++f_calls;
      points.push_back(b);
      return f(b);
    };
    p.constraint = [this](double b) {
      ++g_calls;
      points.push_back(b);
      return g(b);
    };
    return p;
  }
};

}  // namespace

TEST_CASE("bernoulli stream") {
  BernoulliStream s(5);
  long sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const int d = s.next();
    REQUIRE((d == 1 || d == -1));
    sum += d;
  }
  CHECK(std::fabs(sum / 10000.0) <= 0.03);
  BernoulliStream a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("pseudo-gradient") {
  auto quad = [](double b) { return -(b - 7) * (b - 7); };
  CHECK(pseudo_gradient(quad, 8.0, 0.1, 1) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(pseudo_gradient(quad, 8.0, 0.1, -1) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(pseudo_gradient([](double) { return 3.0; }, 8.0, 0.1, 1) == 0.0);
  CHECK(std::fabs(pseudo_gradient([](double b) { return std::sin(b); }, 1.0, 0.01, -1) - std::cos(1.0)) < 1e-3);
  int calls = 0;
  pseudo_gradient([&](double) { return ++calls; }, 0.0, 0.1, 1);
  CHECK(calls == 2);
  CHECK_THROWS_AS(pseudo_gradient(quad, 8.0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(pseudo_gradient(quad, 8.0, 0.1, 0), std::invalid_argument);
}

TEST_CASE("clipped pseudo-gradient uses the clipped spacing") {
  auto lin = [](double b) { return 3.0 * b; };
  const auto s = pseudo_gradient_clipped(lin, 11.95, 0.1, 1, 6.0, 12.0);
  CHECK(s.plus_point == 12.0);
  CHECK(s.minus_point == doctest::Approx(11.85));
  CHECK(s.gradient == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("gains decrease strictly") {
  SpsaConfig c;
  for (int t = 1; t < 100; ++t) {
    CHECK(c.step_gain(t + 1) < c.step_gain(t));
    CHECK(c.perturbation_gain(t + 1) < c.perturbation_gain(t));
  }
  CHECK(c.step_gain(1) == 0.5);
  CHECK(c.perturbation_gain(1) == 0.1);
  CHECK(c.step_gain(10) == doctest::Approx(0.5 / std::pow(10.0, 0.602)));
}

TEST_CASE("first step moves toward the optimum") {
  Counted c{[](double b) { return -(b - 9) * (b - 9); }, [](double) { return -1.0; }};
  SpsaConfig cfg;
  auto p = c.problem();
  SpsaState st{8.0, p.probe_at(8.0), BernoulliStream(1)};
  const auto rec = spsa_step(st, p, cfg, 1);
  CHECK(rec.beta_after > 8.0);
  CHECK(rec.backtracks() == 0);
}

TEST_CASE("projection clamps to beta_max") {
  Counted c{[](double b) { return 100.0 * b; }, [](double) { return -1.0; }};
  SpsaConfig cfg;
  auto p = c.problem();
  SpsaState st{11.5, p.probe_at(11.5), BernoulliStream(1)};
  CHECK(spsa_step(st, p, cfg, 1).beta_after == 12.0);
}

TEST_CASE("backtracking against an upper constraint") {
  // f increasing, feasible only below 8.5, start at 8.4 with a_1 = 0.5: the
  // raw step lands at 8.9, then 8.65, 8.525, and 8.4625 is the first feasible.
  Counted c{[](double b) { return b; }, [](double b) { return b - 8.5; }};
  SpsaConfig cfg;
  auto p = c.problem();
  SpsaState st{8.4, p.probe_at(8.4), BernoulliStream(3)};
  const auto rec = spsa_step(st, p, cfg, 1);
  REQUIRE(rec.attempts.size() == 4);
  CHECK(rec.attempts[0].candidate == doctest::Approx(8.9).epsilon(1e-12));
  CHECK(rec.attempts[1].candidate == doctest::Approx(8.65).epsilon(1e-12));
  CHECK(rec.attempts[2].candidate == doctest::Approx(8.525).epsilon(1e-12));
  CHECK(rec.attempts[3].candidate == doctest::Approx(8.4625).epsilon(1e-12));
  CHECK(rec.attempts[3].accepted);
  CHECK(rec.backtracks() == 3);
  CHECK(rec.beta_after <= 8.5);
  CHECK(rec.gradient_evaluations == 8);
  CHECK(rec.probe_evaluations == 4);
  CHECK_FALSE(rec.stalled);
}

TEST_CASE("exhausted backtracking stalls in place") {
  Counted c{[](double b) { return b; }, [](double b) { return b - 8.0; }};
  SpsaConfig cfg;
  cfg.max_backtracks = 3;
  auto p = c.problem();
  SpsaState st{8.0, p.probe_at(8.0), BernoulliStream(3)};
  const auto rec = spsa_step(st, p, cfg, 1);
  CHECK(rec.stalled);
  CHECK(rec.beta_after == 8.0);
  CHECK(rec.attempts.size() == 4);
}

TEST_CASE("unconstrained quadratic at default constants") {
  Counted c{[](double b) { return -(b - 7) * (b - 7); }, [](double) { return -1.0; }};
  SpsaConfig cfg;
  cfg.seed = 4;
  const auto t = run_spsa(c.problem(), cfg);
  REQUIRE(t.runs.size() == 5);
  int good = 0;
  for (const auto& r : t.runs) good += std::fabs(r.best_beta - 7.0) < 0.1;
  CHECK(good >= 4);
  CHECK(t.feasible);
  CHECK(std::fabs(t.beta_star - 7.0) < 0.1);
}

TEST_CASE("active constraint lands at the boundary") {
  Counted c{[](double b) { return b; }, [](double b) { return b - 9.0; }};
  SpsaConfig cfg;
  cfg.seed = 8;
  const auto t = run_spsa(c.problem(), cfg);
  CHECK(t.feasible);
  CHECK(t.beta_star >= 8.8);
  CHECK(t.beta_star <= 9.0);
}

TEST_CASE("iterates and evaluations stay within bounds; accounting is exact") {
  Counted c{[](double b) { return std::sin(3 * b) + 0.2 * b; }, [](double b) { return std::cos(b) - 0.9; }};
  SpsaConfig cfg;
  cfg.seed = 21;
  const auto t = run_spsa(c.problem(), cfg);
  for (double b : c.points) {
    CHECK(b >= cfg.beta_min);
    CHECK(b <= cfg.beta_max);
  }
  std::size_t grad = 0, probes = 0;
  for (const auto& r : t.runs) {
    std::size_t rg = 0, rp = 1;
    for (const auto& s : r.steps) {
      CHECK(s.beta_after >= cfg.beta_min);
      CHECK(s.beta_after <= cfg.beta_max);
      CHECK(s.gradient_evaluations == 2 * (1 + static_cast<std::size_t>(s.backtracks())));
      CHECK(s.probe_evaluations == s.attempts.size());
      rg += s.gradient_evaluations;
      rp += s.probe_evaluations;
    }
    CHECK(r.gradient_evaluations == rg);
    CHECK(r.probe_evaluations == rp);
    CHECK(r.steps.size() == 50);
    grad += rg;
    probes += rp;
  }
  // Without a probe hook each probe costs one objective and one constraint call.
  CHECK(c.f_calls == grad + probes);
  CHECK(c.g_calls == probes);
  CHECK(t.evaluations() == grad + probes);
}

TEST_CASE("selected beta is feasible whenever any iterate was") {
  // Start infeasible at 8; the ascent toward 11 crosses into the feasible region.
  Counted c{[](double b) { return -(b - 11) * (b - 11); }, [](double b) { return 10.0 - b; }};
  SpsaConfig cfg;
  cfg.seed = 2;
  const auto t = run_spsa(c.problem(), cfg);
  bool any = false;
  for (const auto& r : t.runs)
    for (const auto& s : r.steps) any = any || s.at_beta.feasible();
  CHECK(any);
  CHECK(t.feasible);
  CHECK(c.g(t.beta_star) <= 0.0);
}

TEST_CASE("no feasible point reports the minimum violation") {
  Counted c{[](double b) { return b; }, [](double b) { return 20.0 - b; }};
  SpsaConfig cfg;
  const auto t = run_spsa(c.problem(), cfg);
  CHECK_FALSE(t.feasible);
  for (const auto& r : t.runs) CHECK_FALSE(r.has_feasible);
  // Lowest violation is at the upper bound.
  CHECK(t.beta_star == doctest::Approx(12.0));
}

TEST_CASE("single step, single run") {
  Counted c{[](double b) { return -(b - 9) * (b - 9); }, [](double) { return -1.0; }};
  SpsaConfig cfg;
  cfg.iterations = 1;
  cfg.n_runs = 1;
  const auto t = run_spsa(c.problem(), cfg);
  REQUIRE(t.runs.size() == 1);
  CHECK(t.runs[0].steps.size() == 1);
  CHECK(t.runs[0].gradient_evaluations >= 2);
}

TEST_CASE("determinism and failure handling") {
  Counted c{[](double b) { return -(b - 7.5) * (b - 7.5); }, [](double) { return -1.0; }};
  SpsaConfig cfg;
  cfg.seed = 17;
  const auto a = run_spsa(c.problem(), cfg);
  const auto b = run_spsa(c.problem(), cfg);
  CHECK(a.beta_star == b.beta_star);
  for (std::size_t r = 0; r < a.runs.size(); ++r)
    for (std::size_t s = 0; s < a.runs[r].steps.size(); ++s)
      CHECK(a.runs[r].steps[s].beta_after == b.runs[r].steps[s].beta_after);

  SpsaProblem broken;
  broken.objective = [](double) -> double { throw EvaluationFailed("nope"); };
  broken.constraint = [](double) { return -1.0; };
  CHECK_THROWS_AS(run_spsa(broken, cfg), OptimizationError);

  SpsaConfig bad;
  bad.beta0 = 13;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
