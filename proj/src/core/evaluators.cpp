#include "scdiff/evaluators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <random>

namespace scdiff {

double peak_s_text(double alpha, double beta) {
  const double da = alpha - 4.2;
  const double db = beta - 8.5;
  return 0.20 + 0.12 * std::exp(-da * da / 2.0) * std::exp(-db * db / 4.0);
}

double peak_s_img(double alpha) { return std::clamp(1.0 - 0.05 * (alpha - 1.0), 0.0, 1.0); }

std::string_view to_string(Fixture f) {
  switch (f) {
    case Fixture::peak: return "peak";
    case Fixture::identity: return "identity";
    case Fixture::infeasible: return "infeasible";
    case Fixture::noisy_peak: return "noisy-peak";
  }
  return "unknown";
}

std::optional<Fixture> parse_fixture(std::string_view name) {
  if (name == "peak") return Fixture::peak;
  if (name == "identity") return Fixture::identity;
  if (name == "infeasible") return Fixture::infeasible;
  if (name == "noisy-peak") return Fixture::noisy_peak;
  return std::nullopt;
}

std::string SyntheticEvaluator::name() const { return "synthetic:" + std::string(to_string(fixture_)); }

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

EvalResult SyntheticEvaluator::evaluate(const EvalRequest& req) {
  EvalResult r;
  r.evaluator_id = name();
  r.s_text = peak_s_text(req.alpha, req.beta);
  switch (fixture_) {
    case Fixture::peak:
      r.s_img = peak_s_img(req.alpha);
      break;
    case Fixture::identity:
      r.s_img = 1.0;
      break;
    case Fixture::infeasible:
      r.s_img = std::clamp(1.0 - 0.6 * (req.alpha - 1.0), 0.0, 1.0);
      break;
    case Fixture::noisy_peak: {
      r.s_img = peak_s_img(req.alpha);
      const std::uint64_t key = splitmix(splitmix(std::bit_cast<std::uint64_t>(req.alpha)) ^
                                         std::bit_cast<std::uint64_t>(req.beta)) ^
                                splitmix(req.seed);
      std::mt19937_64 rng(key);
      std::normal_distribution<double> noise(0.0, 0.01);
      r.s_text = std::clamp(r.s_text + noise(rng), -1.0, 1.0);
      break;
    }
  }
  return r;
}

std::chrono::milliseconds resolve_timeout(std::chrono::milliseconds fallback) {
  const char* env = std::getenv("SCDIFF_EVAL_TIMEOUT_S");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const double seconds = std::strtod(env, &end);
  if (end == env || *end != '\0' || !std::isfinite(seconds) || seconds <= 0.0) return fallback;
  return std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(seconds * 1000.0)));
}

}  // namespace scdiff
