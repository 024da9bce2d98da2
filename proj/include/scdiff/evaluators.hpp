#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "scdiff/search.hpp"

namespace scdiff {

// Synthetic fixtures. Shared formulas (clamp to [0, 1] where noted):
//   peak_text(a, b) = 0.20 + 0.12 exp(-(a - 4.2)^2 / 2) exp(-(b - 8.5)^2 / 4)
//   peak:        s_text = peak_text,  s_img = clamp(1 - 0.05 (a - 1))
//   identity:    s_text = peak_text,  s_img = 1
//   infeasible:  s_text = peak_text,  s_img = clamp(1 - 0.6 (a - 1))
//   noisy-peak:  peak with N(0, 0.01^2) added to s_text, drawn from a hash
//                of (a, b, seed) so repeated queries agree.

double peak_s_text(double alpha, double beta);
double peak_s_img(double alpha);

enum class Fixture { peak, identity, infeasible, noisy_peak };

std::string_view to_string(Fixture f);
std::optional<Fixture> parse_fixture(std::string_view name);

class SyntheticEvaluator final : public Evaluator {
 public:
  explicit SyntheticEvaluator(Fixture fixture) : fixture_(fixture) {}

  std::string name() const override;
  bool concurrent_safe() const override { return true; }
  EvalResult evaluate(const EvalRequest& request) override;

  Fixture fixture() const noexcept { return fixture_; }

 private:
  Fixture fixture_;
};

/// Child process speaking newline-delimited JSON on its stdin/stdout.
///   handshake:  {"hello": {"name": str, "concurrent": bool}}
///   request:    {"id", "alpha", "beta", "r", "block", "cx", "cy", "seed", "prompt"}
///   response:   {"id", "s_text", "s_img"} or {"id", "error"}
/// Responses are matched by id and may arrive out of order.
class ExternalEvaluator final : public Evaluator {
 public:
  /// argv[0] is resolved through PATH. Throws TransportError when the
  /// process cannot start or the handshake does not arrive in time.
  static std::unique_ptr<ExternalEvaluator> launch(std::vector<std::string> argv,
                                                   std::chrono::milliseconds timeout);
  /// Runs `command` through /bin/sh -c.
  static std::unique_ptr<ExternalEvaluator> launch_shell(const std::string& command,
                                                         std::chrono::milliseconds timeout);

  ~ExternalEvaluator() override;
  ExternalEvaluator(const ExternalEvaluator&) = delete;
  ExternalEvaluator& operator=(const ExternalEvaluator&) = delete;

  std::string name() const override { return name_; }
  bool concurrent_safe() const override { return concurrent_; }
  EvalResult evaluate(const EvalRequest& request) override;
  /// Pipelines every request when the child declared itself concurrent.
  std::vector<EvalResult> evaluate_batch(std::span<const EvalRequest> requests) override;

 private:
  ExternalEvaluator(int pid, int fd, std::chrono::milliseconds timeout);

  std::uint64_t send(const EvalRequest& request);
  EvalResult await(std::uint64_t id);
  std::string read_line(std::chrono::steady_clock::time_point deadline);
  void shutdown_child();

  int pid_ = -1;
  int fd_ = -1;
  std::chrono::milliseconds timeout_;
  std::string name_ = "external";
  bool concurrent_ = false;
  bool broken_ = false;
  std::uint64_t next_id_ = 1;
  std::string buffer_;
  std::map<std::uint64_t, std::string> pending_;  // early responses by id
};

/// Reads SCDIFF_EVAL_TIMEOUT_S when set and valid, otherwise `fallback`.
std::chrono::milliseconds resolve_timeout(std::chrono::milliseconds fallback);

}  // namespace scdiff
