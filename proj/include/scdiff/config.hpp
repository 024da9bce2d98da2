#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "scdiff/search.hpp"
#include "scdiff/windows.hpp"

namespace scdiff {

struct EvaluatorSelection {
  enum class Kind { synthetic, external };
  Kind kind = Kind::synthetic;
  std::string synthetic = "peak";
  /// External command: either an argv vector or a shell command line.
  std::vector<std::string> argv;
  std::string shell;
  double timeout_s = 300.0;
};

/// Everything `scdiff search` needs. Serialized form (JSON, unknown keys
/// rejected at every level) is documented in the README.
struct RunConfig {
  VsmlConfig vsml;
  WindowSpec window;
  EvaluatorSelection evaluator;
  std::uint64_t seed = 0;
};

inline constexpr std::string_view kConfigSchema = "scdiff-config/1";

/// Throws ConfigError with a JSON-pointer-ish path to the offending field.
RunConfig parse_run_config(std::string_view text);
RunConfig parse_run_config(const nlohmann::json& doc);
inline RunConfig parse_run_config(const std::string& text) { return parse_run_config(std::string_view(text)); }
inline RunConfig parse_run_config(const char* text) { return parse_run_config(std::string_view(text)); }
nlohmann::json to_json(const RunConfig& config);

/// Sets the master seed and the per-stage seeds derived from it.
void apply_seed(RunConfig& config, std::uint64_t seed);

/// Builds the configured evaluator; external ones are launched and
/// handshaken here (TransportError on failure). SCDIFF_EVAL_TIMEOUT_S
/// overrides the configured timeout.
std::unique_ptr<Evaluator> make_evaluator(const RunConfig& config);

}  // namespace scdiff
