#include "scdiff/config.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <set>

#include "scdiff/errors.hpp"
#include "scdiff/evaluators.hpp"

namespace scdiff {
namespace {

using json = nlohmann::json;

// Cursor over one JSON object that tracks its path and rejects unknown keys.
class Fields {
 public:
  Fields(const json& obj, std::string path, std::initializer_list<const char*> allowed)
      : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_, "must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj_.items()) {
      if (!ok.count(key)) fail(path_ + "/" + key, "unknown key");
    }
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config " + (where.empty() ? std::string("/") : where) + ": " + what);
  }

  bool has(const char* key) const { return obj_.contains(key); }
  std::string at(const char* key) const { return path_ + "/" + key; }
  const json& raw(const char* key) const { return obj_.at(key); }

  void number(const char* key, double& out) const {
    if (!has(key)) return;
    const auto& v = obj_.at(key);
    if (!v.is_number()) fail(at(key), "must be a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail(at(key), "must be finite");
  }

  template <typename Int>
  void integer(const char* key, Int& out, long long lo) const {
    if (!has(key)) return;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) fail(at(key), "must be an integer");
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())) fail(at(key), "out of range");
      out = static_cast<Int>(u);
    } else {
      const auto s = v.get<long long>();
      if (s < lo) fail(at(key), "must be >= " + std::to_string(lo));
      out = static_cast<Int>(s);
    }
    if (static_cast<long long>(out) < lo && lo >= 0) fail(at(key), "must be >= " + std::to_string(lo));
  }

  void string(const char* key, std::string& out) const {
    if (!has(key)) return;
    const auto& v = obj_.at(key);
    if (!v.is_string()) fail(at(key), "must be a string");
    out = v.get<std::string>();
  }

  void pair(const char* key, double& a, double& b) const {
    if (!has(key)) return;
    const auto& v = obj_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(at(key), "must be a two-element numeric array");
    }
    a = v[0].get<double>();
    b = v[1].get<double>();
  }

 private:
  const json& obj_;
  std::string path_;
};

void parse_stage1(const json& j, BayesOptConfig& c) {
  Fields f(j, "/stage1", {"bounds", "n_init", "n_iter", "restarts", "fixed_beta"});
  f.pair("bounds", c.lo, c.hi);
  f.integer("n_init", c.n_init, 2);
  f.integer("n_iter", c.n_iter, 1);
  f.integer("restarts", c.restarts, 1);
  f.number("fixed_beta", c.fixed_beta);
}

void parse_stage2(const json& j, SpsaConfig& c) {
  Fields f(j, "/stage2", {"beta0", "bounds", "iterations", "a", "gain_exponent", "c", "gamma",
                          "n_runs", "max_backtracks"});
  f.number("beta0", c.beta0);
  f.pair("bounds", c.beta_min, c.beta_max);
  f.integer("iterations", c.iterations, 1);
  f.number("a", c.a);
  f.number("gain_exponent", c.gain_exponent);
  f.number("c", c.c);
  f.number("gamma", c.gamma);
  f.integer("n_runs", c.n_runs, 1);
  f.integer("max_backtracks", c.max_backtracks, 1);
}

void parse_window(const json& j, WindowSpec& w) {
  Fields f(j, "/window", {"kind", "height", "width", "radius", "beta", "eta", "center"});
  if (f.has("kind")) {
    std::string k;
    f.string("kind", k);
    const auto kind = parse_window_kind(k);
    if (!kind) Fields::fail(f.at("kind"), "unknown window kind '" + k + "'");
    w.kind = *kind;
  }
  f.integer("height", w.height, 1);
  f.integer("width", w.width, 1);
  f.number("radius", w.radius);
  f.number("beta", w.beta);
  f.number("eta", w.eta);
  if (f.has("center")) {
    Center c;
    f.pair("center", c.cx, c.cy);
    w.center = c;
  }
}

void parse_evaluator(const json& j, EvaluatorSelection& e) {
  Fields f(j, "/evaluator", {"synthetic", "external", "timeout_s"});
  if (f.has("synthetic") == f.has("external")) {
    Fields::fail("/evaluator", "exactly one of \"synthetic\" or \"external\" is required");
  }
  if (f.has("synthetic")) {
    e.kind = EvaluatorSelection::Kind::synthetic;
    f.string("synthetic", e.synthetic);
    if (!parse_fixture(e.synthetic)) {
      Fields::fail(f.at("synthetic"), "unknown fixture '" + e.synthetic + "'");
    }
  } else {
    e.kind = EvaluatorSelection::Kind::external;
    const auto& ext = f.raw("external");
    if (ext.is_string()) {
      e.shell = ext.get<std::string>();
      if (e.shell.empty()) Fields::fail(f.at("external"), "must not be empty");
    } else if (ext.is_array() && !ext.empty()) {
      for (const auto& a : ext) {
        if (!a.is_string()) Fields::fail(f.at("external"), "argv entries must be strings");
        e.argv.push_back(a.get<std::string>());
      }
    } else {
      Fields::fail(f.at("external"), "must be a command string or a non-empty argv array");
    }
  }
  f.number("timeout_s", e.timeout_s);
  if (!(e.timeout_s > 0.0)) Fields::fail(f.at("timeout_s"), "must be positive");
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  RunConfig cfg;
  Fields f(doc, "", {"schema", "evaluator", "window", "block", "prompt", "seed", "vsml", "stage1",
                     "stage2"});
  if (f.has("schema")) {
    std::string schema;
    f.string("schema", schema);
    if (schema != kConfigSchema) Fields::fail("/schema", "expected \"" + std::string(kConfigSchema) + "\"");
  }
  if (!f.has("evaluator")) Fields::fail("/evaluator", "required");
  parse_evaluator(f.raw("evaluator"), cfg.evaluator);

  cfg.window.kind = WindowKind::kaiser_bessel;
  cfg.window.height = 64;
  cfg.window.width = 64;
  cfg.window.radius = 15.0;
  cfg.window.beta = 7.0;
  if (f.has("window")) parse_window(f.raw("window"), cfg.window);
  try {
    cfg.window.validate();
  } catch (const std::invalid_argument& e) {
    Fields::fail("/window", e.what());
  }

  if (f.has("block")) {
    std::string b;
    f.string("block", b);
    const auto tag = parse_block_tag(b);
    if (!tag) Fields::fail("/block", "must be one of down0, down1, down2, mid");
    cfg.vsml.request.block = *tag;
  }
  f.string("prompt", cfg.vsml.request.prompt);
  std::uint64_t seed = 0;
  f.integer("seed", seed, 0);

  if (f.has("vsml")) {
    Fields v(f.raw("vsml"), "/vsml", {"lambda", "tau"});
    v.number("lambda", cfg.vsml.lambda);
    v.number("tau", cfg.vsml.tau);
  }
  if (f.has("stage1")) parse_stage1(f.raw("stage1"), cfg.vsml.stage1);
  if (f.has("stage2")) parse_stage2(f.raw("stage2"), cfg.vsml.stage2);

  cfg.vsml.request.radius = cfg.window.radius;
  cfg.vsml.request.center = cfg.window.resolved_center();
  apply_seed(cfg, seed);
  try {
    cfg.vsml.validate();
  } catch (const std::invalid_argument& e) {
    Fields::fail("", e.what());
  }
  return cfg;
}

RunConfig parse_run_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(doc);
}

json to_json(const RunConfig& c) {
  json ev = json::object();
  if (c.evaluator.kind == EvaluatorSelection::Kind::synthetic) {
    ev["synthetic"] = c.evaluator.synthetic;
  } else if (!c.evaluator.argv.empty()) {
    ev["external"] = c.evaluator.argv;
  } else {
    ev["external"] = c.evaluator.shell;
  }
  ev["timeout_s"] = c.evaluator.timeout_s;

  json window = {{"kind", std::string(to_string(c.window.kind))},
                 {"height", c.window.height},
                 {"width", c.window.width},
                 {"radius", c.window.radius},
                 {"beta", c.window.beta},
                 {"eta", c.window.eta}};
  if (c.window.center) window["center"] = {c.window.center->cx, c.window.center->cy};

  const auto& s1 = c.vsml.stage1;
  const auto& s2 = c.vsml.stage2;
  return json{{"schema", std::string(kConfigSchema)},
              {"evaluator", ev},
              {"window", window},
              {"block", std::string(to_string(c.vsml.request.block))},
              {"prompt", c.vsml.request.prompt},
              {"seed", c.seed},
              {"vsml", {{"lambda", c.vsml.lambda}, {"tau", c.vsml.tau}}},
              {"stage1",
               {{"bounds", {s1.lo, s1.hi}},
                {"n_init", s1.n_init},
                {"n_iter", s1.n_iter},
                {"restarts", s1.restarts},
                {"fixed_beta", s1.fixed_beta}}},
              {"stage2",
               {{"beta0", s2.beta0},
                {"bounds", {s2.beta_min, s2.beta_max}},
                {"iterations", s2.iterations},
                {"a", s2.a},
                {"gain_exponent", s2.gain_exponent},
                {"c", s2.c},
                {"gamma", s2.gamma},
                {"n_runs", s2.n_runs},
                {"max_backtracks", s2.max_backtracks}}}};
}

void apply_seed(RunConfig& config, std::uint64_t seed) {
  config.seed = seed;
  config.vsml.request.seed = seed;
  config.vsml.stage1.seed = seed;
  config.vsml.stage2.seed = seed ^ 0x5bd1e9955bd1e995ULL;
}

std::unique_ptr<Evaluator> make_evaluator(const RunConfig& config) {
  const auto& e = config.evaluator;
  if (e.kind == EvaluatorSelection::Kind::synthetic) {
    const auto fixture = parse_fixture(e.synthetic);
    if (!fixture) throw ConfigError("unknown synthetic evaluator '" + e.synthetic + "'");
    return std::make_unique<SyntheticEvaluator>(*fixture);
  }
  const auto timeout = resolve_timeout(
      std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(e.timeout_s * 1000.0))));
  if (!e.argv.empty()) return ExternalEvaluator::launch(e.argv, timeout);
  return ExternalEvaluator::launch_shell(e.shell, timeout);
}

}  // namespace scdiff
