#include "scdiff/serialize.hpp"

#include "scdiff/errors.hpp"

namespace scdiff {

using json = nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json probe_json(const Probe& p) {
  return {{"objective", p.objective}, {"constraint", p.constraint}, {"feasible", p.feasible()}};
}

json step_json(const SpsaStepRecord& s) {
  json attempts = json::array();
  for (const auto& a : s.attempts) {
    attempts.push_back({{"delta", a.delta},
                        {"step", a.step},
                        {"plus", a.sample.plus_point},
                        {"minus", a.sample.minus_point},
                        {"f_plus", a.sample.f_plus},
                        {"f_minus", a.sample.f_minus},
                        {"gradient", a.sample.gradient},
                        {"candidate", a.candidate},
                        {"at_candidate", probe_json(a.at_candidate)},
                        {"accepted", a.accepted}});
  }
  return {{"t", s.t},
          {"beta_before", s.beta_before},
          {"beta_after", s.beta_after},
          {"a_t", s.a_t},
          {"c_t", s.c_t},
          {"backtracks", s.backtracks()},
          {"stalled", s.stalled},
          {"at_beta", probe_json(s.at_beta)},
          {"gradient_evaluations", s.gradient_evaluations},
          {"probe_evaluations", s.probe_evaluations},
          {"attempts", attempts}};
}

}  // namespace

json to_json(const BoTrace& t) {
  json records = json::array();
  for (const auto& r : t.records) {
    json rec = {{"alpha", r.alpha}, {"initial", r.initial}, {"value", opt(r.value)},
                {"ei", opt(r.ei)},  {"mu", opt(r.mu)},      {"sigma", opt(r.sigma)}};
    if (!r.error.empty()) rec["error"] = r.error;
    records.push_back(std::move(rec));
  }
  json curve = json::array();
  for (const auto& [a, m] : t.posterior_curve) curve.push_back({a, m});
  return {{"bounds", {t.lo, t.hi}},
          {"seed", t.seed},
          {"records", records},
          {"alpha_star", t.alpha_star},
          {"mu_star", t.mu_star},
          {"hyperparams",
           {{"length_scale", t.hyperparams.length_scale},
            {"signal_var", t.hyperparams.signal_var},
            {"noise_var", t.hyperparams.noise_var}}},
          {"posterior_curve", curve},
          {"evaluations", t.evaluations},
          {"truncated", t.truncated}};
}

json to_json(const SpsaTrace& t) {
  json runs = json::array();
  for (const auto& r : t.runs) {
    json steps = json::array();
    for (const auto& s : r.steps) steps.push_back(step_json(s));
    json run = {{"seed", r.seed},
                {"initial", probe_json(r.initial)},
                {"has_feasible", r.has_feasible},
                {"best_beta", r.best_beta},
                {"best", probe_json(r.best)},
                {"gradient_evaluations", r.gradient_evaluations},
                {"probe_evaluations", r.probe_evaluations},
                {"evaluations", r.evaluations()},
                {"steps", steps}};
    if (!r.error.empty()) run["error"] = r.error;
    runs.push_back(std::move(run));
  }
  return {{"beta_star", t.beta_star},
          {"at_star", probe_json(t.at_star)},
          {"feasible", t.feasible},
          {"selected_run", t.selected_run},
          {"evaluations", t.evaluations()},
          {"runs", runs}};
}

json to_json(const EvalResult& r) {
  return {{"s_text", r.s_text},
          {"s_img", r.s_img},
          {"latency_ms", r.latency_ms},
          {"evaluator_id", r.evaluator_id}};
}

json to_json(const SearchResult& r, const RunConfig& config) {
  const std::size_t stage2_calls = r.stage2 ? r.stage2->evaluations() : 0;
  return {{"schema", std::string(kSearchSchema)},
          {"result",
           {{"alpha", r.alpha_star},
            {"beta", r.beta_star},
            {"score", r.score},
            {"feasible", r.feasible}}},
          {"confirmation", to_json(r.confirmation)},
          {"evaluator_calls", r.evaluator_calls},
          {"budget",
           {{"stage1", r.stage1.evaluations}, {"stage2", stage2_calls}, {"confirmation", 1}}},
          {"errors", r.errors},
          {"stage1", to_json(r.stage1)},
          {"stage2", r.stage2 ? to_json(*r.stage2) : json(nullptr)},
          {"config", to_json(config)}};
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError("search document " + where + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) bad(where + "/" + key, "missing");
  return obj.at(key);
}

double number(const json& obj, const char* key, const std::string& where) {
  const auto& v = member(obj, key, where);
  if (!v.is_number()) bad(where + "/" + key, "must be a number");
  return v.get<double>();
}

void boolean(const json& obj, const char* key, const std::string& where) {
  if (!member(obj, key, where).is_boolean()) bad(where + "/" + key, "must be a boolean");
}

}  // namespace

void validate_search_document(const json& doc) {
  if (!doc.is_object()) bad("/", "must be an object");
  const auto& schema = member(doc, "schema", "");
  if (!schema.is_string() || schema.get<std::string>() != kSearchSchema) {
    bad("/schema", "expected \"" + std::string(kSearchSchema) + "\"");
  }
  const auto& result = member(doc, "result", "");
  for (const char* k : {"alpha", "beta", "score"}) number(result, k, "/result");
  boolean(result, "feasible", "/result");

  const auto& conf = member(doc, "confirmation", "");
  number(conf, "s_text", "/confirmation");
  number(conf, "s_img", "/confirmation");

  const auto& calls = member(doc, "evaluator_calls", "");
  if (!calls.is_number_unsigned()) bad("/evaluator_calls", "must be a non-negative integer");
  if (!member(doc, "errors", "").is_array()) bad("/errors", "must be an array");

  const auto& s1 = member(doc, "stage1", "");
  const auto& bounds = member(s1, "bounds", "/stage1");
  if (!bounds.is_array() || bounds.size() != 2) bad("/stage1/bounds", "must be [lo, hi]");
  const auto& records = member(s1, "records", "/stage1");
  if (!records.is_array()) bad("/stage1/records", "must be an array");
  for (std::size_t i = 0; i < records.size(); ++i) {
    number(records[i], "alpha", "/stage1/records/" + std::to_string(i));
  }
  number(s1, "alpha_star", "/stage1");
  if (!member(s1, "posterior_curve", "/stage1").is_array()) {
    bad("/stage1/posterior_curve", "must be an array");
  }

  const auto& s2 = member(doc, "stage2", "");
  if (!s2.is_null()) {
    number(s2, "beta_star", "/stage2");
    boolean(s2, "feasible", "/stage2");
    const auto& runs = member(s2, "runs", "/stage2");
    if (!runs.is_array()) bad("/stage2/runs", "must be an array");
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const std::string where = "/stage2/runs/" + std::to_string(i);
      const auto& steps = member(runs[i], "steps", where);
      if (!steps.is_array()) bad(where + "/steps", "must be an array");
      for (std::size_t k = 0; k < steps.size(); ++k) {
        number(steps[k], "beta_after", where + "/steps/" + std::to_string(k));
      }
    }
  }

  try {
    parse_run_config(member(doc, "config", ""));
  } catch (const ConfigError& e) {
    bad("/config", e.what());
  }
}

}  // namespace scdiff
