#include "scdiff/scdiff.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "scdiff/config.hpp"
#include "scdiff/errors.hpp"
#include "scdiff/evaluators.hpp"
#include "scdiff/export.hpp"
#include "scdiff/feature_io.hpp"
#include "scdiff/oracles.hpp"
#include "scdiff/plot.hpp"
#include "scdiff/serialize.hpp"
#include "scdiff/spectral.hpp"
#include "scdiff/special_fns.hpp"

struct scdiff_window {
  scdiff::Window window;
};

struct scdiff_feature_map {
  scdiff::FeatureMap map;
};

struct scdiff_kernel {
  scdiff::SpatialKernel kernel;
  double cutoff;
};

struct scdiff_config {
  scdiff::RunConfig config;
};

struct scdiff_evaluator {
  std::unique_ptr<scdiff::Evaluator> impl;
};

struct scdiff_search_result {
  scdiff::SearchResult result;
  scdiff::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

scdiff_status fail(scdiff_status status, const char* message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
scdiff_status guarded(F&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return SCDIFF_OK;
  } catch (const scdiff::TransportError& e) {
    return fail(SCDIFF_ERR_TRANSPORT, e.what());
  } catch (const scdiff::ContractError& e) {
    return fail(SCDIFF_ERR_CONTRACT, e.what());
  } catch (const scdiff::EvaluationFailed& e) {
    return fail(SCDIFF_ERR_EVALUATION, e.what());
  } catch (const scdiff::ConfigError& e) {
    return fail(SCDIFF_ERR_CONFIG, e.what());
  } catch (const scdiff::IoError& e) {
    return fail(SCDIFF_ERR_IO, e.what());
  } catch (const scdiff::GpFitError& e) {
    return fail(SCDIFF_ERR_NUMERIC, e.what());
  } catch (const scdiff::OptimizationError& e) {
    return fail(SCDIFF_ERR_NUMERIC, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SCDIFF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(SCDIFF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(SCDIFF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(SCDIFF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SCDIFF_ERR_INTERNAL, "unknown exception");
  }
}

template <typename T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw std::invalid_argument(std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string read_text(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw scdiff::IoError(std::string("cannot open ") + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw scdiff::IoError(std::string("cannot read ") + path);
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw scdiff::IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw scdiff::IoError("cannot write " + path.string());
}

scdiff::WindowSpec to_spec(const scdiff_window_spec& s) {
  scdiff::WindowSpec spec;
  switch (s.kind) {
    case SCDIFF_WINDOW_KAISER_BESSEL: spec.kind = scdiff::WindowKind::kaiser_bessel; break;
    case SCDIFF_WINDOW_GAUSSIAN: spec.kind = scdiff::WindowKind::gaussian; break;
    case SCDIFF_WINDOW_CIRCULAR: spec.kind = scdiff::WindowKind::circular; break;
    default: throw std::invalid_argument("scdiff_window_spec.kind is not a known window kind");
  }
  spec.height = s.height;
  spec.width = s.width;
  spec.radius = s.radius;
  spec.beta = s.beta;
  spec.eta = s.eta;
  if (s.has_center) spec.center = scdiff::Center{s.cx, s.cy};
  return spec;
}

std::vector<std::pair<double, double>> jinc_curve(const scdiff::SpatialKernel& k, double cutoff) {
  const std::size_t h = k.values.rows(), w = k.values.cols();
  const double fc = cutoff / std::sqrt(static_cast<double>(h * w));
  const double r_max = static_cast<double>(std::min(h, w) / 2);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0;; ++i) {
    const double r = 0.05 * static_cast<double>(i);
    if (r > r_max + 1e-12) break;
    out.emplace_back(r, fc * scdiff::jinc(fc, r));
  }
  return out;
}

std::vector<std::pair<double, double>> profile_rows(const scdiff::SpatialKernel& k) {
  const auto prof = scdiff::radial_profile(k.values);
  std::vector<std::pair<double, double>> rows;
  for (std::size_t i = 0; i < prof.size(); ++i) rows.emplace_back(static_cast<double>(i), prof[i]);
  return rows;
}

}  // namespace

extern "C" {

const char* scdiff_version(void) { return "0.1.0"; }

const char* scdiff_status_name(scdiff_status status) {
  switch (status) {
    case SCDIFF_OK: return "ok";
    case SCDIFF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SCDIFF_ERR_IO: return "i/o error";
    case SCDIFF_ERR_CONFIG: return "config error";
    case SCDIFF_ERR_NUMERIC: return "numeric failure";
    case SCDIFF_ERR_TRANSPORT: return "evaluator transport failure";
    case SCDIFF_ERR_CONTRACT: return "evaluator contract violation";
    case SCDIFF_ERR_EVALUATION: return "evaluation failed";
    case SCDIFF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* scdiff_last_error(void) { return g_last_error.c_str(); }

void scdiff_string_free(char* s) { std::free(s); }

scdiff_status scdiff_bessel_i0(double x, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = scdiff::bessel_i0(x);
  });
}

scdiff_status scdiff_bessel_j1(double x, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = scdiff::bessel_j1(x);
  });
}

scdiff_status scdiff_jinc(double cycles_per_pixel, double r, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = scdiff::jinc(cycles_per_pixel, r);
  });
}

scdiff_status scdiff_window_kind_parse(const char* name, scdiff_window_kind* out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    const auto kind = scdiff::parse_window_kind(name);
    if (!kind) throw std::invalid_argument(std::string("unknown window kind '") + name + "'");
    switch (*kind) {
      case scdiff::WindowKind::kaiser_bessel: *out = SCDIFF_WINDOW_KAISER_BESSEL; break;
      case scdiff::WindowKind::gaussian: *out = SCDIFF_WINDOW_GAUSSIAN; break;
      case scdiff::WindowKind::circular: *out = SCDIFF_WINDOW_CIRCULAR; break;
    }
  });
}

scdiff_status scdiff_window_create(const scdiff_window_spec* spec, scdiff_window** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    *out = new scdiff_window{scdiff::build_window(to_spec(*spec))};
  });
}

void scdiff_window_free(scdiff_window* w) { delete w; }

scdiff_status scdiff_window_dims(const scdiff_window* w, size_t* height, size_t* width) {
  return guarded([&] {
    require(w, "window");
    if (height) *height = w->window.height();
    if (width) *width = w->window.width();
  });
}

scdiff_status scdiff_window_values(const scdiff_window* w, const double** values) {
  return guarded([&] {
    require(w, "window");
    require(values, "values");
    *values = w->window.values().values().data();
  });
}

scdiff_status scdiff_window_summary(const scdiff_window* w, double* peak, double* edge,
                                    size_t* support) {
  return guarded([&] {
    require(w, "window");
    const auto s = scdiff::summarize(w->window);
    if (peak) *peak = s.peak;
    if (edge) *edge = s.edge;
    if (support) *support = s.support;
  });
}

scdiff_status scdiff_window_write(const scdiff_window* w, const char* path, const char* format) {
  return guarded([&] {
    require(w, "window");
    require(path, "path");
    const std::string fmt = format ? format : "csv";
    std::ostringstream ss;
    if (fmt == "csv") {
      scdiff::write_grid_csv(ss, w->window.values());
    } else if (fmt == "pgm") {
      scdiff::write_pgm(ss, w->window.values());
    } else {
      throw std::invalid_argument("format must be csv or pgm");
    }
    write_text(path, ss.str());
  });
}

scdiff_status scdiff_feature_map_create(size_t b, size_t c, size_t h, size_t w,
                                        const double* values, scdiff_feature_map** out) {
  return guarded([&] {
    require(out, "out");
    if (values == nullptr) {
      *out = new scdiff_feature_map{scdiff::FeatureMap(b, c, h, w)};
    } else {
      const std::size_t n = b * c * h * w;
      *out = new scdiff_feature_map{
          scdiff::FeatureMap(b, c, h, w, std::vector<double>(values, values + n))};
    }
  });
}

scdiff_status scdiff_feature_map_random(size_t b, size_t c, size_t h, size_t w, uint64_t seed,
                                        scdiff_feature_map** out) {
  return guarded([&] {
    require(out, "out");
    *out = new scdiff_feature_map{scdiff::random_feature_map(b, c, h, w, seed)};
  });
}

scdiff_status scdiff_feature_map_read(const char* path, scdiff_feature_map** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new scdiff_feature_map{scdiff::read_feature_map(path)};
  });
}

scdiff_status scdiff_feature_map_write(const scdiff_feature_map* x, const char* path) {
  return guarded([&] {
    require(x, "feature map");
    require(path, "path");
    scdiff::write_feature_map(x->map, path);
  });
}

void scdiff_feature_map_free(scdiff_feature_map* x) { delete x; }

scdiff_status scdiff_feature_map_dims(const scdiff_feature_map* x, size_t dims[4]) {
  return guarded([&] {
    require(x, "feature map");
    require(dims, "dims");
    for (int i = 0; i < 4; ++i) dims[i] = x->map.dims()[i];
  });
}

scdiff_status scdiff_feature_map_values(const scdiff_feature_map* x, const double** values,
                                        size_t* count) {
  return guarded([&] {
    require(x, "feature map");
    if (values) *values = x->map.values().data();
    if (count) *count = x->map.size();
  });
}

scdiff_status scdiff_modulate(const scdiff_feature_map* x, const scdiff_window* w, double alpha,
                              scdiff_feature_map** out) {
  return guarded([&] {
    require(x, "feature map");
    require(w, "window");
    require(out, "out");
    *out = new scdiff_feature_map{scdiff::modulate(x->map, w->window, alpha)};
  });
}

scdiff_status scdiff_freq_amplify(const scdiff_feature_map* x, double cutoff, double alpha,
                                  scdiff_feature_map** out) {
  return guarded([&] {
    require(x, "feature map");
    require(out, "out");
    *out = new scdiff_feature_map{scdiff::freq_amplify(x->map, cutoff, alpha)};
  });
}

scdiff_status scdiff_leakage(const scdiff_feature_map* original, const scdiff_feature_map* edited,
                             double radius, double cx, double cy, double* out) {
  return guarded([&] {
    require(original, "original");
    require(edited, "edited");
    require(out, "out");
    *out = scdiff::leakage(original->map, edited->map, radius, scdiff::Center{cx, cy});
  });
}

scdiff_status scdiff_kernel_create(size_t height, size_t width, double cutoff,
                                   scdiff_kernel** out) {
  return guarded([&] {
    require(out, "out");
    *out = new scdiff_kernel{scdiff::mask_to_kernel(scdiff::make_freq_mask(height, width, cutoff)),
                             cutoff};
  });
}

void scdiff_kernel_free(scdiff_kernel* k) { delete k; }

scdiff_status scdiff_kernel_dims(const scdiff_kernel* k, size_t* height, size_t* width) {
  return guarded([&] {
    require(k, "kernel");
    if (height) *height = k->kernel.values.rows();
    if (width) *width = k->kernel.values.cols();
  });
}

scdiff_status scdiff_kernel_values(const scdiff_kernel* k, const double** values) {
  return guarded([&] {
    require(k, "kernel");
    require(values, "values");
    *values = k->kernel.values.values().data();
  });
}

scdiff_status scdiff_kernel_radial_profile(const scdiff_kernel* k, double* out, size_t capacity,
                                           size_t* count) {
  return guarded([&] {
    require(k, "kernel");
    const auto prof = scdiff::radial_profile(k->kernel.values);
    if (count) *count = prof.size();
    if (out == nullptr) return;
    if (capacity < prof.size()) throw std::invalid_argument("radial profile buffer too small");
    std::copy(prof.begin(), prof.end(), out);
  });
}

scdiff_status scdiff_kernel_write_csv(const scdiff_kernel* k, const char* path) {
  return guarded([&] {
    require(k, "kernel");
    require(path, "path");
    std::ostringstream ss;
    scdiff::write_grid_csv(ss, k->kernel.values);
    write_text(path, ss.str());
  });
}

scdiff_status scdiff_config_parse(const char* json_text, scdiff_config** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = new scdiff_config{scdiff::parse_run_config(std::string_view(json_text))};
  });
}

scdiff_status scdiff_config_load(const char* path, scdiff_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    const std::string text = read_text(path);
    *out = new scdiff_config{scdiff::parse_run_config(std::string_view(text))};
  });
}

void scdiff_config_free(scdiff_config* c) { delete c; }

scdiff_status scdiff_config_set_seed(scdiff_config* c, uint64_t seed) {
  return guarded([&] {
    require(c, "config");
    scdiff::apply_seed(c->config, seed);
  });
}

scdiff_status scdiff_config_to_json(const scdiff_config* c, char** out) {
  return guarded([&] {
    require(c, "config");
    require(out, "out");
    *out = dup_string(scdiff::dump(scdiff::to_json(c->config)));
  });
}

scdiff_status scdiff_evaluator_create(const scdiff_config* c, scdiff_evaluator** out) {
  return guarded([&] {
    require(c, "config");
    require(out, "out");
    *out = new scdiff_evaluator{scdiff::make_evaluator(c->config)};
  });
}

scdiff_status scdiff_evaluator_synthetic(const char* name, scdiff_evaluator** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    const auto fixture = scdiff::parse_fixture(name);
    if (!fixture) throw std::invalid_argument(std::string("unknown synthetic evaluator '") + name + "'");
    *out = new scdiff_evaluator{std::make_unique<scdiff::SyntheticEvaluator>(*fixture)};
  });
}

void scdiff_evaluator_free(scdiff_evaluator* e) { delete e; }

scdiff_status scdiff_evaluator_name(const scdiff_evaluator* e, char** out) {
  return guarded([&] {
    require(e, "evaluator");
    require(out, "out");
    *out = dup_string(e->impl->name());
  });
}

scdiff_status scdiff_evaluator_concurrent(const scdiff_evaluator* e, int* out) {
  return guarded([&] {
    require(e, "evaluator");
    require(out, "out");
    *out = e->impl->concurrent_safe() ? 1 : 0;
  });
}

scdiff_status scdiff_evaluate(scdiff_evaluator* e, const scdiff_config* c, double alpha,
                              double beta, double* s_text, double* s_img) {
  return guarded([&] {
    require(e, "evaluator");
    require(c, "config");
    const auto& t = c->config.vsml.request;
    scdiff::EvalRequest req{alpha, beta, t.radius, t.block, t.center, t.seed, t.prompt};
    const auto r = scdiff::evaluate(*e->impl, req);
    if (s_text) *s_text = r.s_text;
    if (s_img) *s_img = r.s_img;
  });
}

scdiff_status scdiff_vsml_score(double s_text, double s_img, double lambda, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = scdiff::vsml_score(s_text, s_img, lambda);
  });
}

scdiff_status scdiff_constraint_g(double s_img, double tau, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = scdiff::constraint_g(s_img, tau);
  });
}

scdiff_status scdiff_search_run(const scdiff_config* c, scdiff_evaluator* e,
                                scdiff_search_result** out) {
  return guarded([&] {
    require(c, "config");
    require(e, "evaluator");
    require(out, "out");
    auto result = scdiff::hierarchical_search(*e->impl, c->config.vsml);
    *out = new scdiff_search_result{std::move(result), c->config};
  });
}

void scdiff_search_result_free(scdiff_search_result* r) { delete r; }

scdiff_status scdiff_search_result_summary(const scdiff_search_result* r,
                                           scdiff_search_summary* out) {
  return guarded([&] {
    require(r, "result");
    require(out, "out");
    const auto& s = r->result;
    out->alpha = s.alpha_star;
    out->beta = s.beta_star;
    out->score = s.score;
    out->feasible = s.feasible ? 1 : 0;
    out->evaluator_calls = s.evaluator_calls;
    out->stage1_calls = s.stage1.evaluations;
    out->stage2_calls = s.stage2 ? s.stage2->evaluations() : 0;
    out->error_count = s.errors.size();
  });
}

scdiff_status scdiff_search_result_json(const scdiff_search_result* r, char** out) {
  return guarded([&] {
    require(r, "result");
    require(out, "out");
    *out = dup_string(scdiff::dump(scdiff::to_json(r->result, r->config)));
  });
}

scdiff_status scdiff_search_json_validate(const char* json_text) {
  return guarded([&] {
    require(json_text, "json_text");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      throw scdiff::ConfigError(std::string("search document is not valid JSON: ") + e.what());
    }
    scdiff::validate_search_document(doc);
  });
}

scdiff_status scdiff_plot_search(const char* trace_json, char** svg_out) {
  return guarded([&] {
    require(trace_json, "trace_json");
    require(svg_out, "svg_out");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(trace_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw scdiff::ConfigError(std::string("trace is not valid JSON: ") + e.what());
    }
    *svg_out = dup_string(scdiff::render_search_svg(doc));
  });
}

scdiff_status scdiff_plot_profiles(const scdiff_kernel* k, char** svg_out) {
  return guarded([&] {
    require(k, "kernel");
    require(svg_out, "svg_out");
    std::vector<scdiff::Series> series{{"discrete radial mean", profile_rows(k->kernel)},
                                       {"continuous jinc", jinc_curve(k->kernel, k->cutoff)}};
    *svg_out = dup_string(scdiff::render_lines_svg("low-pass kernel profile", "radius (px)",
                                                   "kernel value", series));
  });
}

scdiff_status scdiff_spectral_report(size_t height, size_t width, double cutoff, double alpha,
                                     uint64_t seed, const char* dir, char** leakage_json) {
  return guarded([&] {
    require(dir, "dir");
    const std::filesystem::path root(dir);
    if (!std::filesystem::is_directory(root)) {
      throw scdiff::IoError("output directory does not exist: " + root.string());
    }
    const auto kernel = scdiff::mask_to_kernel(scdiff::make_freq_mask(height, width, cutoff));

    std::ostringstream kcsv, pcsv, jcsv;
    scdiff::write_grid_csv(kcsv, kernel.values);
    scdiff::write_xy_csv(pcsv, "radius", "value", profile_rows(kernel));
    scdiff::write_xy_csv(jcsv, "radius", "value", jinc_curve(kernel, cutoff));
    write_text(root / "kernel.csv", kcsv.str());
    write_text(root / "radial_profile.csv", pcsv.str());
    write_text(root / "jinc_profile.csv", jcsv.str());

    // Matched pair: window radius equals the cutoff in bins.
    scdiff::WindowSpec spec;
    spec.kind = scdiff::WindowKind::kaiser_bessel;
    spec.height = height;
    spec.width = width;
    spec.radius = cutoff;
    spec.beta = 7.0;
    const auto window = scdiff::build_window(spec);
    const auto x = scdiff::random_feature_map(1, 1, height, width, seed);
    const auto center = spec.resolved_center();
    double input_max = 0.0;
    for (double v : x.values()) input_max = std::max(input_max, std::fabs(v));
    const double kb = scdiff::leakage(x, scdiff::modulate(x, window, alpha), cutoff, center);
    const double fq = scdiff::leakage(x, scdiff::freq_amplify(x, cutoff, alpha), cutoff, center);

    const nlohmann::json report = {{"height", height},
                                   {"width", width},
                                   {"cutoff", cutoff},
                                   {"radius", cutoff},
                                   {"alpha", alpha},
                                   {"seed", seed},
                                   {"window", {{"kind", "kaiser_bessel"}, {"beta", spec.beta}}},
                                   {"input_max_abs", input_max},
                                   {"kb_leakage", kb},
                                   {"freq_leakage", fq},
                                   {"freq_leakage_relative", input_max > 0 ? fq / input_max : 0.0}};
    const std::string text = scdiff::dump(report);
    write_text(root / "leakage.json", text);
    if (leakage_json) *leakage_json = dup_string(text);
  });
}

scdiff_status scdiff_verify(uint64_t seed, char** report_json, int* all_passed) {
  return guarded([&] {
    const auto reports = scdiff::oracle::run_verification(seed);
    const auto doc = scdiff::oracle::verification_document(reports, seed);
    if (all_passed) *all_passed = doc["passed"].get<bool>() ? 1 : 0;
    if (report_json) *report_json = dup_string(scdiff::dump(doc));
  });
}

}  // extern "C"
