// scdiff command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 runtime or I/O failure, 2 usage or schema error,
// 3 search finished with an infeasible result, 4 evaluator transport failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "scdiff/scdiff.h"

namespace {

enum Exit : int { kOk = 0, kRuntime = 1, kUsage = 2, kInfeasible = 3, kTransport = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_for(scdiff_status st) {
  switch (st) {
    case SCDIFF_OK: return kOk;
    case SCDIFF_ERR_INVALID_ARGUMENT:
    case SCDIFF_ERR_CONFIG: return kUsage;
    case SCDIFF_ERR_TRANSPORT: return kTransport;
    default: return kRuntime;
  }
}

int report(scdiff_status st, const char* what) {
  fmt::print(stderr, "scdiff: {}: {} ({})\n", what, scdiff_last_error(), scdiff_status_name(st));
  return exit_for(st);
}

// Owns a heap string handed out by the library.
struct LibString {
  char* p = nullptr;
  ~LibString() { scdiff_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};

std::pair<std::size_t, std::size_t> parse_size(const std::string& s) {
  const auto x = s.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    const long h = std::stol(s.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(s);
    const std::string rest = s.substr(x + 1);
    const long w = std::stol(rest, &used);
    if (used != rest.size() || h <= 0 || w <= 0) throw std::invalid_argument(s);
    return {static_cast<std::size_t>(h), static_cast<std::size_t>(w)};
  } catch (const std::exception&) {
    throw UsageError("--size must look like HxW with positive integers, got '" + s + "'");
  }
}

std::pair<double, double> parse_center(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    const double cx = std::stod(s.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument(s);
    const std::string rest = s.substr(comma + 1);
    const double cy = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(s);
    return {cx, cy};
  } catch (const std::exception&) {
    throw UsageError("--center must look like cx,cy, got '" + s + "'");
  }
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  out.flush();
  return static_cast<bool>(out);
}

struct WindowArgs {
  std::string kind = "kaiser";
  std::string size;
  double radius = 0.0;
  double beta = 7.0;
  double eta = 0.5;
  std::string center;
  std::string out;
  std::string format = "csv";
};

int cmd_window(const WindowArgs& a) {
  scdiff_window_spec spec{};
  if (auto st = scdiff_window_kind_parse(a.kind.c_str(), &spec.kind)) return report(st, "--kind");
  std::tie(spec.height, spec.width) = parse_size(a.size);
  spec.radius = a.radius;
  spec.beta = a.beta;
  spec.eta = a.eta;
  if (!a.center.empty()) {
    spec.has_center = 1;
    std::tie(spec.cx, spec.cy) = parse_center(a.center);
  }
  Handle<scdiff_window, scdiff_window_free> w;
  if (auto st = scdiff_window_create(&spec, &w.p)) return report(st, "window");
  if (auto st = scdiff_window_write(w.p, a.out.c_str(), a.format.c_str())) return report(st, "write");
  double peak = 0, edge = 0;
  std::size_t support = 0;
  if (auto st = scdiff_window_summary(w.p, &peak, &edge, &support)) return report(st, "summary");
  fmt::print("kind={} size={}x{} radius={} beta={} eta={}\n", a.kind, spec.height, spec.width,
             spec.radius, spec.beta, spec.eta);
  fmt::print("peak={:.17g} edge={:.17g} support={}\n", peak, edge, support);
  return kOk;
}

struct SpectralArgs {
  std::string size = "64x64";
  double cutoff = 8.0;
  double alpha = 5.0;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool svg = false;
};

int cmd_spectral(const SpectralArgs& a) {
  const auto [h, w] = parse_size(a.size);
  LibString leak;
  if (auto st = scdiff_spectral_report(h, w, a.cutoff, a.alpha, a.seed, a.out_dir.c_str(), &leak.p)) {
    return report(st, "spectral");
  }
  if (a.svg) {
    Handle<scdiff_kernel, scdiff_kernel_free> k;
    if (auto st = scdiff_kernel_create(h, w, a.cutoff, &k.p)) return report(st, "kernel");
    LibString svg;
    if (auto st = scdiff_plot_profiles(k.p, &svg.p)) return report(st, "plot");
    if (!write_file(a.out_dir + "/profiles.svg", svg.str())) {
      fmt::print(stderr, "scdiff: cannot write {}/profiles.svg\n", a.out_dir);
      return kRuntime;
    }
  }
  fmt::print("{}", leak.str());
  return kOk;
}

struct SearchArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int cmd_search(const SearchArgs& a) {
  Handle<scdiff_config, scdiff_config_free> cfg;
  if (auto st = scdiff_config_load(a.config.c_str(), &cfg.p)) return report(st, "config");
  if (a.seed) scdiff_config_set_seed(cfg.p, *a.seed);

  Handle<scdiff_evaluator, scdiff_evaluator_free> ev;
  if (auto st = scdiff_evaluator_create(cfg.p, &ev.p)) return report(st, "evaluator");
  LibString name;
  scdiff_evaluator_name(ev.p, &name.p);
  fmt::print("evaluator: {}\n", name.str());

  Handle<scdiff_search_result, scdiff_search_result_free> res;
  if (auto st = scdiff_search_run(cfg.p, ev.p, &res.p)) return report(st, "search");

  scdiff_search_summary sum{};
  scdiff_search_result_summary(res.p, &sum);
  if (!a.out.empty()) {
    LibString doc;
    if (auto st = scdiff_search_result_json(res.p, &doc.p)) return report(st, "serialize");
    if (!write_file(a.out, doc.str())) {
      fmt::print(stderr, "scdiff: cannot write {}\n", a.out);
      return kRuntime;
    }
  }
  fmt::print("evaluator calls: {} (stage 1: {}, stage 2: {}, confirmation: 1)\n", sum.evaluator_calls,
             sum.stage1_calls, sum.stage2_calls);
  if (sum.error_count) fmt::print("recorded errors: {}\n", sum.error_count);
  fmt::print("RESULT alpha={:.17g} beta={:.17g} score={:.17g} feasible={}\n", sum.alpha, sum.beta,
             sum.score, sum.feasible ? "true" : "false");
  std::fflush(stdout);
  return sum.feasible ? kOk : kInfeasible;
}

int cmd_plot(const std::string& trace, const std::string& out) {
  std::ifstream in(trace, std::ios::binary);
  if (!in) {
    fmt::print(stderr, "scdiff: cannot open {}\n", trace);
    return kRuntime;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  LibString svg;
  if (auto st = scdiff_plot_search(ss.str().c_str(), &svg.p)) return report(st, "plot");
  if (!write_file(out, svg.str())) {
    fmt::print(stderr, "scdiff: cannot write {}\n", out);
    return kRuntime;
  }
  return kOk;
}

int cmd_verify(std::uint64_t seed, const std::string& out) {
  LibString doc;
  int passed = 0;
  if (auto st = scdiff_verify(seed, &doc.p, &passed)) return report(st, "verify");
  if (!out.empty() && !write_file(out, doc.str())) {
    fmt::print(stderr, "scdiff: cannot write {}\n", out);
    return kRuntime;
  }
  if (out.empty()) fmt::print("{}", doc.str());
  fmt::print(stderr, "oracles: {}\n", passed ? "all passed" : "FAILED");
  return passed ? kOk : kRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scdiff: spatial window modulation and (alpha, beta) search"};
  app.require_subcommand(1);
  app.set_version_flag("--version", scdiff_version());

  WindowArgs wa;
  auto* window = app.add_subcommand("window", "Generate a spatial window");
  window->add_option("--kind", wa.kind, "kaiser | gaussian | circular")->capture_default_str();
  window->add_option("--size", wa.size, "HxW")->required();
  window->add_option("--radius", wa.radius, "Support radius in pixels")->required();
  window->add_option("--beta", wa.beta, "Kaiser-Bessel shape")->capture_default_str();
  window->add_option("--eta", wa.eta, "Gaussian width as a fraction of the radius")->capture_default_str();
  window->add_option("--center", wa.center, "cx,cy (default W/2,H/2)");
  window->add_option("--out", wa.out, "Output file")->required();
  window->add_option("--format", wa.format, "csv | pgm")
      ->check(CLI::IsMember({"csv", "pgm"}))
      ->capture_default_str();

  SpectralArgs sa;
  auto* spectral = app.add_subcommand("spectral", "Low-pass kernel, profiles and leakage report");
  spectral->add_option("--size", sa.size, "HxW")->capture_default_str();
  spectral->add_option("--cutoff", sa.cutoff, "Cutoff radius in frequency bins")->capture_default_str();
  spectral->add_option("--alpha", sa.alpha, "Amplification factor")->capture_default_str();
  spectral->add_option("--seed", sa.seed, "Seed of the random feature map")->capture_default_str();
  spectral->add_option("--out-dir", sa.out_dir, "Existing output directory")->required();
  spectral->add_flag("--svg", sa.svg, "Also write profiles.svg");

  SearchArgs sea;
  std::uint64_t seed_value = 0;
  auto* search = app.add_subcommand("search", "Run the two-stage (alpha, beta) search");
  search->add_option("--config", sea.config, "JSON run configuration")->required();
  search->add_option("--out", sea.out, "Write the search document here");
  auto* seed_opt = search->add_option("--seed", seed_value, "Override the config seed");

  std::string trace, plot_out;
  auto* plot = app.add_subcommand("plot", "Render a search document as SVG");
  plot->add_option("--trace", trace, "Search document (JSON)")->required();
  plot->add_option("--out", plot_out, "Output SVG")->required();

  std::uint64_t verify_seed = 0;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "Check the library against brute-force oracles");
  verify->add_option("--seed", verify_seed)->capture_default_str();
  verify->add_option("--out", verify_out, "Write the oracle report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*window) return cmd_window(wa);
    if (*spectral) return cmd_spectral(sa);
    if (*search) {
      if (*seed_opt) sea.seed = seed_value;
      return cmd_search(sea);
    }
    if (*plot) return cmd_plot(trace, plot_out);
    if (*verify) return cmd_verify(verify_seed, verify_out);
  } catch (const UsageError& e) {
    fmt::print(stderr, "scdiff: {}\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "scdiff: {}\n", e.what());
    return kRuntime;
  }
  return kUsage;
}
