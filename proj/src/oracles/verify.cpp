#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "scdiff/bayesopt.hpp"
#include "scdiff/evaluators.hpp"
#include "scdiff/gp.hpp"
#include "scdiff/oracles.hpp"
#include "scdiff/special_fns.hpp"
#include "scdiff/spectral.hpp"

namespace scdiff::oracle {
namespace {

using json = nlohmann::json;

// FNV-1a over a textual description of the inputs.
std::string digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

OracleReport report(std::string name, const std::string& inputs, json values, double tol,
                    double observed, bool passed) {
  return {std::move(name), digest(inputs), std::move(values), tol, observed, passed};
}

double max_rel(const Grid& a, const Grid& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::fabs(a.values()[i] - b.values()[i]));
    scale = std::max(scale, std::fabs(b.values()[i]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

Grid random_grid(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Grid g(rows, cols);
  for (auto& v : g.values()) v = u(rng);
  return g;
}

}  // namespace

json to_json(const OracleReport& r) {
  return {{"name", r.name},         {"inputs_digest", r.inputs_digest}, {"values", r.values},
          {"tolerance", r.tolerance}, {"observed", r.observed},         {"passed", r.passed}};
}

std::vector<OracleReport> run_verification(std::uint64_t seed) {
  std::vector<OracleReport> out;
  std::mt19937_64 rng(seed);

  {
    double worst = 0.0;
    const auto xs = linspace(0.0, 20.0, 200);
    for (double x : xs) {
      const double ref = bessel_i0_series(x);
      worst = std::max(worst, std::fabs(bessel_i0(x) - ref) / ref);
    }
    out.push_back(report("bessel_i0_vs_series", "linspace(0,20,200)",
                         {{"max_rel_error", worst}}, 1e-10, worst, worst <= 1e-10));
  }
  {
    double worst = 0.0;
    for (double x : linspace(0.0, 20.0, 20)) {
      const double ref = bessel_i0_quadrature(x);
      worst = std::max(worst, std::fabs(bessel_i0(x) - ref) / ref);
    }
    out.push_back(report("bessel_i0_vs_quadrature", "linspace(0,20,20)",
                         {{"max_rel_error", worst}}, 1e-8, worst, worst <= 1e-8));
  }
  {
    double worst = 0.0;
    for (double x : linspace(-25.0, 25.0, 101)) {
      worst = std::max(worst, std::fabs(bessel_j1(x) - bessel_j1_series(x)));
    }
    out.push_back(report("bessel_j1_vs_series", "linspace(-25,25,101)",
                         {{"max_abs_error", worst}}, 1e-10, worst, worst <= 1e-10));
  }
  {
    const auto kernel = mask_to_kernel(make_freq_mask(32, 32, 6.0));
    const Grid ref = direct_disc_kernel(32, 32, 6.0);
    const double err = max_rel(kernel.values, ref);
    out.push_back(report("disc_kernel_vs_direct_dft", "32x32 cutoff=6",
                         {{"max_rel_error", err}}, 1e-9, err, err <= 1e-9));
  }
  {
    const Grid x = random_grid(16, 16, rng);
    const Grid k = random_grid(16, 16, rng);
    const double err = max_rel(convolve_centered(x, k), brute_convolve(x, k));
    out.push_back(report("fft_convolution_vs_brute", fmt::format("16x16 seed={}", seed),
                         {{"max_rel_error", err}}, 1e-9, err, err <= 1e-9));
  }
  {
    std::uniform_real_distribution<double> u(-1.0, 1.0), s(0.05, 1.0);
    double worst = 0.0;
    json triples = json::array();
    for (int i = 0; i < 5; ++i) {
      const double mu = u(rng), sigma = s(rng), fb = u(rng);
      const auto mc = mc_expected_improvement(mu, sigma, fb, 200000, seed + i);
      const double z = std::fabs(expected_improvement(mu, sigma, fb) - mc.mean) / mc.stderr_;
      worst = std::max(worst, z);
      triples.push_back({mu, sigma, fb, mc.mean});
    }
    out.push_back(report("ei_vs_monte_carlo", fmt::format("5 triples seed={}", seed),
                         {{"max_z", worst}, {"triples", triples}}, 3.0, worst, worst <= 3.0));
  }
  {
    const std::vector<double> xs{1.7, 3.9, 6.4}, ys{0.21, 0.35, 0.18};
    const GpHyperparams hp{0.3, 0.02, 1e-6};
    std::vector<Observation> obs;
    for (std::size_t i = 0; i < xs.size(); ++i) obs.push_back({xs[i], ys[i]});
    const auto model = GpModel::condition(obs, hp, {1.5, 8.0, false});
    double worst = 0.0;
    for (double x : linspace(1.5, 8.0, 27)) {
      const auto p = model.posterior(x);
      const auto d = dense_gp_posterior(xs, ys, hp.length_scale, hp.signal_var, hp.noise_var, 1.5, 8.0, x);
      worst = std::max({worst, std::fabs(p.mean - d.mean), std::fabs(p.stddev * p.stddev - d.variance)});
    }
    out.push_back(report("gp_vs_dense_inverse", "3 points, 27 queries",
                         {{"max_abs_error", worst}}, 1e-9, worst, worst <= 1e-9));
  }
  {
    const auto opt = grid_search(
        [](double a, double b) { return vsml_score(peak_s_text(a, b), peak_s_img(a), 1.0); },
        [](double a, double) { return constraint_g(peak_s_img(a), 0.7); },
        linspace(1.5, 8.0, 200), linspace(6.0, 12.0, 200));
    out.push_back(report("peak_grid_optimum", "200x200 over [1.5,8]x[6,12], tau=0.7, lambda=1",
                         {{"found", opt.found}, {"alpha", opt.alpha}, {"beta", opt.beta}, {"score", opt.score}},
                         0.0, opt.score, opt.found));
  }
  return out;
}

json verification_document(const std::vector<OracleReport>& reports, std::uint64_t seed) {
  json arr = json::array();
  bool all = true;
  for (const auto& r : reports) {
    arr.push_back(to_json(r));
    all = all && r.passed;
  }
  return {{"schema", "scdiff-oracles/1"}, {"seed", seed}, {"passed", all}, {"reports", arr}};
}

}  // namespace scdiff::oracle
