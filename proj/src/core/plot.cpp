#include "scdiff/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string_view>

#include <fmt/format.h>

#include "scdiff/errors.hpp"
#include "scdiff/serialize.hpp"

namespace scdiff {
namespace {

using json = nlohmann::json;

constexpr double kPanelW = 420.0;
constexpr double kPanelH = 300.0;
constexpr double kMargin = 50.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Range finished(double fallback_lo, double fallback_hi) const {
    Range r = *this;
    if (!(r.lo <= r.hi)) return {fallback_lo, fallback_hi};
    if (r.hi - r.lo < 1e-12) {
      r.lo -= 0.5;
      r.hi += 0.5;
    }
    return r;
  }
};

// Maps data coordinates into one panel whose top-left corner is (ox, oy).
struct Panel {
  double ox, oy;
  Range x, y;

  double px(double v) const { return ox + kMargin + (v - x.lo) / (x.hi - x.lo) * (kPanelW - 1.5 * kMargin); }
  double py(double v) const { return oy + kPanelH - kMargin - (v - y.lo) / (y.hi - y.lo) * (kPanelH - 1.5 * kMargin); }

  void axes(std::string& svg, std::string_view title, std::string_view xl, std::string_view yl) const {
    const double x0 = ox + kMargin, x1 = ox + kPanelW - 0.5 * kMargin;
    const double y0 = oy + kPanelH - kMargin, y1 = oy + 0.5 * kMargin;
    svg += fmt::format("<g class=\"axes\">\n");
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", x0, y0, x1, y0);
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", x0, y0, x0, y1);
    for (int k = 0; k <= 4; ++k) {
      const double xv = x.lo + (x.hi - x.lo) * k / 4.0;
      const double yv = y.lo + (y.hi - y.lo) * k / 4.0;
      svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"middle\">{:.3g}</text>\n",
                         px(xv), y0 + 14, xv);
      svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"end\">{:.3g}</text>\n",
                         x0 - 4, py(yv) + 3, yv);
    }
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                       (x0 + x1) / 2, y0 + 30, escape(xl));
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 {:.2f} {:.2f})\">{}</text>\n",
                       ox + 14, (y0 + y1) / 2, ox + 14, (y0 + y1) / 2, escape(yl));
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
                       (x0 + x1) / 2, oy + 16, escape(title));
    svg += "</g>\n";
  }

  std::string polyline(const std::vector<std::pair<double, double>>& pts, std::string_view cls,
                       std::string_view color) const {
    std::string s = fmt::format("<polyline class=\"{}\" fill=\"none\" stroke=\"{}\" points=\"", cls, color);
    for (const auto& [a, b] : pts) s += fmt::format("{:.2f},{:.2f} ", px(a), py(b));
    s += "\"/>\n";
    return s;
  }
};

const json* array_at(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return nullptr;
  const auto& v = obj.at(key);
  if (!v.is_array()) throw ConfigError(std::string("trace field '") + key + "' must be an array");
  return &v;
}

double num(const json& v, const char* what) {
  if (!v.is_number()) throw ConfigError(std::string("trace field '") + what + "' must be a number");
  return v.get<double>();
}

std::string header(double w, double h) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      w, h, w, h);
}

}  // namespace

std::string render_search_svg(const json& doc) {
  if (!doc.is_object()) throw ConfigError("trace must be a JSON object");
  if (!doc.contains("schema") || !doc["schema"].is_string() ||
      doc["schema"].get<std::string>() != kSearchSchema) {
    throw ConfigError("trace schema must be \"" + std::string(kSearchSchema) + "\"");
  }

  // Stage 1: queried (alpha, S) plus the posterior mean.
  std::vector<std::pair<double, double>> points, curve;
  Range ax, ay;
  if (doc.contains("stage1") && !doc["stage1"].is_null()) {
    const auto& s1 = doc["stage1"];
    if (!s1.is_object()) throw ConfigError("trace field 'stage1' must be an object");
    if (const auto* b = array_at(s1, "bounds")) {
      if (b->size() != 2) throw ConfigError("trace field 'bounds' must have two entries");
      ax.add(num((*b)[0], "bounds"));
      ax.add(num((*b)[1], "bounds"));
    }
    if (const auto* recs = array_at(s1, "records")) {
      for (const auto& r : *recs) {
        if (!r.is_object() || !r.contains("alpha")) throw ConfigError("stage-1 record without alpha");
        if (!r.contains("value") || r["value"].is_null()) continue;
        points.emplace_back(num(r["alpha"], "alpha"), num(r["value"], "value"));
      }
    }
    if (const auto* pc = array_at(s1, "posterior_curve")) {
      for (const auto& p : *pc) {
        if (!p.is_array() || p.size() != 2) throw ConfigError("posterior_curve entries must be pairs");
        curve.emplace_back(num(p[0], "posterior_curve"), num(p[1], "posterior_curve"));
      }
    }
  }
  for (const auto& [a, s] : points) { ax.add(a); ay.add(s); }
  for (const auto& [a, m] : curve) { ax.add(a); ay.add(m); }

  // Stage 2: beta per iteration, one line per run.
  struct RunLine {
    std::vector<std::pair<double, double>> beta;
    std::vector<double> score;
  };
  std::vector<RunLine> runs;
  Range tx, by;
  if (doc.contains("stage2") && !doc["stage2"].is_null()) {
    const auto& s2 = doc["stage2"];
    if (!s2.is_object()) throw ConfigError("trace field 'stage2' must be an object");
    if (const auto* rs = array_at(s2, "runs")) {
      for (const auto& run : *rs) {
        RunLine line;
        if (const auto* steps = array_at(run, "steps")) {
          for (const auto& st : *steps) {
            if (!st.is_object()) throw ConfigError("stage-2 step must be an object");
            const double t = num(st.value("t", json()), "t");
            const double b = num(st.value("beta_after", json()), "beta_after");
            double s = std::numeric_limits<double>::quiet_NaN();
            if (st.contains("at_beta") && st["at_beta"].is_object()) {
              s = num(st["at_beta"].value("objective", json()), "objective");
            }
            line.beta.emplace_back(t, b);
            line.score.push_back(s);
            tx.add(t);
            by.add(b);
          }
        }
        runs.push_back(std::move(line));
      }
    }
  }

  Panel left{0.0, 0.0, ax.finished(0.0, 1.0), ay.finished(0.0, 1.0)};
  Panel right{kPanelW, 0.0, tx.finished(0.0, 1.0), by.finished(0.0, 1.0)};

  std::string svg = header(2 * kPanelW, kPanelH);
  left.axes(svg, "stage 1: amplification", "alpha", "score S");
  right.axes(svg, "stage 2: window shape", "iteration", "beta");

  if (!curve.empty()) svg += left.polyline(curve, "posterior-mean", "#888888");
  svg += "<g class=\"stage1-points\">\n";
  for (const auto& [a, s] : points) {
    svg += fmt::format(
        "<circle class=\"stage1-point\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"#1f77b4\" "
        "data-alpha=\"{:.17g}\" data-score=\"{:.17g}\"/>\n",
        left.px(a), left.py(s), a, s);
  }
  svg += "</g>\n<g class=\"stage2-runs\">\n";
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const char* color = kColors[k % std::size(kColors)];
    if (runs[k].beta.size() > 1) svg += right.polyline(runs[k].beta, "stage2-run", color);
    for (std::size_t i = 0; i < runs[k].beta.size(); ++i) {
      const auto [t, b] = runs[k].beta[i];
      svg += fmt::format(
          "<circle class=\"stage2-point\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"{}\" "
          "data-run=\"{}\" data-t=\"{:.17g}\" data-beta=\"{:.17g}\" data-score=\"{:.17g}\"/>\n",
          right.px(t), right.py(b), color, k, t, b, runs[k].score[i]);
    }
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

std::string render_lines_svg(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<Series>& series) {
  Range x, y;
  for (const auto& s : series) {
    for (const auto& [a, b] : s.points) { x.add(a); y.add(b); }
  }
  Panel p{0.0, 0.0, x.finished(0.0, 1.0), y.finished(0.0, 1.0)};
  std::string svg = header(kPanelW, kPanelH);
  p.axes(svg, title, x_label, y_label);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % std::size(kColors)];
    svg += p.polyline(series[k].points, "series", color);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" fill=\"{}\">{}</text>\n",
                       kPanelW - 150, 40 + 14.0 * k, color, escape(series[k].label));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace scdiff
