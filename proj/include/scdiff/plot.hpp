#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace scdiff {

/// Two panels: stage-1 queries (alpha, S) with the posterior-mean curve,
/// and the stage-2 trajectory (iteration, beta) of every run. Points carry
/// data-* attributes with the plotted values. Missing or empty traces give
/// axes only. Throws ConfigError when the document is not a search trace.
std::string render_search_svg(const nlohmann::json& doc);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/// Simple line chart of several series sharing one pair of axes.
std::string render_lines_svg(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<Series>& series);

}  // namespace scdiff
