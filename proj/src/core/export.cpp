#include "scdiff/export.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace scdiff {

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

void write_grid_csv(std::ostream& out, const Grid& grid) {
  std::string line;
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    line.clear();
    for (std::size_t j = 0; j < grid.cols(); ++j) {
      if (j) line += ',';
      line += format_number(grid(i, j));
    }
    line += '\n';
    out << line;
  }
}

void write_pgm(std::ostream& out, const Grid& grid, double lo, double hi) {
  out << "P2\n" << grid.cols() << ' ' << grid.rows() << "\n255\n";
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    for (std::size_t j = 0; j < grid.cols(); ++j) {
      const double t = std::clamp((grid(i, j) - lo) / span, 0.0, 1.0);
      if (j) out << ' ';
      out << static_cast<int>(std::lround(t * 255.0));
    }
    out << '\n';
  }
}

void write_xy_csv(std::ostream& out, const std::string& x_name, const std::string& y_name,
                  const std::vector<std::pair<double, double>>& rows) {
  out << x_name << ',' << y_name << '\n';
  for (const auto& [x, y] : rows) out << format_number(x) << ',' << format_number(y) << '\n';
}

}  // namespace scdiff
