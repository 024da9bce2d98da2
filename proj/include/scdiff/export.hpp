#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "scdiff/grid.hpp"

namespace scdiff {

/// Formats with 17 significant digits (round-trips any double).
std::string format_number(double v);

/// One row per grid row, comma separated.
void write_grid_csv(std::ostream& out, const Grid& grid);

/// Plain (P2) PGM, 8-bit, values mapped linearly from [lo, hi].
void write_pgm(std::ostream& out, const Grid& grid, double lo = 0.0, double hi = 1.0);

/// Two-column CSV with a header line.
void write_xy_csv(std::ostream& out, const std::string& x_name, const std::string& y_name,
                  const std::vector<std::pair<double, double>>& rows);

}  // namespace scdiff
