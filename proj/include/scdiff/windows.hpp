#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "scdiff/grid.hpp"

namespace scdiff {

enum class WindowKind { kaiser_bessel, gaussian, circular };

std::string_view to_string(WindowKind kind);
std::optional<WindowKind> parse_window_kind(std::string_view name);

/// Pixel coordinates of the window centroid: cx along columns, cy along rows.
struct Center {
  double cx = 0.0;
  double cy = 0.0;
};

struct WindowSpec {
  WindowKind kind = WindowKind::kaiser_bessel;
  std::size_t height = 0;
  std::size_t width = 0;
  double radius = 0.0;
  double beta = 0.0;  // kaiser_bessel only
  double eta = 0.5;   // gaussian only: stddev as a fraction of radius
  std::optional<Center> center;  // defaults to (W/2, H/2)

  Center resolved_center() const;
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Euclidean distance of pixel (row i, col j) from the centroid. Pixels are
/// measured at integer indices, not cell centers.
double radial_distance(double i, double j, Center center);

class Window {
 public:
  const Grid& values() const noexcept { return values_; }
  const WindowSpec& spec() const noexcept { return spec_; }
  std::size_t height() const noexcept { return values_.rows(); }
  std::size_t width() const noexcept { return values_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }

 private:
  friend Window build_window(const WindowSpec& spec);
  Window(WindowSpec spec, Grid values) : spec_(spec), values_(std::move(values)) {}

  WindowSpec spec_;
  Grid values_;
};

/// Builds a compactly supported window: every pixel with r > R is exactly 0.
///   kaiser_bessel: I0(beta * sqrt(1 - (r/R)^2)) / I0(beta)
///   gaussian:      exp(-r^2 / (2 (eta R)^2))
///   circular:      1
Window build_window(const WindowSpec& spec);

/// `count` bit-identical copies of the window, laid out slice after slice.
struct WindowStack {
  std::size_t count = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  std::span<const double> slice(std::size_t k) const {
    return std::span<const double>(values).subspan(k * height * width, height * width);
  }
};

WindowStack replicate(const Window& window, std::size_t count);

struct WindowSummary {
  double peak = 0.0;
  /// Largest value among support pixels at the maximal in-support radius.
  double edge = 0.0;
  std::size_t support = 0;
};

WindowSummary summarize(const Window& window);

}  // namespace scdiff
