#include "scdiff/windows.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "scdiff/special_fns.hpp"

namespace scdiff {

std::string_view to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::kaiser_bessel: return "kaiser_bessel";
    case WindowKind::gaussian: return "gaussian";
    case WindowKind::circular: return "circular";
  }
  return "unknown";
}

std::optional<WindowKind> parse_window_kind(std::string_view name) {
  if (name == "kaiser_bessel" || name == "kaiser") return WindowKind::kaiser_bessel;
  if (name == "gaussian") return WindowKind::gaussian;
  if (name == "circular") return WindowKind::circular;
  return std::nullopt;
}

Center WindowSpec::resolved_center() const {
  if (center) return *center;
  return Center{static_cast<double>(width) / 2.0, static_cast<double>(height) / 2.0};
}

void WindowSpec::validate() const {
  if (height < 1) throw std::invalid_argument("WindowSpec.height must be >= 1");
  if (width < 1) throw std::invalid_argument("WindowSpec.width must be >= 1");
  if (!std::isfinite(radius) || radius <= 0.0) {
    throw std::invalid_argument("WindowSpec.radius must be a positive finite number");
  }
  if (kind == WindowKind::kaiser_bessel && (!std::isfinite(beta) || beta < 0.0)) {
    throw std::invalid_argument("WindowSpec.beta must be a non-negative finite number");
  }
  if (kind == WindowKind::gaussian && (!std::isfinite(eta) || eta <= 0.0 || eta > 2.0)) {
    throw std::invalid_argument("WindowSpec.eta must lie in (0, 2]");
  }
  if (center && (!std::isfinite(center->cx) || !std::isfinite(center->cy))) {
    throw std::invalid_argument("WindowSpec.center must be finite");
  }
}

double radial_distance(double i, double j, Center center) {
  const double di = i - center.cy;
  const double dj = j - center.cx;
  return std::sqrt(di * di + dj * dj);
}

Window build_window(const WindowSpec& spec) {
  spec.validate();
  const Center c = spec.resolved_center();
  const double R = spec.radius;
  Grid values(spec.height, spec.width, 0.0);

  const double i0_beta = spec.kind == WindowKind::kaiser_bessel ? bessel_i0(spec.beta) : 1.0;
  const double sigma = spec.eta * R;

  for (std::size_t i = 0; i < spec.height; ++i) {
    for (std::size_t j = 0; j < spec.width; ++j) {
      const double r = radial_distance(static_cast<double>(i), static_cast<double>(j), c);
      if (r > R) continue;
      double w = 1.0;
      switch (spec.kind) {
        case WindowKind::kaiser_bessel: {
          const double u = r / R;
          const double arg = spec.beta * std::sqrt(std::max(0.0, 1.0 - u * u));
          w = bessel_i0(arg) / i0_beta;
          break;
        }
        case WindowKind::gaussian:
          w = std::exp(-(r * r) / (2.0 * sigma * sigma));
          break;
        case WindowKind::circular:
          break;
      }
      values(i, j) = w;
    }
  }
  return Window(spec, std::move(values));
}

WindowStack replicate(const Window& window, std::size_t count) {
  if (count == 0) throw std::invalid_argument("replicate: count must be >= 1");
  WindowStack stack{count, window.height(), window.width(), {}};
  const auto src = window.values().values();
  stack.values.reserve(count * src.size());
  for (std::size_t k = 0; k < count; ++k) {
    stack.values.insert(stack.values.end(), src.begin(), src.end());
  }
  return stack;
}

WindowSummary summarize(const Window& window) {
  WindowSummary s;
  const Center c = window.spec().resolved_center();
  double edge_r = -1.0;
  for (std::size_t i = 0; i < window.height(); ++i) {
    for (std::size_t j = 0; j < window.width(); ++j) {
      const double r = radial_distance(static_cast<double>(i), static_cast<double>(j), c);
      if (r > window.spec().radius) continue;
      const double v = window(i, j);
      ++s.support;
      s.peak = std::max(s.peak, v);
      if (r > edge_r) {
        edge_r = r;
        s.edge = v;
      } else if (r == edge_r) {
        s.edge = std::max(s.edge, v);
      }
    }
  }
  return s;
}

}  // namespace scdiff
