#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "scdiff/grid.hpp"
#include "scdiff/windows.hpp"

namespace scdiff {

/// B x C x H x W real tensor, row-major with W fastest then H, C, B.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::size_t batch, std::size_t channels, std::size_t height, std::size_t width,
             double fill = 0.0);
  FeatureMap(std::size_t batch, std::size_t channels, std::size_t height, std::size_t width,
             std::vector<double> values);

  std::size_t batch() const noexcept { return dims_[0]; }
  std::size_t channels() const noexcept { return dims_[1]; }
  std::size_t height() const noexcept { return dims_[2]; }
  std::size_t width() const noexcept { return dims_[3]; }
  const std::array<std::size_t, 4>& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::size_t index(std::size_t b, std::size_t c, std::size_t i, std::size_t j) const noexcept {
    return ((b * dims_[1] + c) * dims_[2] + i) * dims_[3] + j;
  }
  double& at(std::size_t b, std::size_t c, std::size_t i, std::size_t j) {
    return values_[index(b, c, i, j)];
  }
  double at(std::size_t b, std::size_t c, std::size_t i, std::size_t j) const {
    return values_[index(b, c, i, j)];
  }

  /// One H x W slice.
  std::span<double> slice(std::size_t b, std::size_t c) {
    return std::span<double>(values_).subspan(index(b, c, 0, 0), dims_[2] * dims_[3]);
  }
  std::span<const double> slice(std::size_t b, std::size_t c) const {
    return std::span<const double>(values_).subspan(index(b, c, 0, 0), dims_[2] * dims_[3]);
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const FeatureMap&) const = default;

 private:
  std::array<std::size_t, 4> dims_{0, 0, 0, 0};
  std::vector<double> values_;
};

/// Uniform(-1, 1) entries from a seeded engine.
FeatureMap random_feature_map(std::size_t batch, std::size_t channels, std::size_t height,
                              std::size_t width, std::uint64_t seed);

/// Encoder blocks eligible for modulation. Upsampling blocks are excluded.
enum class BlockTag { down0, down1, down2, mid };

std::string_view to_string(BlockTag tag);
std::optional<BlockTag> parse_block_tag(std::string_view name);

struct ModulationParams {
  double alpha = 1.0;
  const Window* window = nullptr;
};

/// out = x (1 - w) + alpha x w, with w replicated over every (b, c) slice.
/// Pixels with w == 0, and every pixel when alpha == 1, are copied
/// bit-exactly. alpha is not clamped.
FeatureMap modulate(const FeatureMap& x, const Window& window, double alpha);
inline FeatureMap modulate(const FeatureMap& x, const ModulationParams& params) {
  if (params.window == nullptr) throw std::invalid_argument("modulate: missing window");
  return modulate(x, *params.window, params.alpha);
}

/// Sequence (L x D, row k = token k) to a 1 x D x H x W map; token k lands
/// at (k / W, k % W).
FeatureMap tokens_to_grid(const Grid& tokens, std::size_t height, std::size_t width);

/// Inverse of tokens_to_grid. Requires batch == 1.
Grid grid_to_tokens(const FeatureMap& x);

}  // namespace scdiff
