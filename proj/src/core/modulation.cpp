#include "scdiff/modulation.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace scdiff {

FeatureMap::FeatureMap(std::size_t batch, std::size_t channels, std::size_t height,
                       std::size_t width, double fill)
    : dims_{batch, channels, height, width}, values_(batch * channels * height * width, fill) {
  if (batch == 0 || channels == 0 || height == 0 || width == 0) {
    throw std::invalid_argument("FeatureMap: all dimensions must be positive");
  }
}

FeatureMap::FeatureMap(std::size_t batch, std::size_t channels, std::size_t height,
                       std::size_t width, std::vector<double> values)
    : dims_{batch, channels, height, width}, values_(std::move(values)) {
  if (batch == 0 || channels == 0 || height == 0 || width == 0) {
    throw std::invalid_argument("FeatureMap: all dimensions must be positive");
  }
  if (values_.size() != batch * channels * height * width) {
    throw std::invalid_argument("FeatureMap: value count " + std::to_string(values_.size()) +
                                " does not match B*C*H*W");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("FeatureMap: non-finite entry");
  }
}

FeatureMap random_feature_map(std::size_t batch, std::size_t channels, std::size_t height,
                              std::size_t width, std::uint64_t seed) {
  FeatureMap x(batch, channels, height, width);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : x.values()) v = dist(rng);
  return x;
}

std::string_view to_string(BlockTag tag) {
  switch (tag) {
    case BlockTag::down0: return "down0";
    case BlockTag::down1: return "down1";
    case BlockTag::down2: return "down2";
    case BlockTag::mid: return "mid";
  }
  return "unknown";
}

std::optional<BlockTag> parse_block_tag(std::string_view name) {
  if (name == "down0") return BlockTag::down0;
  if (name == "down1") return BlockTag::down1;
  if (name == "down2") return BlockTag::down2;
  if (name == "mid") return BlockTag::mid;
  return std::nullopt;
}

FeatureMap modulate(const FeatureMap& x, const Window& window, double alpha) {
  if (window.height() != x.height() || window.width() != x.width()) {
    throw std::invalid_argument("modulate: window is " + std::to_string(window.height()) + "x" +
                                std::to_string(window.width()) + " but feature map is " +
                                std::to_string(x.height()) + "x" + std::to_string(x.width()));
  }
  if (!std::isfinite(alpha)) throw std::invalid_argument("modulate: alpha must be finite");

  FeatureMap out = x;
  if (alpha == 1.0) return out;

  const auto w = window.values().values();
  const double gain = alpha - 1.0;
  for (std::size_t b = 0; b < x.batch(); ++b) {
    for (std::size_t c = 0; c < x.channels(); ++c) {
      auto dst = out.slice(b, c);
      for (std::size_t p = 0; p < dst.size(); ++p) {
        if (w[p] == 0.0) continue;
        // x (1 - w) + alpha x w == x + (alpha - 1) w x
        dst[p] += gain * w[p] * dst[p];
      }
    }
  }
  return out;
}

FeatureMap tokens_to_grid(const Grid& tokens, std::size_t height, std::size_t width) {
  if (tokens.rows() != height * width) {
    throw std::invalid_argument("tokens_to_grid: sequence length " + std::to_string(tokens.rows()) +
                                " != H*W = " + std::to_string(height * width));
  }
  const std::size_t channels = tokens.cols();
  FeatureMap x(1, channels, height, width);
  for (std::size_t k = 0; k < tokens.rows(); ++k) {
    for (std::size_t c = 0; c < channels; ++c) {
      x.at(0, c, k / width, k % width) = tokens(k, c);
    }
  }
  return x;
}

Grid grid_to_tokens(const FeatureMap& x) {
  if (x.batch() != 1) {
    throw std::invalid_argument("grid_to_tokens: batch must be 1, got " + std::to_string(x.batch()));
  }
  const std::size_t length = x.height() * x.width();
  Grid tokens(length, x.channels());
  for (std::size_t k = 0; k < length; ++k) {
    for (std::size_t c = 0; c < x.channels(); ++c) {
      tokens(k, c) = x.at(0, c, k / x.width(), k % x.width());
    }
  }
  return tokens;
}

}  // namespace scdiff
