#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "scdiff/modulation.hpp"

namespace scdiff {

// Flat binary feature-map format: a 16-byte header of four little-endian
// uint32 dims (B, C, H, W) followed by B*C*H*W little-endian float32 values
// in FeatureMap::index order. Values are narrowed to float32 on write.

std::vector<std::uint8_t> encode_feature_map(const FeatureMap& x);
FeatureMap decode_feature_map(const std::vector<std::uint8_t>& bytes);

void write_feature_map(const FeatureMap& x, const std::filesystem::path& path);
FeatureMap read_feature_map(const std::filesystem::path& path);

}  // namespace scdiff
