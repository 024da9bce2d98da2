#include "scdiff/feature_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>

#include "scdiff/errors.hpp"

namespace scdiff {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> encode_feature_map(const FeatureMap& x) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + 4 * x.size());
  for (std::size_t d : x.dims()) {
    if (d > std::numeric_limits<std::uint32_t>::max()) {
      throw std::invalid_argument("encode_feature_map: dimension exceeds uint32");
    }
    put_u32(out, static_cast<std::uint32_t>(d));
  }
  for (double v : x.values()) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

FeatureMap decode_feature_map(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 16) throw IoError("feature map: truncated header");
  std::size_t dims[4];
  std::size_t count = 1;
  for (int k = 0; k < 4; ++k) {
    dims[k] = get_u32(bytes.data() + 4 * k);
    count *= dims[k];
  }
  if (count == 0) throw IoError("feature map: zero dimension in header");
  if (bytes.size() != 16 + 4 * count) {
    throw IoError("feature map: payload is " + std::to_string(bytes.size() - 16) +
                             " bytes, header implies " + std::to_string(4 * count));
  }
  std::vector<double> values(count);
  for (std::size_t n = 0; n < count; ++n) {
    values[n] = std::bit_cast<float>(get_u32(bytes.data() + 16 + 4 * n));
  }
  return FeatureMap(dims[0], dims[1], dims[2], dims[3], std::move(values));
}

void write_feature_map(const FeatureMap& x, const std::filesystem::path& path) {
  const auto bytes = encode_feature_map(x);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failed: " + path.string());
}

FeatureMap read_feature_map(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  return decode_feature_map(bytes);
}

}  // namespace scdiff
