#include "scdiff/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "scdiff/special_fns.hpp"

namespace scdiff {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t wrap(std::ptrdiff_t k, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((k % m) + m) % m);
}

// Centered index p <-> standard index (p - n/2) mod n.
Grid to_standard(const Grid& centered) {
  const std::size_t H = centered.rows();
  const std::size_t W = centered.cols();
  Grid out(H, W);
  for (std::size_t p = 0; p < H; ++p) {
    for (std::size_t q = 0; q < W; ++q) {
      out(wrap(static_cast<std::ptrdiff_t>(p) - static_cast<std::ptrdiff_t>(H / 2), H),
          wrap(static_cast<std::ptrdiff_t>(q) - static_cast<std::ptrdiff_t>(W / 2), W)) =
          centered(p, q);
    }
  }
  return out;
}

Grid to_centered(const Grid& standard) {
  const std::size_t H = standard.rows();
  const std::size_t W = standard.cols();
  Grid out(H, W);
  for (std::size_t p = 0; p < H; ++p) {
    for (std::size_t q = 0; q < W; ++q) {
      out(p, q) = standard(wrap(static_cast<std::ptrdiff_t>(p) - static_cast<std::ptrdiff_t>(H / 2), H),
                           wrap(static_cast<std::ptrdiff_t>(q) - static_cast<std::ptrdiff_t>(W / 2), W));
    }
  }
  return out;
}

std::vector<std::complex<double>> to_complex(std::span<const double> v) {
  return std::vector<std::complex<double>>(v.begin(), v.end());
}

}  // namespace

void dft2d(std::vector<std::complex<double>>& data, std::size_t rows, std::size_t cols, int sign) {
  if (data.size() != rows * cols) throw std::invalid_argument("dft2d: buffer size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  std::lock_guard lock(planner_mutex());
  fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), buf, buf,
                                    sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  if (plan == nullptr) throw std::runtime_error("dft2d: FFTW planning failed");
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

std::size_t FreqMask::ones() const {
  std::size_t n = 0;
  for (double v : values.values()) n += v != 0.0 ? 1 : 0;
  return n;
}

FreqMask make_freq_mask(std::size_t height, std::size_t width, double cutoff) {
  if (height == 0 || width == 0) throw std::invalid_argument("make_freq_mask: empty grid");
  if (!std::isfinite(cutoff) || cutoff <= 0.0) {
    throw std::invalid_argument("make_freq_mask: cutoff must be positive");
  }
  FreqMask mask{height, width, cutoff, Grid(height, width)};
  const double c2 = cutoff * cutoff;
  for (std::size_t p = 0; p < height; ++p) {
    const double fu = static_cast<double>(p) - static_cast<double>(height / 2);
    for (std::size_t q = 0; q < width; ++q) {
      const double fv = static_cast<double>(q) - static_cast<double>(width / 2);
      mask.values(p, q) = fu * fu + fv * fv <= c2 ? 1.0 : 0.0;
    }
  }
  return mask;
}

bool is_negation_symmetric(const Grid& centered_mask) {
  const Grid s = to_standard(centered_mask);
  const std::size_t H = s.rows();
  const std::size_t W = s.cols();
  for (std::size_t k = 0; k < H; ++k) {
    for (std::size_t l = 0; l < W; ++l) {
      if (s(k, l) != s((H - k) % H, (W - l) % W)) return false;
    }
  }
  return true;
}

SpatialKernel mask_to_kernel(const FreqMask& mask) {
  const std::size_t H = mask.values.rows();
  const std::size_t W = mask.values.cols();
  if (H != mask.height || W != mask.width) {
    throw std::invalid_argument("mask_to_kernel: mask dims disagree with its values");
  }
  for (double v : mask.values.values()) {
    if (v != 0.0 && v != 1.0) throw std::invalid_argument("mask_to_kernel: mask is not binary");
  }
  if (!is_negation_symmetric(mask.values)) {
    throw std::invalid_argument("mask_to_kernel: mask is not symmetric under frequency negation");
  }

  auto buf = to_complex(to_standard(mask.values).values());
  dft2d(buf, H, W, +1);
  const double scale = 1.0 / static_cast<double>(H * W);

  Grid real_part(H, W);
  double residue = 0.0;
  for (std::size_t n = 0; n < buf.size(); ++n) {
    real_part.values()[n] = buf[n].real() * scale;
    residue = std::max(residue, std::abs(buf[n].imag() * scale));
  }

  SpatialKernel k;
  k.values = to_centered(real_part);
  k.imag_residue = residue;
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      if (std::abs(k.values(i, j)) > std::abs(k.peak)) {
        k.peak = k.values(i, j);
        k.peak_row = i;
        k.peak_col = j;
      }
    }
  }
  if (residue > 1e-9 * std::max(std::abs(k.peak), 1e-300)) {
    throw std::invalid_argument("mask_to_kernel: imaginary residue " + std::to_string(residue) +
                                " exceeds tolerance");
  }
  return k;
}

double jinc(double cycles_per_pixel, double r) {
  if (!std::isfinite(cycles_per_pixel) || !std::isfinite(r)) {
    throw std::domain_error("jinc: non-finite argument");
  }
  if (cycles_per_pixel <= 0.0) throw std::domain_error("jinc: cutoff must be positive");
  if (r == 0.0) return std::numbers::pi * cycles_per_pixel;
  return bessel_j1(2.0 * std::numbers::pi * cycles_per_pixel * r) / r;
}

FeatureMap freq_amplify(const FeatureMap& x, double cutoff, double alpha) {
  if (!std::isfinite(alpha)) throw std::invalid_argument("freq_amplify: alpha must be finite");
  const std::size_t H = x.height();
  const std::size_t W = x.width();
  const Grid mask = to_standard(make_freq_mask(H, W, cutoff).values);
  const double scale = 1.0 / static_cast<double>(H * W);

  FeatureMap out = x;
  for (std::size_t b = 0; b < x.batch(); ++b) {
    for (std::size_t c = 0; c < x.channels(); ++c) {
      auto buf = to_complex(x.slice(b, c));
      dft2d(buf, H, W, -1);
      for (std::size_t n = 0; n < buf.size(); ++n) {
        if (mask.values()[n] != 0.0) buf[n] *= alpha;
      }
      dft2d(buf, H, W, +1);
      auto dst = out.slice(b, c);
      for (std::size_t n = 0; n < buf.size(); ++n) dst[n] = buf[n].real() * scale;
    }
  }
  return out;
}

double leakage(const FeatureMap& original, const FeatureMap& edited, double radius, Center center) {
  if (original.dims() != edited.dims()) throw std::invalid_argument("leakage: dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < original.height(); ++i) {
    for (std::size_t j = 0; j < original.width(); ++j) {
      if (radial_distance(static_cast<double>(i), static_cast<double>(j), center) <= radius) continue;
      for (std::size_t b = 0; b < original.batch(); ++b) {
        for (std::size_t c = 0; c < original.channels(); ++c) {
          worst = std::max(worst, std::abs(edited.at(b, c, i, j) - original.at(b, c, i, j)));
        }
      }
    }
  }
  return worst;
}

Grid convolve_centered(const Grid& x, const Grid& kernel) {
  if (x.rows() != kernel.rows() || x.cols() != kernel.cols()) {
    throw std::invalid_argument("convolve_centered: dimension mismatch");
  }
  const std::size_t H = x.rows();
  const std::size_t W = x.cols();
  auto fx = to_complex(x.values());
  auto fk = to_complex(to_standard(kernel).values());
  dft2d(fx, H, W, -1);
  dft2d(fk, H, W, -1);
  for (std::size_t n = 0; n < fx.size(); ++n) fx[n] *= fk[n];
  dft2d(fx, H, W, +1);
  Grid out(H, W);
  const double scale = 1.0 / static_cast<double>(H * W);
  for (std::size_t n = 0; n < fx.size(); ++n) out.values()[n] = fx[n].real() * scale;
  return out;
}

std::vector<double> radial_profile(const Grid& centered_kernel) {
  const std::size_t H = centered_kernel.rows();
  const std::size_t W = centered_kernel.cols();
  const std::size_t max_r = std::min(H, W) / 2;
  std::vector<double> sum(max_r + 1, 0.0);
  std::vector<std::size_t> count(max_r + 1, 0);
  const Center origin{static_cast<double>(W / 2), static_cast<double>(H / 2)};
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      const double r = radial_distance(static_cast<double>(i), static_cast<double>(j), origin);
      const auto k = static_cast<std::size_t>(std::lround(r));
      if (k > max_r) continue;
      sum[k] += centered_kernel(i, j);
      ++count[k];
    }
  }
  for (std::size_t k = 0; k <= max_r; ++k) {
    if (count[k] > 0) sum[k] /= static_cast<double>(count[k]);
  }
  return sum;
}

}  // namespace scdiff
