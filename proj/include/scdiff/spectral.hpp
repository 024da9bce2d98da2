#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "scdiff/grid.hpp"
#include "scdiff/modulation.hpp"
#include "scdiff/windows.hpp"

namespace scdiff {

// DFT convention: forward unnormalized, inverse scaled by 1/(H W).
// Masks and kernels are stored centered: index (H/2, W/2) (integer
// division) holds the zero frequency / zero displacement.

/// Hard circular low-pass mask: 1 where the signed bin offset (fu, fv)
/// satisfies fu^2 + fv^2 <= cutoff^2.
struct FreqMask {
  std::size_t height = 0;
  std::size_t width = 0;
  double cutoff = 0.0;
  Grid values;  // centered, entries in {0, 1}

  std::size_t ones() const;
};

FreqMask make_freq_mask(std::size_t height, std::size_t width, double cutoff);

/// True when M(f) == M(-f) for every bin, i.e. the inverse DFT is real.
bool is_negation_symmetric(const Grid& centered_mask);

struct SpatialKernel {
  Grid values;  // centered
  std::size_t peak_row = 0;
  std::size_t peak_col = 0;
  double peak = 0.0;
  double imag_residue = 0.0;  // max |Im| before it was discarded
};

/// Centered inverse DFT of the mask. Throws std::invalid_argument for an
/// asymmetric mask or when the imaginary residue exceeds 1e-9 of the peak.
SpatialKernel mask_to_kernel(const FreqMask& mask);

/// J1(2 pi fc r) / r with fc in cycles per pixel; pi fc at r = 0.
double jinc(double cycles_per_pixel, double r);

/// Frequency-domain baseline: per (b, c) slice, bins inside the circular
/// cutoff are multiplied by alpha and the real part of the inverse is kept.
FeatureMap freq_amplify(const FeatureMap& x, double cutoff, double alpha);

/// Max |edited - original| over all entries whose pixel lies outside radius.
double leakage(const FeatureMap& original, const FeatureMap& edited, double radius, Center center);

/// Circular convolution with a centered kernel, via the DFT.
Grid convolve_centered(const Grid& x, const Grid& kernel);

/// Mean kernel value over pixels whose distance to the centered origin
/// rounds to k, for k = 0 .. min(H, W) / 2.
std::vector<double> radial_profile(const Grid& centered_kernel);

/// Low-level 2D DFT on a row-major complex buffer. sign = -1 forward,
/// +1 inverse (unnormalized both ways).
void dft2d(std::vector<std::complex<double>>& data, std::size_t rows, std::size_t cols, int sign);

}  // namespace scdiff
