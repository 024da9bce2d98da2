#pragma once

// Scalar special functions for the window profiles and the acquisition
// function. Pure; std::domain_error on non-finite input.

namespace scdiff {

/// Zeroth-order modified Bessel function of the first kind.
/// Relative error below 1e-10 on [0, 50]. I0 is even, so negative
/// arguments are folded onto |x|.
double bessel_i0(double x);

/// First-order Bessel function of the first kind. Absolute error below
/// 1e-9 for |x| <= 100.
double bessel_j1(double x);

double std_normal_pdf(double x);
double std_normal_cdf(double x);

}  // namespace scdiff
