#pragma once

namespace csi {

/// Standard normal CDF.
///
/// Hart's double-precision rational approximation (Algorithm 5666, as
/// restated by West, "Better approximations to cumulative normal functions",
/// 2005). Absolute error is below 1e-14 everywhere; the tails keep full
/// relative precision until exp(-z^2/2) underflows.
double normal_cdf(double z);

/// P(Z > z) for standard normal Z, computed without cancellation.
double normal_upper_tail(double z);

}  // namespace csi
