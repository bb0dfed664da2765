#include "csi/normal.hpp"

#include <cmath>

namespace csi {

namespace {

// Phi(-x) for x >= 0.
double lower_tail_of_abs(double x) {
  const double e = std::exp(-x * x / 2.0);
  if (x < 7.07106781186547) {
    double num = 3.52624965998911e-02 * x + 0.700383064443688;
    num = num * x + 6.37396220353165;
    num = num * x + 33.912866078383;
    num = num * x + 112.079291497871;
    num = num * x + 221.213596169931;
    num = num * x + 220.206867912376;
    double den = 8.83883476483184e-02 * x + 1.75566716318264;
    den = den * x + 16.064177579207;
    den = den * x + 86.7807322029461;
    den = den * x + 296.564248779674;
    den = den * x + 637.333633378831;
    den = den * x + 793.826512519948;
    den = den * x + 440.413735824752;
    return e * num / den;
  }
  // Continued fraction for large x.
  double cf = x + 0.65;
  cf = x + 4.0 / cf;
  cf = x + 3.0 / cf;
  cf = x + 2.0 / cf;
  cf = x + 1.0 / cf;
  return e / cf / 2.506628274631;
}

}  // namespace

double normal_cdf(double z) {
  if (std::isnan(z)) return z;
  const double tail = lower_tail_of_abs(std::abs(z));
  return z > 0.0 ? 1.0 - tail : tail;
}

double normal_upper_tail(double z) {
  if (std::isnan(z)) return z;
  const double tail = lower_tail_of_abs(std::abs(z));
  return z > 0.0 ? tail : 1.0 - tail;
}

}  // namespace csi
