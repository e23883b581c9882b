// Built with -ffast-math so the loops vectorise through the libm vector exp.
// The summation order is then fixed by the compiled binary, not by the source.

#include "kernel_sum.hpp"

#include <cmath>

namespace crossdyn::detail {

double kernel_sum(const double* s, std::size_t n, double x, double anchor, double inv_two_h2) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x - s[i];
    sum += std::exp(-(d * d - anchor) * inv_two_h2);
  }
  return sum;
}

double kernel_sum_weighted(const double* s, std::size_t n, double x, double anchor, double inv_two_h2,
                           double& weighted) {
  double total = 0.0;
  double w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x - s[i];
    const double k = std::exp(-(d * d - anchor) * inv_two_h2);
    w -= d * k;
    total += k;
  }
  weighted = w;
  return total;
}

}  // namespace crossdyn::detail
