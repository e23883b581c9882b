#pragma once

#include <cstddef>

namespace crossdyn::detail {

// Sum over i of exp(-((x - s_i)^2 - anchor) * inv_two_h2).
double kernel_sum(const double* s, std::size_t n, double x, double anchor, double inv_two_h2);

// Same weights; also returns the sum of (s_i - x) * weight_i in `weighted`.
double kernel_sum_weighted(const double* s, std::size_t n, double x, double anchor, double inv_two_h2,
                           double& weighted);

}  // namespace crossdyn::detail
