#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace crossdyn {

double mean(std::span<const double> values);

/// Standard deviation; `unbiased` selects the n-1 denominator.
double standard_deviation(std::span<const double> values, bool unbiased = true);

/// Quantile by linear interpolation between order statistics
/// (h = (n-1)p, the usual "type 7" definition). Input need not be sorted.
double quantile(std::span<const double> values, double p);

/// Same as quantile() but skips the sort; `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double p);

double median(std::span<const double> values);

/// Standard normal CDF.
double normal_cdf(double z);

/// Composite trapezoid rule over (possibly non-uniform) nodes.
double trapezoid(std::span<const double> x, std::span<const double> y);

/// Uniform nodes lo, ..., hi (count >= 2, both ends included exactly).
std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Derives an independent stream seed from a base seed and a stream index
/// (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace crossdyn
