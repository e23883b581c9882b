#include "crossdyn/kde.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numbers>

#include "crossdyn/error.hpp"
#include "crossdyn/stats.hpp"
#include "kernel_sum.hpp"

namespace crossdyn {

namespace {

// Kernel weights below exp(-kCutoffExponent) relative to the largest weight are dropped.
constexpr double kCutoffExponent = 40.0;

}  // namespace

void CrossSection::check() const {
  if (values.size() < 2) throw Error(ErrorCode::DegenerateData, "cross-section needs at least 2 values");
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "cross-section contains a non-finite value");
}

double silverman_bandwidth(const CrossSection& data, BandwidthOptions options) {
  data.check();
  const double sd = standard_deviation(data.values, options.unbiased_std);
  std::vector<double> sorted = data.values;
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double spread_iqr = iqr / 1.34;

  double spread = 0.0;
  if (sd > 0.0 && spread_iqr > 0.0) {
    spread = std::min(sd, spread_iqr);
  } else if (sd > 0.0) {
    spread = sd;
  } else if (spread_iqr > 0.0) {
    spread = spread_iqr;
  } else {
    throw Error(ErrorCode::DegenerateData, "data has zero dispersion (std and IQR are both 0)");
  }
  return 0.9 * spread * std::pow(static_cast<double>(sorted.size()), -0.2);
}

DensityModel::DensityModel(std::vector<double> samples, double bandwidth) : bandwidth_(bandwidth) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "density model needs at least one sample");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive and finite");
  for (double v : samples)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "density model sample is not finite");
  auto sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  samples_ = std::make_shared<const std::vector<double>>(std::move(samples));
  sorted_ = std::make_shared<const std::vector<double>>(std::move(sorted));
}

DensityModel DensityModel::fit(const CrossSection& data, BandwidthOptions options) {
  const double h = silverman_bandwidth(data, options);
  return DensityModel(data.values, h);
}

DensityModel::Window DensityModel::window(double x) const {
  const auto& s = *sorted_;
  auto it = std::lower_bound(s.begin(), s.end(), x);
  double nearest = std::numeric_limits<double>::infinity();
  if (it != s.end()) nearest = *it - x;
  if (it != s.begin()) nearest = std::min(nearest, x - *std::prev(it));
  const double anchor = nearest * nearest;
  const double radius = std::sqrt(anchor + 2.0 * bandwidth_ * bandwidth_ * kCutoffExponent);
  const auto first = std::lower_bound(s.begin(), s.end(), x - radius);
  const auto last = std::upper_bound(first, s.end(), x + radius);
  return {static_cast<std::size_t>(first - s.begin()), static_cast<std::size_t>(last - s.begin()), anchor};
}

double DensityModel::log_pdf(double x) const {
  const auto& s = *sorted_;
  const Window w = window(x);
  const double inv_two_h2 = 1.0 / (2.0 * bandwidth_ * bandwidth_);
  const double sum = detail::kernel_sum(s.data() + w.first, w.last - w.first, x, w.anchor, inv_two_h2);
  const double n = static_cast<double>(s.size());
  return std::log(sum) - w.anchor * inv_two_h2 - std::log(n * bandwidth_ * std::sqrt(2.0 * std::numbers::pi));
}

double DensityModel::pdf(double x) const { return std::exp(log_pdf(x)); }

double DensityModel::log_pdf_derivative(double x) const {
  const auto& s = *sorted_;
  const Window w = window(x);
  const double h2 = bandwidth_ * bandwidth_;
  const double inv_two_h2 = 1.0 / (2.0 * h2);
  double weighted = 0.0;
  const double total =
      detail::kernel_sum_weighted(s.data() + w.first, w.last - w.first, x, w.anchor, inv_two_h2, weighted);
  return weighted / (h2 * total);
}

double DensityModel::cdf(double x) const {
  double sum = 0.0;
  for (double v : *sorted_) sum += normal_cdf((x - v) / bandwidth_);
  return sum / static_cast<double>(sorted_->size());
}

}  // namespace crossdyn
