#include "crossdyn/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crossdyn/error.hpp"
#include "crossdyn/stats.hpp"

namespace crossdyn {

namespace {

double bisect_zero(const EnergyLandscape& landscape, double lo, double hi, double f_lo, double tolerance) {
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = landscape.force(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Removes the shallowest attractor/tipping pair until every barrier reaches min_barrier.
void merge_shallow(const EnergyLandscape& landscape, LandscapeFeatures& features, double min_barrier) {
  auto& att = features.attractors;
  auto& tip = features.tipping_points;
  while (!tip.empty()) {
    std::size_t worst = 0;
    double worst_barrier = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < tip.size(); ++k) {
      const double top = landscape.energy(tip[k]);
      const double barrier = top - std::max(landscape.energy(att[k]), landscape.energy(att[k + 1]));
      if (barrier < worst_barrier) {
        worst_barrier = barrier;
        worst = k;
      }
    }
    if (worst_barrier >= min_barrier) break;
    const bool drop_left = landscape.energy(att[worst]) > landscape.energy(att[worst + 1]);
    att.erase(att.begin() + static_cast<std::ptrdiff_t>(drop_left ? worst : worst + 1));
    tip.erase(tip.begin() + static_cast<std::ptrdiff_t>(worst));
  }
}

}  // namespace

LandscapeFeatures find_features(const EnergyLandscape& landscape, double x_min, double x_max,
                                FeatureScanOptions options) {
  if (!(x_min < x_max)) throw Error(ErrorCode::InvalidArgument, "find_features: x_min must be below x_max");
  if (options.scan_points < 100) throw Error(ErrorCode::InvalidArgument, "find_features: scan_points must be >= 100");

  const auto xs = linspace(x_min, x_max, options.scan_points);
  std::vector<double> attractors;
  std::vector<double> tipping;

  double prev_x = xs[0];
  double prev_f = landscape.force(prev_x);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double f = landscape.force(xs[i]);
    // A node sitting exactly on zero keeps the sign of its predecessor.
    if (f == 0.0) continue;
    if (prev_f != 0.0 && (f > 0.0) != (prev_f > 0.0)) {
      const double root = bisect_zero(landscape, prev_x, xs[i], prev_f, options.tolerance);
      (prev_f > 0.0 ? attractors : tipping).push_back(root);
    }
    prev_x = xs[i];
    prev_f = f;
  }

  if (attractors.empty()) throw Error(ErrorCode::NoAttractorFound, "force has no +/- sign change in the scanned range");

  LandscapeFeatures features;
  features.attractors = std::move(attractors);
  for (double t : tipping)
    if (t > features.attractors.front() && t < features.attractors.back()) features.tipping_points.push_back(t);

  if (options.min_barrier > 0.0) merge_shallow(landscape, features, options.min_barrier);
  return features;
}

}  // namespace crossdyn
