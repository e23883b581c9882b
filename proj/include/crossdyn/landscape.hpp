#pragma once

#include <vector>

#include "crossdyn/kde.hpp"

namespace crossdyn {

/// Free energy F(x) = -log pdf(x) with beta fixed at 1, optionally tilted by a
/// linear term G(x) = F(x) + tilt * x.
class EnergyLandscape {
 public:
  static constexpr double beta = 1.0;

  explicit EnergyLandscape(DensityModel density, double tilt = 0.0)
      : density_(std::move(density)), tilt_(tilt) {}

  const DensityModel& density() const noexcept { return density_; }
  double tilt() const noexcept { return tilt_; }

  double energy(double x) const { return -density_.log_pdf(x) + tilt_ * x; }

  /// Deterministic drift -dG/dx. Positive values push x upward.
  double force(double x) const { return density_.log_pdf_derivative(x) - tilt_; }

 private:
  DensityModel density_;
  double tilt_;
};

struct LandscapeFeatures {
  std::vector<double> attractors;      // local minima, ascending
  std::vector<double> tipping_points;  // local maxima between attractors, ascending
};

struct FeatureScanOptions {
  std::size_t scan_points = 2001;
  double tolerance = 1e-8;
  /// Attractors separated from a neighbour by a barrier lower than this are
  /// merged into the deeper one. 0 keeps every sign change.
  double min_barrier = 0.0;
};

/// Locates zeros of the force on [x_min, x_max] by a uniform scan refined with
/// bisection. A +/- sign change is an attractor, -/+ a tipping point. Throws
/// NoAttractorFound when the scan contains no attractor.
LandscapeFeatures find_features(const EnergyLandscape& landscape, double x_min, double x_max,
                                FeatureScanOptions options = {});

}  // namespace crossdyn
