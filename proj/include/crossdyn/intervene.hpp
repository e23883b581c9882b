#pragma once

#include "crossdyn/landscape.hpp"

namespace crossdyn {

/// Landau double-well F(x) = -a x^2 + b x^4 with density exp(-F) / Z.
struct LandauPotential {
  double a = 3.0;
  double b = 1.0;

  double energy(double x) const { return -a * x * x + b * x * x * x * x; }
  double derivative(double x) const { return -2.0 * a * x + 4.0 * b * x * x * x; }
  /// Throws InvalidArgument unless b > 0.
  void check() const;
};

struct QuadratureOptions {
  double tolerance = 1e-12;
  unsigned max_depth = 20;
};

/// Relative effort r(c) of the tilt G = F + c x:
/// r^2 = integral p(x) (2 c F'(x) + c^2) / (F'(x)^2 + sigma^2 / t) dx,
/// integrated where p exceeds 1e-12 of its maximum. Throws NegativeRadicand
/// if r^2 < -1e-12; smaller negative values clamp to 0.
double relative_effort(const LandauPotential& potential, double c, double t, double sigma,
                       QuadratureOptions options = {});

/// The same integral with p and F' taken from a fitted landscape, over
/// [x_min, x_max] with p renormalised to that range.
double relative_effort(const EnergyLandscape& landscape, double c, double t, double sigma, double x_min,
                       double x_max, QuadratureOptions options = {});

/// Equilibrium fraction below `threshold` under exp(-G), G(x) = F(x) + c x.
double occupancy_fraction(const LandauPotential& potential, double c, double threshold,
                          QuadratureOptions options = {});

/// The same fraction for a fitted landscape restricted to [x_min, x_max].
double occupancy_fraction(const EnergyLandscape& landscape, double c, double threshold, double x_min, double x_max,
                          QuadratureOptions options = {});

/// Minima and maxima of G(x) = F(x) + c x for the Landau potential.
LandscapeFeatures landau_features(const LandauPotential& potential, double c);

/// Landscape with energy G(x) = energy(x) + c x and force(x) - c.
EnergyLandscape tilted_landscape(const EnergyLandscape& landscape, double c);

}  // namespace crossdyn
