#include "crossdyn/intervene.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>

#include "crossdyn/error.hpp"

namespace crossdyn {

namespace {

using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;

// -log(1e-12): integrand tails beyond this energy gap above the minimum are dropped.
constexpr double kTailGap = 27.631021115928547;

struct Cutoffs {
  double lo;
  double hi;
  double energy_min;
};

// Finds where energy(x) - min energy rises above kTailGap on each side. Both
// sides run on the mirrored half-line so symmetric energies give symmetric cutoffs.
Cutoffs tail_cutoffs(const std::function<double(double)>& energy) {
  constexpr int scan = 20000;
  double reach = 1.0;
  while (reach < 1e6 && (energy(reach) - energy(0.0) < 2.0 * kTailGap || energy(-reach) - energy(0.0) < 2.0 * kTailGap))
    reach *= 2.0;

  double emin = energy(0.0);
  for (int sign : {1, -1})
    for (int i = 1; i <= scan; ++i) emin = std::min(emin, energy(sign * reach * i / scan));

  const auto outer = [&](int sign) {
    const auto gap = [&](double u) { return energy(sign * u) - emin; };
    int i = scan;
    while (i > 0 && gap(reach * i / scan) > kTailGap) --i;
    double lo = reach * i / scan;
    double hi = reach * std::min(i + 1, scan) / scan;
    if (i == scan) return reach;
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + hi);
      (gap(mid) > kTailGap ? hi : lo) = mid;
    }
    return hi;
  };
  return {-outer(-1), outer(1), emin};
}

double integrate(const std::function<double(double)>& f, double lo, double hi, const QuadratureOptions& options) {
  if (!(hi > lo)) return 0.0;
  return Quadrature::integrate(f, lo, hi, options.max_depth, options.tolerance);
}

double finish_radicand(double r2) {
  if (r2 < -1e-12) throw Error(ErrorCode::NegativeRadicand, "relative effort integral is negative");
  return std::sqrt(std::max(0.0, r2));
}

}  // namespace

void LandauPotential::check() const {
  if (!(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorCode::InvalidArgument, "Landau potential needs finite a and b > 0");
}

double relative_effort(const LandauPotential& potential, double c, double t, double sigma,
                       QuadratureOptions options) {
  potential.check();
  if (!(t > 0.0) || !(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "relative effort needs t, sigma > 0");

  const auto energy = [&](double x) { return potential.energy(x); };
  const Cutoffs cut = tail_cutoffs(energy);
  const auto weight = [&](double x) { return std::exp(-(potential.energy(x) - cut.energy_min)); };
  const double z = integrate(weight, cut.lo, 0.0, options) + integrate(weight, 0.0, cut.hi, options);

  const double noise = sigma * sigma / t;
  const auto integrand = [&](double x) {
    const double df = potential.derivative(x);
    return weight(x) * (2.0 * c * df + c * c) / (df * df + noise);
  };
  const double r2 = (integrate(integrand, cut.lo, 0.0, options) + integrate(integrand, 0.0, cut.hi, options)) / z;
  return finish_radicand(r2);
}

double relative_effort(const EnergyLandscape& landscape, double c, double t, double sigma, double x_min,
                       double x_max, QuadratureOptions options) {
  if (!(t > 0.0) || !(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "relative effort needs t, sigma > 0");
  if (!(x_max > x_min)) throw Error(ErrorCode::InvalidArgument, "relative effort needs x_max > x_min");
  const DensityModel& density = landscape.density();
  const double mass = density.cdf(x_max) - density.cdf(x_min);
  const double noise = sigma * sigma / t;
  const auto integrand = [&](double x) {
    const double df = -density.log_pdf_derivative(x);
    return density.pdf(x) / mass * (2.0 * c * df + c * c) / (df * df + noise);
  };
  return finish_radicand(integrate(integrand, x_min, x_max, options));
}

double occupancy_fraction(const LandauPotential& potential, double c, double threshold, QuadratureOptions options) {
  potential.check();
  const auto energy = [&](double x) { return potential.energy(x) + c * x; };
  const Cutoffs cut = tail_cutoffs(energy);
  const auto weight = [&](double x) { return std::exp(-(energy(x) - cut.energy_min)); };
  const double split = std::clamp(threshold, cut.lo, cut.hi);
  const double below = integrate(weight, cut.lo, split, options);
  const double above = integrate(weight, split, cut.hi, options);
  return below / (below + above);
}

double occupancy_fraction(const EnergyLandscape& landscape, double c, double threshold, double x_min, double x_max,
                          QuadratureOptions options) {
  if (!(x_max > x_min)) throw Error(ErrorCode::InvalidArgument, "occupancy needs x_max > x_min");
  const auto energy = [&](double x) { return landscape.energy(x) + c * x; };
  double emin = energy(x_min);
  constexpr int scan = 4000;
  for (int i = 1; i <= scan; ++i) emin = std::min(emin, energy(x_min + (x_max - x_min) * i / scan));
  const auto weight = [&](double x) { return std::exp(-(energy(x) - emin)); };
  const double split = std::clamp(threshold, x_min, x_max);
  const double below = integrate(weight, x_min, split, options);
  const double above = integrate(weight, split, x_max, options);
  return below / (below + above);
}

LandscapeFeatures landau_features(const LandauPotential& potential, double c) {
  potential.check();
  const auto energy = [&](double x) { return potential.energy(x) + c * x; };
  const auto slope = [&](double x) { return potential.derivative(x) + c; };
  const Cutoffs cut = tail_cutoffs(energy);
  constexpr int scan = 20000;
  LandscapeFeatures features;
  double prev_x = cut.lo;
  double prev = slope(prev_x);
  for (int i = 1; i <= scan; ++i) {
    const double x = cut.lo + (cut.hi - cut.lo) * i / scan;
    const double s = slope(x);
    if ((prev < 0.0) != (s < 0.0)) {
      double lo = prev_x;
      double hi = x;
      for (int k = 0; k < 100 && hi - lo > 1e-14; ++k) {
        const double mid = 0.5 * (lo + hi);
        ((slope(mid) < 0.0) == (prev < 0.0) ? lo : hi) = mid;
      }
      (prev < 0.0 ? features.attractors : features.tipping_points).push_back(0.5 * (lo + hi));
    }
    prev_x = x;
    prev = s;
  }
  return features;
}

EnergyLandscape tilted_landscape(const EnergyLandscape& landscape, double c) {
  return EnergyLandscape(landscape.density(), landscape.tilt() + c);
}

}  // namespace crossdyn
