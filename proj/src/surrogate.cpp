#include "crossdyn/surrogate.hpp"

#include <algorithm>
#include <cmath>

// Boost 1.74's pchip calls isnan unqualified.
namespace boost::math::interpolators {
using std::isnan;
}

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <random>

#include "crossdyn/error.hpp"

namespace crossdyn {

namespace {

using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

constexpr double kTailGap = 27.631021115928547;  // -log(1e-12)

// Outermost x > 0 with energy(x) - emin <= kTailGap, for an even potential.
double tail_reach(const LandauPotential& p, double emin) {
  double hi = 1.0;
  while (p.energy(hi) - emin <= kTailGap) hi *= 2.0;
  double lo = std::max(0.0, std::sqrt(std::max(0.0, p.a / (2.0 * p.b))));
  for (int k = 0; k < 200 && hi - lo > 1e-14 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (p.energy(mid) - emin > kTailGap ? hi : lo) = mid;
  }
  return hi;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + w * (ys[i + 1] - ys[i]);
}

}  // namespace

LandauDistribution::LandauDistribution(double a, double b) : potential_{a, b} {
  potential_.check();
  energy_min_ = a > 0.0 ? potential_.energy(std::sqrt(a / (2.0 * b))) : 0.0;
  const double reach = tail_reach(potential_, energy_min_);

  const auto weight = [&](double x) { return std::exp(-(potential_.energy(x) - energy_min_)); };
  z_ = Quadrature::integrate(weight, -reach, 0.0, 20, 1e-13) + Quadrature::integrate(weight, 0.0, reach, 20, 1e-13);

  // Cumulative Simpson on pairs of half-steps, normalised by the final value.
  nodes_.resize(kNodes);
  cumulative_.resize(kNodes);
  const double step = 2.0 * reach / static_cast<double>(kNodes - 1);
  nodes_[0] = -reach;
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < kNodes; ++i) {
    nodes_[i] = i + 1 == kNodes ? reach : -reach + step * static_cast<double>(i);
    const double l = nodes_[i - 1];
    const double r = nodes_[i];
    cumulative_[i] = cumulative_[i - 1] + (r - l) / 6.0 * (weight(l) + 4.0 * weight(0.5 * (l + r)) + weight(r));
  }
  const double total = cumulative_.back();
  for (double& c : cumulative_) c /= total;

  for (std::size_t i = 0; i < kNodes; ++i) {
    if (!inv_u_.empty() && !(cumulative_[i] > inv_u_.back())) continue;
    inv_u_.push_back(cumulative_[i]);
    inv_x_.push_back(nodes_[i]);
  }
}

double LandauDistribution::pdf(double x) const {
  return std::exp(-(potential_.energy(x) - energy_min_)) / z_;
}

double LandauDistribution::cdf(double x) const { return interpolate(nodes_, cumulative_, x); }

double LandauDistribution::inverse_cdf(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorCode::InvalidArgument, "inverse_cdf needs u in [0, 1]");
  if (u <= inv_u_.front()) return inv_x_.front();
  if (u >= inv_u_.back()) return inv_x_.back();
  // Monotone cubic on the local stencil around u.
  const auto it = std::upper_bound(inv_u_.begin(), inv_u_.end(), u);
  const std::size_t i = static_cast<std::size_t>(it - inv_u_.begin()) - 1;
  const std::size_t lo = i >= 2 ? i - 2 : 0;
  const std::size_t hi = std::min(inv_u_.size(), i + 4);
  if (hi - lo < 4) return interpolate(inv_u_, inv_x_, u);
  Pchip local(std::vector<double>(inv_u_.begin() + static_cast<std::ptrdiff_t>(lo),
                                  inv_u_.begin() + static_cast<std::ptrdiff_t>(hi)),
              std::vector<double>(inv_x_.begin() + static_cast<std::ptrdiff_t>(lo),
                                  inv_x_.begin() + static_cast<std::ptrdiff_t>(hi)));
  return local(u);
}

double LandauDistribution::second_moment() const {
  const auto f = [&](double x) { return x * x * pdf(x); };
  return Quadrature::integrate(f, nodes_.front(), 0.0, 20, 1e-13) +
         Quadrature::integrate(f, 0.0, nodes_.back(), 20, 1e-13);
}

CrossSection sample_landau(const LandauSpec& spec) {
  if (spec.n < 2) throw Error(ErrorCode::InvalidArgument, "surrogate needs n >= 2");
  const LandauDistribution dist(spec.a, spec.b);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  CrossSection out;
  out.label = "landau";
  out.values.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) out.values.push_back(dist.inverse_cdf(uniform(rng)));
  return out;
}

LongitudinalCohort synth_longitudinal(const LangevinModel& model, const CrossSection& baseline, double dt,
                                      std::uint64_t seed, const std::string& label) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "synth_longitudinal needs dt > 0");
  if (!(model.sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "synth_longitudinal needs sigma >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise = model.sigma * std::sqrt(dt);

  LongitudinalCohort cohort;
  cohort.labels = {label};
  cohort.followups.assign(1, {});
  cohort.ids.reserve(baseline.values.size());
  for (std::size_t i = 0; i < baseline.values.size(); ++i) {
    const double x = baseline.values[i];
    const double z = normal(rng);
    cohort.ids.push_back(std::to_string(i + 1));
    cohort.baseline.push_back(x);
    cohort.followups[0].push_back(x + model.landscape.force(x) * dt + noise * z);
  }
  return cohort;
}

}  // namespace crossdyn
