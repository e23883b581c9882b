#include "crossdyn/sde.hpp"

#include <cmath>
#include <random>

#include "crossdyn/error.hpp"

namespace crossdyn {

Trajectory simulate(const EnergyLandscape& landscape, double sigma, double x0, double dt, std::size_t steps,
                    std::uint64_t seed) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "simulate: dt must be positive");
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "simulate: steps must be >= 1");
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "simulate: sigma must be nonnegative");
  if (!std::isfinite(x0)) throw Error(ErrorCode::InvalidArgument, "simulate: x0 must be finite");

  Trajectory traj;
  traj.seed = seed;
  traj.times.resize(steps + 1);
  traj.states.resize(steps + 1);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise = sigma * std::sqrt(dt);

  double x = x0;
  traj.times[0] = 0.0;
  traj.states[0] = x;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double z = normal(rng);
    x += landscape.force(x) * dt + noise * z;
    traj.times[k] = static_cast<double>(k) * dt;
    traj.states[k] = x;
  }
  return traj;
}

TransitionStats count_transitions(const Trajectory& trajectory, double tipping_point) {
  const auto& xs = trajectory.states;
  if (xs.size() < 2) throw Error(ErrorCode::InvalidArgument, "count_transitions needs at least 2 states");

  TransitionStats stats;
  stats.total_time = static_cast<double>(xs.size() - 1) * trajectory.dt();
  int side = 0;
  for (double x : xs) {
    const int s = x > tipping_point ? 1 : (x < tipping_point ? -1 : side);
    if (side != 0 && s != side) ++stats.transition_count;
    side = s;
  }
  if (stats.transition_count > 0)
    stats.mean_time_between = stats.total_time / static_cast<double>(stats.transition_count);
  return stats;
}

}  // namespace crossdyn
