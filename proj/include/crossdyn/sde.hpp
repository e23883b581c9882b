#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "crossdyn/landscape.hpp"
#include "crossdyn/markov.hpp"

namespace crossdyn {

/// States sampled at a constant step; times[k] = k * dt.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> states;
  std::uint64_t seed = 0;

  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

/// Euler-Maruyama integration of dx = force(x) dt + sigma dW. Returns
/// steps + 1 states including x0. Bit-reproducible for a given seed;
/// sigma = 0 gives the deterministic gradient flow.
Trajectory simulate(const EnergyLandscape& landscape, double sigma, double x0, double dt, std::size_t steps,
                    std::uint64_t seed);

inline Trajectory simulate(const LangevinModel& model, double x0, double dt, std::size_t steps, std::uint64_t seed) {
  return simulate(model.landscape, model.sigma, x0, dt, steps, seed);
}

struct TransitionStats {
  std::size_t transition_count = 0;
  double total_time = 0.0;
  /// total_time / transition_count; absent when nothing crossed.
  std::optional<double> mean_time_between;
};

/// Counts consecutive state pairs on strictly opposite sides of the tipping
/// point. A state exactly on the tipping point keeps the previous side.
TransitionStats count_transitions(const Trajectory& trajectory, double tipping_point);

}  // namespace crossdyn
