#include <cmath>
#include <random>

#include "crossdyn/error.hpp"
#include "crossdyn/sde.hpp"
#include "crossdyn/surrogate.hpp"
#include "doctest.h"

using namespace crossdyn;
using doctest::Approx;

TEST_CASE("no drift and no noise keeps the state") {
  EnergyLandscape sym(DensityModel({-1.0, 1.0}, 1.0));
  const auto t = simulate(sym, 0.0, 0.0, 0.01, 500, 1);
  REQUIRE(t.states.size() == 501);
  for (double x : t.states) CHECK(x == 0.0);
  CHECK(t.times[500] == Approx(5.0));
}

TEST_CASE("gradient flow descends to the attractor") {
  EnergyLandscape well(DensityModel({0.0}, 1.0));
  const auto t = simulate(well, 0.0, 2.0, 0.01, 2000, 1);
  for (std::size_t k = 1; k < t.states.size(); ++k) {
    CHECK(t.states[k] <= t.states[k - 1]);
    CHECK(well.energy(t.states[k]) <= well.energy(t.states[k - 1]));
  }
  CHECK(std::abs(t.states.back()) < 1e-3);
}

TEST_CASE("zero noise never climbs a fitted landscape") {
  EnergyLandscape land(DensityModel::fit(sample_landau({3.0, 1.0, 1000, 9})));
  for (double x0 : {-2.0, -0.4, 0.3, 1.9}) {
    const auto t = simulate(land, 0.0, x0, 1e-4, 3000, 0);
    for (std::size_t k = 1; k < t.states.size(); ++k)
      CHECK(land.energy(t.states[k]) <= land.energy(t.states[k - 1]) + 1e-12);
  }
}

TEST_CASE("simulation is reproducible per seed") {
  EnergyLandscape land(DensityModel::fit(sample_landau({3.0, 1.0, 500, 9})));
  const auto a = simulate(land, 1.4, 0.5, 0.002, 5000, 42);
  const auto b = simulate(land, 1.4, 0.5, 0.002, 5000, 42);
  const auto c = simulate(land, 1.4, 0.5, 0.002, 5000, 43);
  CHECK(a.states == b.states);
  CHECK(a.states != c.states);
  CHECK(a.seed == 42);
}

TEST_CASE("transition counting") {
  Trajectory t{{0.0, 1.0, 2.0}, {-1.0, 1.0, -0.5}, 0};
  const auto s = count_transitions(t, 0.0);
  CHECK(s.transition_count == 2);
  CHECK(s.total_time == Approx(2.0));
  REQUIRE(s.mean_time_between);
  CHECK(*s.mean_time_between == Approx(1.0));

  Trajectory pos{{0.0, 1.0, 2.0}, {1.0, 2.0, 0.5}, 0};
  CHECK_FALSE(count_transitions(pos, 0.0).mean_time_between);
  CHECK(count_transitions(pos, 0.0).transition_count == 0);

  // A state on the tipping point keeps the previous side.
  Trajectory touch{{0.0, 1.0, 2.0, 3.0}, {-1.0, 0.0, -1.0, 1.0}, 0};
  CHECK(count_transitions(touch, 0.0).transition_count == 1);
  Trajectory through{{0.0, 1.0, 2.0}, {-1.0, 0.0, 1.0}, 0};
  CHECK(count_transitions(through, 0.0).transition_count == 1);

  // Appending a constant segment adds no transition.
  Trajectory longer = t;
  for (int k = 0; k < 5; ++k) {
    longer.times.push_back(longer.times.back() + 1.0);
    longer.states.push_back(-0.5);
  }
  CHECK(count_transitions(longer, 0.0).transition_count == 2);
}

TEST_CASE("long runs occupy each basin in proportion to its mass") {
  EnergyLandscape land(DensityModel::fit(sample_landau({3.0, 1.0, 400, 12})));
  const double tp = 0.0;
  const auto t = simulate(land, std::sqrt(2.0), 0.0, 0.005, 200000, 8);
  std::size_t above = 0;
  for (double x : t.states) above += x > tp;
  const double frac = static_cast<double>(above) / static_cast<double>(t.states.size());
  const double mass = 1.0 - land.density().cdf(tp);
  CHECK(std::abs(frac - mass) < 0.03);
}
