#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "crossdyn/landscape.hpp"
#include "crossdyn/spline.hpp"

namespace crossdyn {

/// Uniform discretisation of the state range. dt is tied to sigma so that a
/// free Wiener process needs about 1000 steps to cover half the range, and the
/// spacing is dx = sqrt(dt) / fineness.
struct Grid {
  double x_min = 0.0;
  double x_max = 0.0;
  double dt = 0.0;
  double dx = 0.0;
  int fineness = 10;
  std::vector<double> points;

  std::size_t size() const noexcept { return points.size(); }
};

/// floor(min) and ceil(max) of the (standardized) data.
std::pair<double, double> data_range(std::span<const double> values);

/// Time step satisfying sigma * sqrt(1000 dt) = (x_max - x_min) / 2.
double grid_time_step(double x_min, double x_max, double sigma);

/// Grid with dt from grid_time_step(). Point count is floor(range / dx) + 1
/// and the last point is snapped to x_max.
Grid build_grid(double x_min, double x_max, double sigma, int fineness = 10);

/// Same spacing rule with an explicit time step.
Grid build_grid_with_step(double x_min, double x_max, double dt, int fineness = 10);

/// Row-stochastic banded sparse matrix. Each row stores a contiguous run of
/// destination columns.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;

  /// Builds from a dense row-major matrix, dropping leading and trailing zeros
  /// of each row. Rows must already sum to 1.
  static TransitionMatrix from_dense(const std::vector<std::vector<double>>& rows);

  /// Appends a row whose nonzeros occupy columns [first_column, first_column + values.size()).
  void push_row(std::size_t first_column, std::vector<double> values);

  std::size_t size() const noexcept { return first_.size(); }
  std::size_t row_first(std::size_t row) const { return first_[row]; }
  std::span<const double> row(std::size_t row) const;
  std::size_t nonzeros() const noexcept { return values_.size(); }

  /// out = p^T W.
  void left_multiply(std::span<const double> p, std::span<double> out) const;

 private:
  std::vector<std::size_t> first_;
  std::vector<std::size_t> offsets_{0};
  std::vector<double> values_;
};

struct DiscreteChain {
  Grid grid;
  TransitionMatrix transition;
  std::vector<double> stationary;  // empty until computed
};

/// Discretised Langevin step: from grid point x the destination distribution is
/// N(x + force(x) dt, sigma sqrt(dt)) restricted to the grid points within four
/// standard deviations of the mean, then row-normalised. Throws EmptyRow when a
/// window contains no grid point.
DiscreteChain transition_matrix(const EnergyLandscape& landscape, const Grid& grid, double sigma);

/// Probability mass of the density in each grid cell [x - dx/2, x + dx/2],
/// normalised to sum 1.
std::vector<double> initial_distribution(const DensityModel& density, const Grid& grid);

struct StationaryOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 1'000'000;
};

struct StationaryResult {
  std::vector<double> distribution;
  std::size_t iterations = 0;
  /// max |p W - p| at the last iterate.
  double residual = 0.0;
};

/// Power iteration p <- p W from `start` until successive iterates agree to
/// `tolerance` in max norm. An empty `start` means uniform. Throws NoConvergence
/// at the iteration cap.
StationaryResult stationary_distribution(const TransitionMatrix& transition, std::span<const double> start = {},
                                         StationaryOptions options = {});

/// Continuous stationary density: natural cubic spline through (x_i, pi_i / dx),
/// clamped at zero and renormalised to unit mass on the grid range. Zero
/// outside the range.
class StationaryDensity {
 public:
  explicit StationaryDensity(const DiscreteChain& chain);

  double operator()(double x) const;
  /// The spline before clamping and renormalisation.
  double raw(double x) const { return spline_(x); }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }

 private:
  CubicSpline spline_;
  double x_min_;
  double x_max_;
  double scale_ = 1.0;
};

StationaryDensity continuous_density(const DiscreteChain& chain);

/// 1/2 * integral (sqrt p - sqrt q)^2 by the trapezoid rule on the given nodes
/// (the squared Hellinger distance for normalised densities).
double hellinger(std::span<const double> nodes, std::span<const double> p, std::span<const double> q);

/// Samples both callables on `node_count` uniform nodes over [lo, hi].
template <typename P, typename Q>
double hellinger(const P& p, const Q& q, double lo, double hi, std::size_t node_count);

struct LangevinModel {
  EnergyLandscape landscape;
  double sigma = 0.0;
};

struct SigmaFitOptions {
  double sigma_lo = 0.05;
  double sigma_hi = 10.0;
  int fineness = 10;
  /// Stop once the bracket is narrower than this fraction of (hi - lo).
  double relative_bracket = 1e-3;
  /// Uniform nodes used to compare the two densities.
  std::size_t hellinger_nodes = 4001;
  /// Build the grid once (at sqrt(lo * hi)) instead of per candidate sigma.
  bool fixed_grid = false;
  StationaryOptions stationary{};
  /// Range override; defaults to data_range() of the density samples.
  std::optional<std::pair<double, double>> range;
};

struct SigmaFit {
  LangevinModel model;
  DiscreteChain chain;  // chain at the optimum, stationary vector filled
  double cost = 0.0;    // squared Hellinger distance at the optimum
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::size_t evaluations = 0;
  /// Optimum within 1% of (hi - lo) of a bound.
  bool boundary_optimum = false;
};

/// Squared Hellinger distance between the chain's stationary density at
/// `sigma` and `data_density` (renormalised on the grid range). A grid too
/// coarse for the window (EmptyRow) scores the maximal distance 1.
struct SigmaCost {
  double cost = 1.0;
  DiscreteChain chain;
};
SigmaCost sigma_cost(const EnergyLandscape& landscape, const DensityModel& data_density, double sigma,
                     const SigmaFitOptions& options);

/// Golden-section search over sigma minimising sigma_cost(). Deterministic.
SigmaFit fit_sigma(const EnergyLandscape& landscape, const DensityModel& data_density, SigmaFitOptions options = {});

// ---------------------------------------------------------------------------

template <typename P, typename Q>
double hellinger(const P& p, const Q& q, double lo, double hi, std::size_t node_count) {
  std::vector<double> nodes(node_count), pv(node_count), qv(node_count);
  const double step = (hi - lo) / static_cast<double>(node_count - 1);
  for (std::size_t i = 0; i < node_count; ++i) {
    nodes[i] = i + 1 == node_count ? hi : lo + step * static_cast<double>(i);
    pv[i] = p(nodes[i]);
    qv[i] = q(nodes[i]);
  }
  return hellinger(nodes, pv, qv);
}

}  // namespace crossdyn
