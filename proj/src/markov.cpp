#include "crossdyn/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "crossdyn/error.hpp"
#include "crossdyn/stats.hpp"

namespace crossdyn {

std::pair<double, double> data_range(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "data_range of empty data");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  double x_min = std::floor(*lo);
  double x_max = std::ceil(*hi);
  if (x_min == x_max) x_max += 1.0;
  return {x_min, x_max};
}

double grid_time_step(double x_min, double x_max, double sigma) {
  const double half = 0.5 * (x_max - x_min);
  return half * half / (1000.0 * sigma * sigma);
}

Grid build_grid_with_step(double x_min, double x_max, double dt, int fineness) {
  if (!(x_max > x_min)) throw Error(ErrorCode::InvalidArgument, "grid needs x_max > x_min");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid needs dt > 0");
  if (fineness < 1) throw Error(ErrorCode::InvalidArgument, "grid fineness must be >= 1");
  Grid grid;
  grid.x_min = x_min;
  grid.x_max = x_max;
  grid.dt = dt;
  grid.fineness = fineness;
  grid.dx = std::sqrt(dt) / fineness;
  const auto count = static_cast<std::size_t>(std::floor((x_max - x_min) / grid.dx)) + 1;
  if (count < 2) throw Error(ErrorCode::InvalidArgument, "grid spacing exceeds the data range");
  grid.points.resize(count);
  for (std::size_t i = 0; i < count; ++i) grid.points[i] = x_min + grid.dx * static_cast<double>(i);
  grid.points.back() = x_max;
  return grid;
}

Grid build_grid(double x_min, double x_max, double sigma, int fineness) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid needs sigma > 0");
  return build_grid_with_step(x_min, x_max, grid_time_step(x_min, x_max, sigma), fineness);
}

// --- TransitionMatrix --------------------------------------------------------

TransitionMatrix TransitionMatrix::from_dense(const std::vector<std::vector<double>>& rows) {
  TransitionMatrix m;
  for (const auto& r : rows) {
    if (r.size() != rows.size()) throw Error(ErrorCode::InvalidArgument, "transition matrix must be square");
    std::size_t first = 0;
    while (first < r.size() && r[first] == 0.0) ++first;
    std::size_t last = r.size();
    while (last > first && r[last - 1] == 0.0) --last;
    m.push_row(first, std::vector<double>(r.begin() + static_cast<std::ptrdiff_t>(first),
                                          r.begin() + static_cast<std::ptrdiff_t>(last)));
  }
  return m;
}

void TransitionMatrix::push_row(std::size_t first_column, std::vector<double> values) {
  first_.push_back(first_column);
  values_.insert(values_.end(), values.begin(), values.end());
  offsets_.push_back(values_.size());
}

std::span<const double> TransitionMatrix::row(std::size_t r) const {
  return std::span<const double>(values_).subspan(offsets_[r], offsets_[r + 1] - offsets_[r]);
}

void TransitionMatrix::left_multiply(std::span<const double> p, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t n = size();
  for (std::size_t r = 0; r < n; ++r) {
    const double w = p[r];
    if (w == 0.0) continue;
    double* dst = out.data() + first_[r];
    const double* src = values_.data() + offsets_[r];
    const std::size_t len = offsets_[r + 1] - offsets_[r];
    for (std::size_t k = 0; k < len; ++k) dst[k] += w * src[k];
  }
}

// --- chain construction --------------------------------------------------------

DiscreteChain transition_matrix(const EnergyLandscape& landscape, const Grid& grid, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "transition matrix needs sigma > 0");
  if (grid.points.size() < 2) throw Error(ErrorCode::InvalidArgument, "transition matrix needs a grid");
  const auto& pts = grid.points;
  const double s = sigma * std::sqrt(grid.dt);
  const double inv_two_var = 1.0 / (2.0 * s * s);
  const double norm = 1.0 / (s * std::sqrt(2.0 * std::numbers::pi));

  DiscreteChain chain;
  chain.grid = grid;
  for (double x : pts) {
    const double mean = x + landscape.force(x) * grid.dt;
    const auto first = std::lower_bound(pts.begin(), pts.end(), mean - 4.0 * s);
    const auto last = std::upper_bound(first, pts.end(), mean + 4.0 * s);
    if (first == last)
      throw Error(ErrorCode::EmptyRow, "no grid point within 4 standard deviations of the drifted mean");
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(last - first));
    double total = 0.0;
    for (auto it = first; it != last; ++it) {
      const double d = *it - mean;
      row.push_back(norm * std::exp(-d * d * inv_two_var));
      total += row.back();
    }
    for (double& v : row) v /= total;
    chain.transition.push_row(static_cast<std::size_t>(first - pts.begin()), std::move(row));
  }
  return chain;
}

std::vector<double> initial_distribution(const DensityModel& density, const Grid& grid) {
  std::vector<double> pi(grid.size());
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.points[i];
    pi[i] = density.cdf(x + 0.5 * grid.dx) - density.cdf(x - 0.5 * grid.dx);
    total += pi[i];
  }
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateData, "density has no mass on the grid");
  for (double& v : pi) v /= total;
  return pi;
}

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void normalize(std::span<double> p) {
  double total = 0.0;
  for (double v : p) total += v;
  for (double& v : p) v /= total;
}

}  // namespace

StationaryResult stationary_distribution(const TransitionMatrix& transition, std::span<const double> start,
                                         StationaryOptions options) {
  const std::size_t n = transition.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty transition matrix");
  std::vector<double> p;
  if (start.empty()) {
    p.assign(n, 1.0 / static_cast<double>(n));
  } else {
    if (start.size() != n) throw Error(ErrorCode::InvalidArgument, "start vector size does not match the chain");
    p.assign(start.begin(), start.end());
    for (double v : p)
      if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "start vector must be nonnegative");
    normalize(p);
  }

  std::vector<double> next(n);
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    transition.left_multiply(p, next);
    normalize(next);
    const double diff = max_abs_diff(p, next);
    p.swap(next);
    if (diff < options.tolerance) {
      transition.left_multiply(p, next);
      const double residual = max_abs_diff(next, p);
      return {std::move(p), it, residual};
    }
  }
  throw Error(ErrorCode::NoConvergence, "power iteration did not reach tolerance within the iteration cap");
}

// --- continuous density --------------------------------------------------------

namespace {

CubicSpline density_spline(const DiscreteChain& chain) {
  if (chain.stationary.size() != chain.grid.size())
    throw Error(ErrorCode::InvalidArgument, "chain has no stationary vector");
  std::vector<double> y(chain.stationary.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = chain.stationary[i] / chain.grid.dx;
  return CubicSpline(chain.grid.points, std::move(y));
}

}  // namespace

StationaryDensity::StationaryDensity(const DiscreteChain& chain)
    : spline_(density_spline(chain)), x_min_(chain.grid.x_min), x_max_(chain.grid.x_max) {
  // Composite Simpson with 8 panels per knot interval.
  constexpr int panels = 8;
  const auto knots = spline_.knots();
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double h = (knots[i + 1] - a) / panels;
    double sum = std::max(0.0, spline_(a)) + std::max(0.0, spline_(knots[i + 1]));
    for (int k = 1; k < panels; ++k) sum += (k % 2 ? 4.0 : 2.0) * std::max(0.0, spline_(a + h * k));
    mass += sum * h / 3.0;
  }
  if (!(mass > 0.0)) throw Error(ErrorCode::DegenerateData, "stationary density has no mass");
  scale_ = 1.0 / mass;
}

double StationaryDensity::operator()(double x) const {
  if (x < x_min_ || x > x_max_) return 0.0;
  return std::max(0.0, spline_(x)) * scale_;
}

StationaryDensity continuous_density(const DiscreteChain& chain) { return StationaryDensity(chain); }

double hellinger(std::span<const double> nodes, std::span<const double> p, std::span<const double> q) {
  if (nodes.size() != p.size() || nodes.size() != q.size())
    throw Error(ErrorCode::InvalidArgument, "hellinger: size mismatch");
  std::vector<double> sq(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double d = std::sqrt(std::max(0.0, p[i])) - std::sqrt(std::max(0.0, q[i]));
    sq[i] = d * d;
  }
  return 0.5 * trapezoid(nodes, sq);
}

// --- sigma fit ---------------------------------------------------------------

namespace {

std::pair<double, double> fit_range(const EnergyLandscape& landscape, const SigmaFitOptions& options) {
  if (options.range) return *options.range;
  return data_range(landscape.density().samples());
}

}  // namespace

SigmaCost sigma_cost(const EnergyLandscape& landscape, const DensityModel& data_density, double sigma,
                     const SigmaFitOptions& options) {
  const auto [lo, hi] = fit_range(landscape, options);
  const Grid grid = options.fixed_grid
                        ? build_grid(lo, hi, std::sqrt(options.sigma_lo * options.sigma_hi), options.fineness)
                        : build_grid(lo, hi, sigma, options.fineness);
  SigmaCost result;
  try {
    result.chain = transition_matrix(landscape, grid, sigma);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyRow) throw;
    result.cost = 1.0;
    result.chain.grid = grid;
    return result;
  }
  const auto start = initial_distribution(data_density, grid);
  result.chain.stationary = stationary_distribution(result.chain.transition, start, options.stationary).distribution;
  const StationaryDensity model_density(result.chain);
  const double mass = data_density.cdf(hi) - data_density.cdf(lo);
  const auto data_on_range = [&](double x) { return data_density.pdf(x) / mass; };
  result.cost = hellinger(model_density, data_on_range, lo, hi, options.hellinger_nodes);
  return result;
}

SigmaFit fit_sigma(const EnergyLandscape& landscape, const DensityModel& data_density, SigmaFitOptions options) {
  const double lo = options.sigma_lo;
  const double hi = options.sigma_hi;
  if (!(lo > 0.0 && hi > lo)) throw Error(ErrorCode::InvalidArgument, "sigma bounds must satisfy 0 < lo < hi");
  options.range = fit_range(landscape, options);

  SigmaFit fit{LangevinModel{landscape, 0.0}, {}, std::numeric_limits<double>::infinity()};
  double best_sigma = lo;
  const auto evaluate = [&](double sigma) {
    SigmaCost c = sigma_cost(landscape, data_density, sigma, options);
    ++fit.evaluations;
    if (c.cost < fit.cost) {
      fit.cost = c.cost;
      fit.chain = std::move(c.chain);
      best_sigma = sigma;
    }
    return c.cost;
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = evaluate(c);
  double fd = evaluate(d);
  while (b - a > options.relative_bracket * (hi - lo)) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = evaluate(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = evaluate(d);
    }
  }
  evaluate(0.5 * (a + b));

  if (fit.chain.stationary.empty())
    throw Error(ErrorCode::NoConvergence, "no sigma candidate produced a valid chain");
  fit.model.sigma = best_sigma;
  fit.bracket_lo = a;
  fit.bracket_hi = b;
  const double margin = 0.01 * (hi - lo);
  fit.boundary_optimum = best_sigma - lo < margin || hi - best_sigma < margin;
  return fit;
}

}  // namespace crossdyn
