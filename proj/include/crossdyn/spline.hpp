#pragma once

#include <span>
#include <vector>

namespace crossdyn {

/// Natural cubic spline through strictly increasing knots. Evaluation outside
/// the knot range extrapolates the end polynomials.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;

  std::span<const double> knots() const noexcept { return x_; }
  std::span<const double> values() const noexcept { return y_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> b_;
  std::vector<double> c_;
  std::vector<double> d_;
};

}  // namespace crossdyn
