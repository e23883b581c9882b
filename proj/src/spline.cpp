#include "crossdyn/spline.hpp"

#include <algorithm>

#include "crossdyn/error.hpp"

namespace crossdyn {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw Error(ErrorCode::InvalidArgument, "spline needs >= 2 knots with matching values");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw Error(ErrorCode::InvalidArgument, "spline knots must be strictly increasing");

  const std::size_t m = n - 1;
  std::vector<double> h(m);
  for (std::size_t i = 0; i < m; ++i) h[i] = x_[i + 1] - x_[i];

  // Second derivatives M with M_0 = M_n = 0; Thomas algorithm on the interior rows.
  std::vector<double> second(n, 0.0);
  if (n > 2) {
    std::vector<double> diag(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 1; i < m; ++i) {
      diag[i] = 2.0 * (h[i - 1] + h[i]);
      rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    }
    for (std::size_t i = 2; i < m; ++i) {
      const double w = h[i - 1] / diag[i - 1];
      diag[i] -= w * h[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    second[m - 1] = rhs[m - 1] / diag[m - 1];
    for (std::size_t i = m - 1; i-- > 1;) second[i] = (rhs[i] - h[i] * second[i + 1]) / diag[i];
  }

  b_.resize(m);
  c_.resize(m);
  d_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    b_[i] = (y_[i + 1] - y_[i]) / h[i] - h[i] * (2.0 * second[i] + second[i + 1]) / 6.0;
    c_[i] = second[i] / 2.0;
    d_[i] = (second[i + 1] - second[i]) / (6.0 * h[i]);
  }
}

double CubicSpline::operator()(double x) const {
  if (x == x_.back()) return y_.back();
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  i = std::min(i, b_.size() - 1);
  const double t = x - x_[i];
  return y_[i] + t * (b_[i] + t * (c_[i] + t * d_[i]));
}

}  // namespace crossdyn
