#include <cmath>
#include <numbers>
#include <random>

#include "crossdyn/error.hpp"
#include "crossdyn/kde.hpp"
#include "crossdyn/stats.hpp"
#include "doctest.h"

using namespace crossdyn;
using doctest::Approx;

namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed, double mean = 0.0, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(mean, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Mixtures with different shapes for the property checks.
std::vector<std::vector<double>> datasets() {
  std::vector<std::vector<double>> out;
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto v = normal_sample(200 + 150 * s, 100 + s, 0.0, 1.0 + 0.3 * s);
    if (s % 2 == 1) {
      auto w = normal_sample(100 + 50 * s, 200 + s, 4.0, 0.5);
      v.insert(v.end(), w.begin(), w.end());
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

TEST_CASE("type-7 quantiles and sample std") {
  const std::vector<double> v{0.0, 1.0};
  CHECK(quantile(v, 0.25) == Approx(0.25));
  CHECK(quantile(v, 0.75) == Approx(0.75));
  CHECK(standard_deviation(v) == Approx(std::sqrt(0.5)));
  CHECK(standard_deviation(v, false) == Approx(0.5));
  const std::vector<double> w{3.0, 1.0, 2.0, 10.0};
  CHECK(median(w) == Approx(2.5));
  CHECK(normal_cdf(1.0) == Approx(0.8413447460685429).epsilon(1e-12));
}

TEST_CASE("silverman bandwidth for two points") {
  CrossSection data{{0.0, 1.0}, "pair"};
  CHECK(silverman_bandwidth(data) == Approx(0.29234906976362374).epsilon(1e-12));
}

TEST_CASE("silverman bandwidth is 0.9 n^-1/5 std for normal data") {
  CrossSection data{normal_sample(5000, 1), "normal"};
  const double sd = standard_deviation(data.values);
  const double iqr = quantile(data.values, 0.75) - quantile(data.values, 0.25);
  const double spread = std::min(sd, iqr / 1.34);
  CHECK(silverman_bandwidth(data) == Approx(0.16385077827234723 * spread).epsilon(1e-12));
  CHECK(silverman_bandwidth(data) == Approx(0.1639).epsilon(0.05));
}

TEST_CASE("constant data is degenerate") {
  CrossSection data{{5.0, 5.0, 5.0}, "flat"};
  CHECK_THROWS_AS(silverman_bandwidth(data), Error);
  try {
    silverman_bandwidth(data);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateData);
  }
  CrossSection one{{1.0}, "one"};
  CHECK_THROWS_AS(one.check(), Error);
  CrossSection bad{{1.0, std::nan("")}, "nan"};
  CHECK_THROWS_AS(bad.check(), Error);
}

TEST_CASE("kernel density point values") {
  DensityModel single({0.0}, 1.0);
  CHECK(single.pdf(0.0) == Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
  DensityModel pair({-1.0, 1.0}, 1.0);
  CHECK(pair.pdf(0.0) == Approx(0.24197072451914337).epsilon(1e-14));
  CHECK(pair.log_pdf_derivative(0.0) == Approx(0.0));
  for (double x : {-2.0, -0.3, 0.0, 0.7, 3.0}) CHECK(single.log_pdf_derivative(x) == Approx(-x).epsilon(1e-12));
}

TEST_CASE("log density stays finite far from the data") {
  DensityModel m({0.0, 0.1}, 0.05);
  const double lp = m.log_pdf(50.0);
  CHECK(std::isfinite(lp));
  CHECK(lp < -1e5);
  CHECK(std::isfinite(m.log_pdf_derivative(50.0)));
  CHECK(m.log_pdf_derivative(50.0) < 0.0);
}

TEST_CASE("kde integrates to one") {
  for (const auto& v : datasets()) {
    DensityModel m = DensityModel::fit({v, ""});
    const double h = m.bandwidth();
    const auto x = linspace(m.min_sample() - 8.0 * h, m.max_sample() + 8.0 * h, 40001);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = m.pdf(x[i]);
    CHECK(trapezoid(x, y) == Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("analytic score matches finite differences") {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (const auto& v : datasets()) {
    DensityModel m = DensityModel::fit({v, ""});
    std::uniform_real_distribution<double> u(m.min_sample(), m.max_sample());
    for (int k = 0; k < 100; ++k) {
      const double x = u(rng);
      const double step = 1e-5;
      const double fd = (m.log_pdf(x + step) - m.log_pdf(x - step)) / (2.0 * step);
      worst = std::max(worst, std::abs(fd - m.log_pdf_derivative(x)));
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("cdf is the mean of the kernel cdfs") {
  DensityModel m({-1.0, 1.0}, 1.0);
  CHECK(m.cdf(0.0) == Approx(0.5));
  CHECK(m.cdf(1.0) == Approx(0.5 * (normal_cdf(2.0) + 0.5)));
}
