#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "crossdyn/intervene.hpp"
#include "crossdyn/kde.hpp"
#include "crossdyn/markov.hpp"

namespace crossdyn {

struct LandauSpec {
  double a = 3.0;
  double b = 1.0;
  std::size_t n = 5000;
  std::uint64_t seed = 0;
};

/// Tabulated density exp(a x^2 - b x^4) / Z on the range where it exceeds
/// 1e-12 of its maximum.
class LandauDistribution {
 public:
  static constexpr std::size_t kNodes = 100'000;

  LandauDistribution(double a, double b);

  /// Z = integral of exp(a x^2 - b x^4).
  double normalizer() const { return z_ * std::exp(-energy_min_); }
  double x_min() const noexcept { return nodes_.front(); }
  double x_max() const noexcept { return nodes_.back(); }
  double pdf(double x) const;
  /// Tabulated CDF, monotone cubic between nodes.
  double cdf(double x) const;
  /// Inverse of the tabulated CDF for u in [0, 1].
  double inverse_cdf(double u) const;
  /// Quadrature of x^2 p(x).
  double second_moment() const;

 private:
  LandauPotential potential_;
  double z_ = 1.0;
  double energy_min_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> cumulative_;
  // Strictly increasing subset used for inversion.
  std::vector<double> inv_u_;
  std::vector<double> inv_x_;
};

/// Inverse-transform sample of n i.i.d. draws; reproducible per seed.
CrossSection sample_landau(const LandauSpec& spec);

/// Baseline plus follow-up values, one row per individual.
struct LongitudinalCohort {
  std::vector<std::string> ids;
  std::vector<double> baseline;
  std::vector<std::string> labels;              // one per follow-up column
  std::vector<std::vector<double>> followups;   // followups[k][i]

  std::size_t size() const noexcept { return baseline.size(); }
};

/// One Euler-Maruyama displacement per individual:
/// x + force(x) dt + sigma sqrt(dt) z. The follow-up column is labelled `label`.
LongitudinalCohort synth_longitudinal(const LangevinModel& model, const CrossSection& baseline, double dt,
                                      std::uint64_t seed, const std::string& label = "followup");

}  // namespace crossdyn
