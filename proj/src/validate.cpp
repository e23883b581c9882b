#include "crossdyn/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "crossdyn/error.hpp"
#include "crossdyn/stats.hpp"

namespace crossdyn {

std::pair<CrossSection, Standardization> standardize(const CrossSection& data, bool unbiased_std) {
  data.check();
  Standardization t{median(data.values), standard_deviation(data.values, unbiased_std)};
  if (!(t.std > 0.0)) throw Error(ErrorCode::DegenerateData, "standard deviation is zero");
  CrossSection out{{}, data.label};
  out.values.reserve(data.values.size());
  for (double v : data.values) out.values.push_back(t.apply(v));
  return {std::move(out), t};
}

DisplacementProbabilities displacement_probabilities(const LangevinModel& model, double x, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "displacement probabilities need dt > 0");
  const double mu = model.landscape.force(x) * dt;
  const double s = model.sigma * std::sqrt(dt);
  DisplacementProbabilities p;
  p.positive = s > 0.0 ? 1.0 - normal_cdf(-mu / s) : (mu > 0.0 ? 1.0 : (mu < 0.0 ? 0.0 : 0.5));
  p.negative = 1.0 - p.positive;
  return p;
}

AccuracySummary accuracy(std::span<const Observation> observations) {
  AccuracySummary s;
  double sum = 0.0;
  double sum_max = 0.0;
  for (const auto& o : observations) {
    if (o.displacement == 0.0) {
      ++s.excluded_zero;
      continue;
    }
    const auto& p = o.probabilities;
    sum += o.displacement > 0.0 ? p.positive : p.negative;
    sum_max += std::max(p.positive, p.negative);
    ++s.included;
  }
  if (s.included == 0) throw Error(ErrorCode::EmptyCohort, "no individual with a nonzero observed displacement");
  s.average = sum / static_cast<double>(s.included);
  s.average_max = sum_max / static_cast<double>(s.included);
  return s;
}

int select_delta_t(const LangevinModel& model, std::span<const double> baselines,
                   std::span<const double> displacements, DeltaTScan scan) {
  if (baselines.empty()) throw Error(ErrorCode::EmptyCohort, "dt selection needs a nonempty cohort");
  if (baselines.size() != displacements.size())
    throw Error(ErrorCode::InvalidArgument, "dt selection: baseline and displacement sizes differ");
  if (scan.first < 1 || scan.last < scan.first || !(scan.unit > 0.0))
    throw Error(ErrorCode::InvalidArgument, "dt selection: invalid scan bounds");

  std::vector<double> force(baselines.size());
  for (std::size_t i = 0; i < baselines.size(); ++i) force[i] = model.landscape.force(baselines[i]);

  int best = scan.first;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int k = scan.first; k <= scan.last; ++k) {
    const double dt = k * scan.unit;
    double ss = 0.0;
    for (std::size_t i = 0; i < force.size(); ++i) {
      const double r = force[i] * dt - displacements[i];
      ss += r * r;
    }
    const double dist = std::sqrt(ss);
    if (dist < best_dist) {
      best_dist = dist;
      best = k;
    }
  }
  return best;
}

namespace {

// Null means for fixed per-individual (P_PD, P_ND) arrays.
std::vector<double> null_means(std::span<const double> positive, std::span<const double> negative,
                               std::size_t repetitions, std::uint64_t seed) {
  const std::size_t n = positive.size();
  double base = 0.0;
  std::vector<double> delta(n);
  for (std::size_t i = 0; i < n; ++i) {
    base += negative[i];
    delta[i] = positive[i] - negative[i];
  }
  std::mt19937_64 rng(seed);
  std::vector<double> means(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r) {
    double sum = base;
    std::size_t i = 0;
    while (i < n) {
      std::uint64_t bits = rng();
      const std::size_t end = std::min(n, i + 64);
      for (; i < end; ++i, bits >>= 1) sum += delta[i] * static_cast<double>(bits & 1U);
    }
    means[r] = sum / static_cast<double>(n);
  }
  return means;
}

double upper_ci(std::vector<double> means) {
  std::sort(means.begin(), means.end());
  return quantile_sorted(means, 0.975);
}

}  // namespace

NullDistribution random_choice_null(std::span<const DisplacementProbabilities> probabilities,
                                    std::size_t repetitions, std::uint64_t seed) {
  if (probabilities.empty()) throw Error(ErrorCode::EmptyCohort, "random-choice null needs a nonempty cohort");
  if (repetitions == 0) throw Error(ErrorCode::InvalidArgument, "random-choice null needs repetitions > 0");
  std::vector<double> pos, neg;
  pos.reserve(probabilities.size());
  neg.reserve(probabilities.size());
  for (const auto& p : probabilities) {
    pos.push_back(p.positive);
    neg.push_back(p.negative);
  }
  NullDistribution out;
  out.means = null_means(pos, neg, repetitions, seed);
  out.upper_ci = upper_ci(out.means);
  return out;
}

double scaled_accuracy(double average, double upper_ci, double average_max) {
  if (!(average_max > upper_ci))
    throw Error(ErrorCode::DegenerateScale, "maximum accuracy does not exceed the random-choice upper CI");
  return (average - upper_ci) / (average_max - upper_ci);
}

ScaledAccuracy evaluate_accuracy(std::span<const Observation> observations, std::size_t null_repetitions,
                                 std::uint64_t seed) {
  ScaledAccuracy out;
  out.summary = accuracy(observations);
  std::vector<DisplacementProbabilities> included;
  included.reserve(out.summary.included);
  for (const auto& o : observations)
    if (o.displacement != 0.0) included.push_back(o.probabilities);
  out.upper_ci = random_choice_null(included, null_repetitions, seed).upper_ci;
  if (out.summary.average_max > out.upper_ci)
    out.scaled = scaled_accuracy(out.summary.average, out.upper_ci, out.summary.average_max);
  return out;
}

ScaledAccuracy ideal_case_accuracy(const LangevinModel& model, std::span<const double> standardized_baselines,
                                   double dt, std::size_t null_repetitions, std::uint64_t seed) {
  std::vector<Observation> obs;
  obs.reserve(standardized_baselines.size());
  for (double y : standardized_baselines) obs.push_back({displacement_probabilities(model, y, dt), -y});
  return evaluate_accuracy(obs, null_repetitions, seed);
}

BootstrapInterval bootstrap_accuracy(std::span<const Observation> observations, std::size_t repetitions,
                                     std::size_t null_repetitions, std::uint64_t seed) {
  if (observations.size() < 2) throw Error(ErrorCode::EmptyCohort, "bootstrap needs at least 2 individuals");
  if (repetitions == 0) throw Error(ErrorCode::InvalidArgument, "bootstrap needs repetitions > 0");

  BootstrapInterval out;
  std::vector<double> stats;
  stats.reserve(repetitions);
  const std::size_t n = observations.size();
  std::vector<double> pos, neg;
  pos.reserve(n);
  neg.reserve(n);
  for (std::size_t r = 0; r < repetitions; ++r) {
    std::mt19937_64 rng(derive_seed(seed, 2 * r));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    pos.clear();
    neg.clear();
    double sum = 0.0;
    double sum_max = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& o = observations[pick(rng)];
      if (o.displacement == 0.0) continue;
      const auto& p = o.probabilities;
      sum += o.displacement > 0.0 ? p.positive : p.negative;
      sum_max += std::max(p.positive, p.negative);
      pos.push_back(p.positive);
      neg.push_back(p.negative);
    }
    if (pos.empty()) {
      ++out.degenerate;
      continue;
    }
    const double m = static_cast<double>(pos.size());
    const double ci = upper_ci(null_means(pos, neg, null_repetitions, derive_seed(seed, 2 * r + 1)));
    if (!(sum_max / m > ci)) {
      ++out.degenerate;
      continue;
    }
    stats.push_back(scaled_accuracy(sum / m, ci, sum_max / m));
  }
  if (stats.empty()) throw Error(ErrorCode::DegenerateScale, "every bootstrap resample had a degenerate scale");
  std::sort(stats.begin(), stats.end());
  out.lo = quantile_sorted(stats, 0.025);
  out.hi = quantile_sorted(stats, 0.975);
  return out;
}

// --- grouping ------------------------------------------------------------------

std::vector<Cluster> cluster_by_category(std::span<const double> values, std::span<const double> boundaries,
                                         std::span<const std::string> labels, std::size_t min_size) {
  if (labels.size() != boundaries.size() + 1)
    throw Error(ErrorCode::InvalidArgument, "need one label more than boundaries");
  for (std::size_t i = 1; i < boundaries.size(); ++i)
    if (!(boundaries[i] > boundaries[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "category boundaries must be strictly increasing");

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<Cluster> clusters;
  for (std::size_t k = 0; k < labels.size(); ++k)
    clusters.push_back({labels[k], k == 0 ? -inf : boundaries[k - 1], k == boundaries.size() ? inf : boundaries[k],
                        {}, false});
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto k = static_cast<std::size_t>(std::upper_bound(boundaries.begin(), boundaries.end(), values[i]) -
                                            boundaries.begin());
    clusters[k].members.push_back(i);
  }
  for (auto& c : clusters) c.disregarded = c.members.size() < min_size;
  return clusters;
}

std::vector<Cluster> cluster_bmi(std::span<const double> values, std::size_t min_size) {
  static const std::vector<double> boundaries{18.5, 25.0, 30.0};
  static const std::vector<std::string> labels{"underweight", "normal weight", "overweight", "obese"};
  return cluster_by_category(values, boundaries, labels, min_size);
}

Cluster range_cluster(std::span<const double> values, double lo, double hi, std::size_t min_size) {
  if (!(hi > lo)) throw Error(ErrorCode::InvalidArgument, "range needs hi > lo");
  Cluster c{"range", lo, hi, {}, false};
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] >= lo && values[i] < hi) c.members.push_back(i);
  c.disregarded = c.members.size() < min_size;
  return c;
}

std::vector<HistogramBin> displacement_histogram(std::span<const double> baselines,
                                                 std::span<const double> displacements, double width,
                                                 double origin) {
  if (baselines.empty()) throw Error(ErrorCode::EmptyCohort, "histogram needs a nonempty cohort");
  if (baselines.size() != displacements.size())
    throw Error(ErrorCode::InvalidArgument, "histogram: baseline and displacement sizes differ");
  if (!(width > 0.0)) throw Error(ErrorCode::InvalidArgument, "histogram bin width must be positive");

  std::map<long long, HistogramBin> bins;
  for (std::size_t i = 0; i < baselines.size(); ++i) {
    if (displacements[i] == 0.0) continue;
    const auto k = static_cast<long long>(std::floor((baselines[i] - origin) / width));
    auto& bin = bins[k];
    bin.lower = origin + static_cast<double>(k) * width;
    (displacements[i] > 0.0 ? bin.positive : bin.negative) += 1;
  }
  std::vector<HistogramBin> out;
  out.reserve(bins.size());
  for (auto& [k, bin] : bins) {
    const double pos = static_cast<double>(bin.positive);
    const double neg = static_cast<double>(bin.negative);
    bin.relative = (pos - neg) / (pos + neg);
    out.push_back(bin);
  }
  return out;
}

// --- pipeline --------------------------------------------------------------------

ValidationReport validate_followup(const LangevinModel& model, const Standardization& transform, double dt_unit,
                                   const LongitudinalCohort& cohort, std::size_t followup,
                                   std::span<const std::size_t> members, const ValidationConfig& config,
                                   std::uint64_t seed) {
  if (followup >= cohort.followups.size()) throw Error(ErrorCode::InvalidArgument, "follow-up column out of range");
  std::vector<std::size_t> index(members.begin(), members.end());
  if (index.empty())
    for (std::size_t i = 0; i < cohort.size(); ++i) index.push_back(i);

  const auto& after = cohort.followups[followup];
  std::vector<double> y, d;
  y.reserve(index.size());
  d.reserve(index.size());
  for (std::size_t i : index) {
    y.push_back(transform.apply(cohort.baseline[i]));
    d.push_back(transform.apply(after[i]) - transform.apply(cohort.baseline[i]));
  }

  ValidationReport report;
  report.followup_label = cohort.labels.at(followup);
  report.delta_t_multiplier = select_delta_t(model, y, d, {config.dt_scan_first, config.dt_scan_last, dt_unit});
  report.delta_t = report.delta_t_multiplier * dt_unit;

  std::vector<Observation> obs;
  obs.reserve(index.size());
  for (std::size_t k = 0; k < index.size(); ++k) {
    const std::size_t i = index[k];
    const double raw = after[i] - cohort.baseline[i];
    const auto p = displacement_probabilities(model, y[k], report.delta_t);
    obs.push_back({p, raw});
    IndividualResult r;
    r.id = cohort.ids.at(i);
    r.baseline = cohort.baseline[i];
    r.p_positive = p.positive;
    r.p_negative = p.negative;
    r.observed_sign = raw > 0.0 ? 1 : (raw < 0.0 ? -1 : 0);
    r.accuracy = r.observed_sign > 0 ? p.positive
                 : r.observed_sign < 0 ? p.negative
                                       : std::numeric_limits<double>::quiet_NaN();
    r.accuracy_max = std::max(p.positive, p.negative);
    report.individuals.push_back(std::move(r));
  }

  const ScaledAccuracy measured = evaluate_accuracy(obs, config.null_repetitions, derive_seed(seed, 1));
  report.average = measured.summary.average;
  report.average_max = measured.summary.average_max;
  report.excluded_zero = measured.summary.excluded_zero;
  report.upper_ci = measured.upper_ci;
  report.scaled = measured.scaled;
  if (!report.scaled) report.warnings.push_back("DegenerateScale: maximum accuracy does not exceed the null CI");

  if (config.bootstrap_repetitions > 0 && obs.size() >= 2) {
    try {
      report.bootstrap =
          bootstrap_accuracy(obs, config.bootstrap_repetitions, config.null_repetitions, derive_seed(seed, 2));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateScale) throw;
      report.warnings.push_back(std::string("DegenerateScale: ") + e.what());
    }
  }

  try {
    const auto ideal = ideal_case_accuracy(model, y, report.delta_t, config.null_repetitions, derive_seed(seed, 3));
    report.ideal_scaled = ideal.scaled;
    if (!ideal.scaled) report.warnings.push_back("DegenerateScale: ideal case");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyCohort) throw;
    report.warnings.push_back(std::string("EmptyCohort: ideal case: ") + e.what());
  }
  return report;
}

}  // namespace crossdyn
