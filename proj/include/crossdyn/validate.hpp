#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crossdyn/kde.hpp"
#include "crossdyn/markov.hpp"
#include "crossdyn/surrogate.hpp"

namespace crossdyn {

// --- standardisation ----------------------------------------------------------

/// y = (x - median) / std, with the sample (n-1) standard deviation by default.
struct Standardization {
  double median = 0.0;
  double std = 1.0;

  double apply(double x) const { return (x - median) / std; }
  double invert(double y) const { return median + std * y; }
};

/// Throws DegenerateData when the standard deviation is zero.
std::pair<CrossSection, Standardization> standardize(const CrossSection& data, bool unbiased_std = true);

// --- per-individual prediction --------------------------------------------------

struct DisplacementProbabilities {
  double positive = 0.5;  // P_PD
  double negative = 0.5;  // P_ND = 1 - P_PD
};

/// Displacement over dt is N(force(x) dt, sigma sqrt(dt)); returns the
/// probabilities of a positive and a negative move.
DisplacementProbabilities displacement_probabilities(const LangevinModel& model, double x, double dt);

struct Observation {
  DisplacementProbabilities probabilities;
  double displacement = 0.0;  // observed; only its sign matters
};

struct AccuracySummary {
  double average = 0.0;      // mean of P_PD or P_ND picked by the observed sign
  double average_max = 0.0;  // mean of max(P_PD, P_ND)
  std::size_t included = 0;
  std::size_t excluded_zero = 0;  // exact zero displacements, left out
};

/// Throws EmptyCohort when no individual has a nonzero displacement.
AccuracySummary accuracy(std::span<const Observation> observations);

struct DeltaTScan {
  int first = 1;
  int last = 100;
  /// Model time represented by one scan increment.
  double unit = 1.0;
};

/// Multiplier k in [first, last] minimising the Euclidean distance between
/// force(x_i) * k * unit and the observed displacements. Ties go to the smaller k.
int select_delta_t(const LangevinModel& model, std::span<const double> baselines,
                   std::span<const double> displacements, DeltaTScan scan = {});

struct NullDistribution {
  std::vector<double> means;  // one per repetition
  double upper_ci = 0.0;      // 97.5th percentile
};

/// Random-choice null: every repetition picks P_PD or P_ND with probability 1/2
/// per individual and averages. Seed-deterministic.
NullDistribution random_choice_null(std::span<const DisplacementProbabilities> probabilities,
                                    std::size_t repetitions = 1000, std::uint64_t seed = 0);

/// (average - upper_ci) / (average_max - upper_ci). Throws DegenerateScale when
/// average_max <= upper_ci.
double scaled_accuracy(double average, double upper_ci, double average_max);

struct ScaledAccuracy {
  AccuracySummary summary;
  double upper_ci = 0.0;
  /// Absent when the scale is degenerate.
  std::optional<double> scaled;
};

/// accuracy() + random_choice_null() on the included individuals + scaling.
ScaledAccuracy evaluate_accuracy(std::span<const Observation> observations, std::size_t null_repetitions,
                                 std::uint64_t seed);

/// Ceiling case: every individual moves against its standardised value
/// (displacement -y_i), scored with the same model and dt.
ScaledAccuracy ideal_case_accuracy(const LangevinModel& model, std::span<const double> standardized_baselines,
                                   double dt, std::size_t null_repetitions, std::uint64_t seed);

struct BootstrapInterval {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t degenerate = 0;  // resamples with a degenerate scale, skipped
};

/// Percentile interval (2.5%, 97.5%) of the scaled accuracy over resamples of
/// individuals; the null CI is recomputed inside each resample.
BootstrapInterval bootstrap_accuracy(std::span<const Observation> observations, std::size_t repetitions = 1000,
                                     std::size_t null_repetitions = 1000, std::uint64_t seed = 0);

// --- grouping --------------------------------------------------------------------

struct Cluster {
  std::string label;
  double lo;  // inclusive; -inf for the first class
  double hi;  // exclusive; +inf for the last class
  std::vector<std::size_t> members;
  bool disregarded = false;
};

/// Half-open classes (-inf, b0), [b0, b1), ..., [bk, inf). `labels` has one
/// entry more than `boundaries`. Clusters smaller than `min_size` are flagged.
std::vector<Cluster> cluster_by_category(std::span<const double> values, std::span<const double> boundaries,
                                         std::span<const std::string> labels, std::size_t min_size = 20);

/// Underweight / normal / overweight / obese at 18.5, 25 and 30 kg/m^2.
std::vector<Cluster> cluster_bmi(std::span<const double> values, std::size_t min_size = 20);

/// Single class [lo, hi).
Cluster range_cluster(std::span<const double> values, double lo, double hi, std::size_t min_size = 20);

struct HistogramBin {
  double lower = 0.0;  // bin covers [lower, lower + width)
  std::size_t positive = 0;
  std::size_t negative = 0;
  double relative = 0.0;  // (pos - neg) / (pos + neg)
};

/// Bins baselines on origin + k * width; zero displacements count in neither
/// direction and bins without any signed displacement are omitted.
std::vector<HistogramBin> displacement_histogram(std::span<const double> baselines,
                                                 std::span<const double> displacements, double width = 1.0,
                                                 double origin = 0.0);

// --- full pipeline -----------------------------------------------------------------

struct ValidationConfig {
  std::size_t null_repetitions = 1000;
  std::size_t bootstrap_repetitions = 1000;
  int dt_scan_first = 1;
  int dt_scan_last = 100;
};

struct IndividualResult {
  std::string id;
  double baseline = 0.0;
  double p_positive = 0.5;
  double p_negative = 0.5;
  double accuracy = 0.0;      // A_i (NaN when excluded)
  double accuracy_max = 0.5;  // A_i max
  int observed_sign = 0;
};

struct ValidationReport {
  std::string followup_label;
  std::vector<IndividualResult> individuals;
  double average = 0.0;
  double average_max = 0.0;
  double upper_ci = 0.0;
  std::optional<double> scaled;
  std::optional<BootstrapInterval> bootstrap;
  std::optional<double> ideal_scaled;
  int delta_t_multiplier = 1;
  double delta_t = 0.0;
  std::size_t excluded_zero = 0;
  std::vector<std::string> warnings;
};

/// Runs dt selection, accuracies, the random-choice null, scaling, bootstrap
/// and the ideal case for follow-up column `followup` over `members` (all
/// individuals when empty). Values are mapped through `transform` first;
/// `dt_unit` is the model time of one dt scan step.
ValidationReport validate_followup(const LangevinModel& model, const Standardization& transform, double dt_unit,
                                   const LongitudinalCohort& cohort, std::size_t followup,
                                   std::span<const std::size_t> members, const ValidationConfig& config,
                                   std::uint64_t seed);

}  // namespace crossdyn
