#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "crossdyn/kde.hpp"
#include "crossdyn/landscape.hpp"
#include "crossdyn/markov.hpp"
#include "crossdyn/sde.hpp"
#include "crossdyn/surrogate.hpp"
#include "crossdyn/validate.hpp"

namespace crossdyn {

inline constexpr int kSchemaVersion = 1;

/// Everything needed to rebuild a fitted model bit-for-bit.
struct ModelFile {
  Standardization transform;
  double bandwidth = 0.0;
  std::vector<double> samples;  // standardized
  double sigma = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  int fineness = 10;
  double dt = 0.0;
  double dx = 0.0;
  double cost = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::size_t evaluations = 0;
  bool boundary_optimum = false;
  LandscapeFeatures features;  // standardized units; may be empty
  std::string label;
  std::optional<std::uint64_t> seed;

  LangevinModel model() const;
  Grid grid() const;
};

nlohmann::json to_json(const ModelFile& model);
/// Throws SchemaMismatch for a missing or unknown schema_version.
ModelFile model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

/// Tunables shared by the commands. Every key is optional in a config file.
struct RunConfig {
  std::optional<std::uint64_t> seed;
  int fineness = 10;
  double sigma_lo = 0.05;
  double sigma_hi = 10.0;
  double quadrature_tolerance = 1e-12;
  std::size_t min_cluster_size = 20;
  int dt_scan_first = 1;
  int dt_scan_last = 100;
  /// Model time of one dt scan step; defaults to the model's grid dt.
  std::optional<double> dt_unit;
  std::string zero_displacement = "exclude";
  std::size_t null_repetitions = 1000;
  std::size_t bootstrap_repetitions = 1000;
  bool unbiased_std = true;
  double min_barrier = 0.0;
  bool fixed_grid = false;
  std::size_t hellinger_nodes = 4001;
  std::size_t scan_points = 2001;

  /// Throws InvalidArgument when a bound is non-positive or misordered.
  void check() const;
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Cross-section CSV: header `id,value` or `value`. Ids are generated when absent.
struct CrossSectionTable {
  std::vector<std::string> ids;
  CrossSection data;
};
CrossSectionTable read_cross_section(const std::filesystem::path& path);

/// Longitudinal CSV: header `id,baseline,<label_1>,...,<label_k>`.
LongitudinalCohort read_longitudinal(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string cross_section_csv(const std::vector<std::string>& ids, const std::vector<double>& values);
std::string longitudinal_csv(const LongitudinalCohort& cohort);
std::string trajectory_csv(const Trajectory& trajectory, const Standardization& transform);

nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const TransitionStats& stats);

}  // namespace crossdyn
