#include "crossdyn/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "crossdyn/error.hpp"

namespace crossdyn {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void check_schema(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("schema_version"))
    throw Error(ErrorCode::SchemaMismatch, what + ": missing schema_version");
  const int version = j.at("schema_version").get<int>();
  if (version != kSchemaVersion)
    throw Error(ErrorCode::SchemaMismatch, what + ": unsupported schema_version " + std::to_string(version));
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Non-empty lines paired with their 1-based line numbers; strips a UTF-8 BOM.
std::vector<std::pair<std::size_t, std::string>> csv_lines(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    lines.emplace_back(number, line);
  }
  return lines;
}

double parse_number(const std::string& text, const std::filesystem::path& path, std::size_t line,
                    std::size_t column) {
  const auto fail = [&] {
    return Error(ErrorCode::ParseError, path.string() + ": line " + std::to_string(line) + ", column " +
                                            std::to_string(column) + ": not a finite number: '" + text + "'");
  };
  if (text.empty()) throw fail();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw fail();
  }
  if (used != text.size() || !std::isfinite(v)) throw fail();
  return v;
}

std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return ss.str();
}

}  // namespace

// --- model file ------------------------------------------------------------------

LangevinModel ModelFile::model() const {
  return LangevinModel{EnergyLandscape(DensityModel(samples, bandwidth)), sigma};
}

Grid ModelFile::grid() const { return build_grid_with_step(x_min, x_max, dt, fineness); }

json to_json(const ModelFile& m) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["label"] = m.label;
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  j["standardization"] = {{"median", m.transform.median}, {"std", m.transform.std}};
  j["kde"] = {{"bandwidth", m.bandwidth}, {"samples", m.samples}};
  j["sigma"] = m.sigma;
  j["beta"] = 1.0;
  j["grid"] = {{"x_min", m.x_min}, {"x_max", m.x_max}, {"fineness", m.fineness}, {"dt", m.dt}, {"dx", m.dx}};
  j["fit"] = {{"cost", m.cost},
              {"bracket", {m.bracket_lo, m.bracket_hi}},
              {"evaluations", m.evaluations},
              {"boundary_optimum", m.boundary_optimum}};
  j["features"] = {{"attractors", m.features.attractors}, {"tipping_points", m.features.tipping_points}};
  return j;
}

ModelFile model_from_json(const json& j) {
  check_schema(j, "model file");
  try {
    ModelFile m;
    m.label = get_or<std::string>(j, "label", "");
    if (j.contains("seed") && !j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    m.transform.median = j.at("standardization").at("median").get<double>();
    m.transform.std = j.at("standardization").at("std").get<double>();
    m.bandwidth = j.at("kde").at("bandwidth").get<double>();
    m.samples = j.at("kde").at("samples").get<std::vector<double>>();
    m.sigma = j.at("sigma").get<double>();
    const auto& g = j.at("grid");
    m.x_min = g.at("x_min").get<double>();
    m.x_max = g.at("x_max").get<double>();
    m.fineness = g.at("fineness").get<int>();
    m.dt = g.at("dt").get<double>();
    m.dx = g.at("dx").get<double>();
    const auto& f = j.at("fit");
    m.cost = f.at("cost").get<double>();
    m.bracket_lo = f.at("bracket").at(0).get<double>();
    m.bracket_hi = f.at("bracket").at(1).get<double>();
    m.evaluations = f.at("evaluations").get<std::size_t>();
    m.boundary_optimum = f.at("boundary_optimum").get<bool>();
    if (j.contains("features")) {
      m.features.attractors = j.at("features").at("attractors").get<std::vector<double>>();
      m.features.tipping_points = j.at("features").at("tipping_points").get<std::vector<double>>();
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
  write_file_atomic(path, to_json(model).dump(2) + "\n");
}

ModelFile load_model(const std::filesystem::path& path) { return model_from_json(parse_json(path)); }

// --- config ------------------------------------------------------------------------

void RunConfig::check() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "config: " + what); };
  if (fineness < 1) fail("fineness must be >= 1");
  if (!(sigma_lo > 0.0 && sigma_hi > sigma_lo)) fail("sigma bounds must satisfy 0 < lo < hi");
  if (!(quadrature_tolerance > 0.0)) fail("quadrature tolerance must be positive");
  if (dt_scan_first < 1 || dt_scan_last < dt_scan_first) fail("dt scan must satisfy 1 <= first <= last");
  if (dt_unit && !(*dt_unit > 0.0)) fail("dt unit must be positive");
  if (zero_displacement != "exclude") fail("only the 'exclude' zero-displacement policy is supported");
  if (null_repetitions == 0) fail("null repetitions must be positive");
  if (min_barrier < 0.0) fail("min_barrier must be nonnegative");
  if (hellinger_nodes < 2) fail("hellinger_nodes must be >= 2");
  if (scan_points < 100) fail("scan_points must be >= 100");
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  try {
    if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
    c.fineness = get_or(j, "fineness", c.fineness);
    if (j.contains("sigma_bounds")) {
      c.sigma_lo = j.at("sigma_bounds").at(0).get<double>();
      c.sigma_hi = j.at("sigma_bounds").at(1).get<double>();
    }
    c.quadrature_tolerance = get_or(j, "quadrature_tolerance", c.quadrature_tolerance);
    c.min_cluster_size = get_or(j, "min_cluster_size", c.min_cluster_size);
    if (j.contains("dt_scan")) {
      c.dt_scan_first = j.at("dt_scan").at(0).get<int>();
      c.dt_scan_last = j.at("dt_scan").at(1).get<int>();
    }
    if (j.contains("dt_unit") && !j.at("dt_unit").is_null()) c.dt_unit = j.at("dt_unit").get<double>();
    c.zero_displacement = get_or(j, "zero_displacement", c.zero_displacement);
    c.null_repetitions = get_or(j, "null_repetitions", c.null_repetitions);
    c.bootstrap_repetitions = get_or(j, "bootstrap_repetitions", c.bootstrap_repetitions);
    c.unbiased_std = get_or(j, "unbiased_std", c.unbiased_std);
    c.min_barrier = get_or(j, "min_barrier", c.min_barrier);
    c.fixed_grid = get_or(j, "fixed_grid", c.fixed_grid);
    c.hellinger_nodes = get_or(j, "hellinger_nodes", c.hellinger_nodes);
    c.scan_points = get_or(j, "scan_points", c.scan_points);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  c.check();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) { return config_from_json(parse_json(path)); }

// --- CSV ---------------------------------------------------------------------------

CrossSectionTable read_cross_section(const std::filesystem::path& path) {
  const auto lines = csv_lines(path);
  if (lines.empty()) throw Error(ErrorCode::ParseError, path.string() + ": empty file");
  const auto header = split_fields(lines[0].second);
  std::optional<std::size_t> id_col;
  std::optional<std::size_t> value_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "id") id_col = c;
    if (header[c] == "value") value_col = c;
  }
  if (!value_col)
    throw Error(ErrorCode::ParseError, path.string() + ": line " + std::to_string(lines[0].first) +
                                           ": header must name a 'value' column");

  CrossSectionTable table;
  table.data.label = path.stem().string();
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& [number, line] = lines[r];
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw Error(ErrorCode::ParseError, path.string() + ": line " + std::to_string(number) + ": expected " +
                                             std::to_string(header.size()) + " columns, found " +
                                             std::to_string(fields.size()));
    table.data.values.push_back(parse_number(fields[*value_col], path, number, *value_col + 1));
    table.ids.push_back(id_col ? fields[*id_col] : std::to_string(r));
  }
  return table;
}

LongitudinalCohort read_longitudinal(const std::filesystem::path& path) {
  const auto lines = csv_lines(path);
  if (lines.empty()) throw Error(ErrorCode::ParseError, path.string() + ": empty file");
  const auto header = split_fields(lines[0].second);
  if (header.size() < 3 || header[0] != "id" || header[1] != "baseline")
    throw Error(ErrorCode::ParseError, path.string() + ": line " + std::to_string(lines[0].first) +
                                           ": header must be id,baseline,<followup labels...>");
  LongitudinalCohort cohort;
  cohort.labels.assign(header.begin() + 2, header.end());
  cohort.followups.assign(cohort.labels.size(), {});
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& [number, line] = lines[r];
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw Error(ErrorCode::ParseError, path.string() + ": line " + std::to_string(number) + ": expected " +
                                             std::to_string(header.size()) + " columns, found " +
                                             std::to_string(fields.size()));
    cohort.ids.push_back(fields[0]);
    cohort.baseline.push_back(parse_number(fields[1], path, number, 2));
    for (std::size_t k = 0; k < cohort.labels.size(); ++k)
      cohort.followups[k].push_back(parse_number(fields[k + 2], path, number, k + 3));
  }
  return cohort;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << contents;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string cross_section_csv(const std::vector<std::string>& ids, const std::vector<double>& values) {
  std::ostringstream ss;
  ss << "id,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) ss << ids.at(i) << ',' << format_double(values[i]) << '\n';
  return ss.str();
}

std::string longitudinal_csv(const LongitudinalCohort& cohort) {
  std::ostringstream ss;
  ss << "id,baseline";
  for (const auto& l : cohort.labels) ss << ',' << l;
  ss << '\n';
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    ss << cohort.ids[i] << ',' << format_double(cohort.baseline[i]);
    for (const auto& col : cohort.followups) ss << ',' << format_double(col[i]);
    ss << '\n';
  }
  return ss.str();
}

std::string trajectory_csv(const Trajectory& trajectory, const Standardization& transform) {
  std::ostringstream ss;
  ss << "time,state\n";
  for (std::size_t k = 0; k < trajectory.states.size(); ++k)
    ss << format_double(trajectory.times[k]) << ',' << format_double(transform.invert(trajectory.states[k])) << '\n';
  return ss.str();
}

json to_json(const ValidationReport& r) {
  json individuals = json::array();
  for (const auto& i : r.individuals) {
    individuals.push_back({{"id", i.id},
                           {"baseline", i.baseline},
                           {"p_pd", i.p_positive},
                           {"p_nd", i.p_negative},
                           {"a_i", std::isnan(i.accuracy) ? json(nullptr) : json(i.accuracy)},
                           {"a_i_max", i.accuracy_max},
                           {"observed_sign", i.observed_sign}});
  }
  json j;
  j["followup"] = r.followup_label;
  j["a_average"] = r.average;
  j["a_average_max"] = r.average_max;
  j["u_ci"] = r.upper_ci;
  j["a_scaled"] = r.scaled ? json(*r.scaled) : json(nullptr);
  j["bootstrap_ci"] = r.bootstrap ? json::array({r.bootstrap->lo, r.bootstrap->hi}) : json(nullptr);
  j["ideal_scaled"] = r.ideal_scaled ? json(*r.ideal_scaled) : json(nullptr);
  j["delta_t_multiplier"] = r.delta_t_multiplier;
  j["delta_t_used"] = r.delta_t;
  j["excluded_zero"] = r.excluded_zero;
  j["warnings"] = r.warnings;
  j["per_individual"] = std::move(individuals);
  return j;
}

json to_json(const TransitionStats& s) {
  return {{"transition_count", s.transition_count},
          {"total_time", s.total_time},
          {"mean_time_between", s.mean_time_between ? json(*s.mean_time_between) : json(nullptr)}};
}

}  // namespace crossdyn
