#include "crossdyn/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "crossdyn/error.hpp"
#include "crossdyn/intervene.hpp"
#include "crossdyn/stats.hpp"

namespace crossdyn::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct FullFit {
  ModelFile file;
  DiscreteChain chain;
};

FullFit fit_full(const CrossSection& data, const RunConfig& config) {
  config.check();
  data.check();
  auto [standardized, transform] = standardize(data, config.unbiased_std);
  DensityModel density = DensityModel::fit(standardized, {config.unbiased_std});
  EnergyLandscape landscape(density);

  SigmaFitOptions options;
  options.sigma_lo = config.sigma_lo;
  options.sigma_hi = config.sigma_hi;
  options.fineness = config.fineness;
  options.hellinger_nodes = config.hellinger_nodes;
  options.fixed_grid = config.fixed_grid;
  SigmaFit fit = fit_sigma(landscape, density, options);

  ModelFile m;
  m.transform = transform;
  m.bandwidth = density.bandwidth();
  m.samples = standardized.values;
  m.sigma = fit.model.sigma;
  const Grid& g = fit.chain.grid;
  m.x_min = g.x_min;
  m.x_max = g.x_max;
  m.fineness = g.fineness;
  m.dt = g.dt;
  m.dx = g.dx;
  m.cost = fit.cost;
  m.bracket_lo = fit.bracket_lo;
  m.bracket_hi = fit.bracket_hi;
  m.evaluations = fit.evaluations;
  m.boundary_optimum = fit.boundary_optimum;
  m.label = data.label;
  m.seed = config.seed;
  try {
    m.features = find_features(landscape, g.x_min, g.x_max, {config.scan_points, 1e-8, config.min_barrier});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoAttractorFound) throw;
  }
  return {std::move(m), std::move(fit.chain)};
}

std::string number(double v) {
  std::ostringstream ss;
  ss << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return ss.str();
}

json seed_json(const std::optional<std::uint64_t>& seed) { return seed ? json(*seed) : json(nullptr); }

std::vector<double> to_original(const std::vector<double>& xs, const Standardization& t) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(t.invert(x));
  return out;
}

json features_json(const LandscapeFeatures& f, const Standardization& t) {
  return {{"attractors", to_original(f.attractors, t)}, {"tipping_points", to_original(f.tipping_points, t)}};
}

std::string curves_csv(const ModelFile& m, const DiscreteChain& chain) {
  const LangevinModel model = m.model();
  const StationaryDensity stationary(chain);
  std::ostringstream ss;
  ss << "x,x_original,pdf,energy,force,stationary_density\n";
  for (double x : chain.grid.points) {
    const auto& land = model.landscape;
    ss << number(x) << ',' << number(m.transform.invert(x)) << ',' << number(land.density().pdf(x)) << ','
       << number(land.energy(x)) << ',' << number(land.force(x)) << ',' << number(stationary(x)) << '\n';
  }
  return ss.str();
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

// Parsed command-line state shared by the subcommands.
struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out = ".";

  RunConfig config() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) c.seed = seed;
    c.check();
    return c;
  }
  fs::path dir() const {
    fs::create_directories(out);
    return fs::path(out);
  }
};

std::uint64_t require_seed(const RunConfig& config, const char* command) {
  if (!config.seed)
    throw Error(ErrorCode::InvalidArgument, std::string(command) + " is stochastic and needs --seed");
  return *config.seed;
}

int cmd_fit(const Globals& g, const std::string& input) {
  const RunConfig config = g.config();
  const CrossSectionTable table = read_cross_section(input);
  const FullFit fit = fit_full(table.data, config);
  const fs::path dir = g.dir();
  save_model(dir / "model.json", fit.file);
  write_file_atomic(dir / "curves.csv", curves_csv(fit.file, fit.chain));

  json summary = {{"sigma", fit.file.sigma},
                  {"cost", fit.file.cost},
                  {"grid_points", fit.chain.grid.size()},
                  {"features", features_json(fit.file.features, fit.file.transform)}};
  std::cout << summary.dump() << '\n';
  if (fit.file.boundary_optimum)
    throw Error(ErrorCode::BoundaryOptimum,
                "fitted sigma " + number(fit.file.sigma) + " lies at the edge of the search range");
  return 0;
}

int cmd_surrogate(const Globals& g, double a, double b, std::size_t n) {
  const RunConfig config = g.config();
  const std::uint64_t seed = require_seed(config, "surrogate");
  const CrossSection data = sample_landau({a, b, n, seed});
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i + 1));
  write_file_atomic(g.dir() / "surrogate.csv", cross_section_csv(ids, data.values));
  return 0;
}

int cmd_simulate(const Globals& g, const std::string& model_path, double x0, std::size_t steps,
                 std::optional<double> dt, std::optional<double> tipping_point) {
  const RunConfig config = g.config();
  const std::uint64_t seed = require_seed(config, "simulate");
  const ModelFile m = load_model(model_path);
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "simulate needs --steps >= 1");
  const double step = dt.value_or(m.dt);
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "simulate needs dt > 0");

  const Trajectory traj = simulate(m.model(), m.transform.apply(x0), step, steps, seed);
  double tp_std = 0.0;
  if (tipping_point)
    tp_std = m.transform.apply(*tipping_point);
  else if (!m.features.tipping_points.empty())
    tp_std = m.features.tipping_points.front();
  const TransitionStats stats = count_transitions(traj, tp_std);

  const fs::path dir = g.dir();
  write_file_atomic(dir / "trajectory.csv", trajectory_csv(traj, m.transform));
  json j = to_json(stats);
  j["schema_version"] = kSchemaVersion;
  j["seed"] = seed;
  j["dt"] = step;
  j["steps"] = steps;
  j["x0"] = x0;
  j["tipping_point"] = m.transform.invert(tp_std);
  write_json(dir / "transitions.json", j);
  return 0;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--range expects lo:hi");
  try {
    const double lo = std::stod(text.substr(0, colon));
    const double hi = std::stod(text.substr(colon + 1));
    if (!(hi > lo)) throw Error(ErrorCode::InvalidArgument, "--range needs lo < hi");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidArgument, "--range expects numbers lo:hi");
  }
}

struct ValidateArgs {
  std::string input;
  std::string model_path;
  bool refit = false;
  std::string clusters;
  std::string range;
  double bin_width = 1.0;
  double bin_origin = 0.0;
};

int cmd_validate(const Globals& g, const ValidateArgs& args) {
  const RunConfig config = g.config();
  const std::uint64_t seed = require_seed(config, "validate");
  if (args.refit == !args.model_path.empty())
    throw Error(ErrorCode::InvalidArgument, "validate needs exactly one of --model or --refit");
  if (!args.clusters.empty() && args.clusters != "bmi")
    throw Error(ErrorCode::InvalidArgument, "--clusters supports only 'bmi'");
  if (!args.clusters.empty() && !args.range.empty())
    throw Error(ErrorCode::InvalidArgument, "--clusters and --range are exclusive");

  const LongitudinalCohort cohort = read_longitudinal(args.input);
  if (cohort.size() == 0) throw Error(ErrorCode::EmptyCohort, "longitudinal file has no rows");

  ValidationConfig vconf;
  vconf.null_repetitions = config.null_repetitions;
  vconf.bootstrap_repetitions = config.bootstrap_repetitions;
  vconf.dt_scan_first = config.dt_scan_first;
  vconf.dt_scan_last = config.dt_scan_last;

  const auto model_for = [&](const std::vector<std::size_t>& members) {
    if (!args.refit) return load_model(args.model_path);
    CrossSection base;
    base.label = "baseline";
    for (std::size_t i : members) base.values.push_back(cohort.baseline[i]);
    return fit_full(base, config).file;
  };

  std::vector<Cluster> groups;
  std::vector<std::size_t> everyone(cohort.size());
  for (std::size_t i = 0; i < everyone.size(); ++i) everyone[i] = i;
  groups.push_back({"all", -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                    everyone, false});
  if (args.clusters == "bmi")
    for (auto& c : cluster_bmi(cohort.baseline, config.min_cluster_size)) groups.push_back(std::move(c));
  if (!args.range.empty()) {
    const auto [lo, hi] = parse_range(args.range);
    groups.push_back(range_cluster(cohort.baseline, lo, hi, config.min_cluster_size));
  }

  json reports = json::array();
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const Cluster& cl = groups[gi];
    json entry = {{"cluster", cl.label},
                  {"lo", std::isfinite(cl.lo) ? json(cl.lo) : json(nullptr)},
                  {"hi", std::isfinite(cl.hi) ? json(cl.hi) : json(nullptr)},
                  {"members", cl.members.size()},
                  {"disregarded", cl.disregarded}};
    json followups = json::array();
    std::vector<std::string> warnings;
    if (!cl.disregarded) {
      try {
        const ModelFile m = model_for(cl.members);
        entry["sigma"] = m.sigma;
        const double unit = config.dt_unit.value_or(m.dt);
        const LangevinModel model = m.model();
        for (std::size_t k = 0; k < cohort.followups.size(); ++k) {
          try {
            json r = to_json(validate_followup(model, m.transform, unit, cohort, k, cl.members, vconf,
                                               derive_seed(seed, gi * 1000 + k)));
            followups.push_back(std::move(r));
          } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptyCohort && e.code() != ErrorCode::DegenerateScale) throw;
            warnings.push_back(std::string(to_string(e.code())) + ": " + cohort.labels[k] + ": " + e.what());
          }
        }
      } catch (const Error& e) {
        if (gi == 0 || (e.code() != ErrorCode::DegenerateData && e.code() != ErrorCode::EmptyCohort)) throw;
        warnings.push_back(std::string(to_string(e.code())) + ": " + e.what());
      }
    }
    entry["followups"] = std::move(followups);
    entry["warnings"] = warnings;
    reports.push_back(std::move(entry));
  }

  const fs::path dir = g.dir();
  json out = {{"schema_version", kSchemaVersion},
              {"seed", seed},
              {"input", args.input},
              {"model", args.refit ? json("refit") : json(args.model_path)},
              {"reports", std::move(reports)}};
  write_json(dir / "report.json", out);

  std::ostringstream hist;
  hist << "followup,bin_lower,bin_upper,positive,negative,relative\n";
  for (std::size_t k = 0; k < cohort.followups.size(); ++k) {
    std::vector<double> d(cohort.size());
    for (std::size_t i = 0; i < cohort.size(); ++i) d[i] = cohort.followups[k][i] - cohort.baseline[i];
    for (const auto& bin : displacement_histogram(cohort.baseline, d, args.bin_width, args.bin_origin))
      hist << cohort.labels[k] << ',' << number(bin.lower) << ',' << number(bin.lower + args.bin_width) << ','
           << bin.positive << ',' << bin.negative << ',' << number(bin.relative) << '\n';
  }
  write_file_atomic(dir / "histogram.csv", hist.str());
  return 0;
}

struct InterveneArgs {
  std::string model_path;
  std::optional<double> a;
  std::optional<double> b;
  double c = 0.0;
  double t = 0.0;
  std::optional<double> sigma;
  std::optional<double> threshold;
};

int cmd_intervene(const Globals& g, const InterveneArgs& args) {
  const RunConfig config = g.config();
  const QuadratureOptions quad{config.quadrature_tolerance, 20};
  json j = {{"schema_version", kSchemaVersion}, {"seed", seed_json(config.seed)}, {"c", args.c}, {"t", args.t}};

  if (!args.model_path.empty()) {
    if (args.a || args.b) throw Error(ErrorCode::InvalidArgument, "intervene takes --model or --a/--b, not both");
    const ModelFile m = load_model(args.model_path);
    const LangevinModel model = m.model();
    const double sigma = args.sigma.value_or(m.sigma);
    double threshold = 0.0;
    if (args.threshold)
      threshold = m.transform.apply(*args.threshold);
    else if (!m.features.tipping_points.empty())
      threshold = m.features.tipping_points.front();
    const double below = occupancy_fraction(model.landscape, args.c, threshold, m.x_min, m.x_max, quad);
    const EnergyLandscape tilted = tilted_landscape(model.landscape, args.c);
    LandscapeFeatures tf;
    try {
      tf = find_features(tilted, m.x_min, m.x_max, {config.scan_points, 1e-8, config.min_barrier});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoAttractorFound) throw;
    }
    j["source"] = args.model_path;
    j["sigma"] = sigma;
    j["r"] = relative_effort(model.landscape, args.c, args.t, sigma, m.x_min, m.x_max, quad);
    j["threshold"] = m.transform.invert(threshold);
    j["occupancy_below"] = below;
    j["occupancy_above"] = 1.0 - below;
    j["tilted"] = features_json(tf, m.transform);
  } else {
    if (!args.a || !args.b) throw Error(ErrorCode::InvalidArgument, "intervene needs --model or both --a and --b");
    if (!args.sigma) throw Error(ErrorCode::InvalidArgument, "intervene on a Landau potential needs --sigma");
    const LandauPotential p{*args.a, *args.b};
    const double threshold = args.threshold.value_or(0.0);
    const double below = occupancy_fraction(p, args.c, threshold, quad);
    const LandscapeFeatures tf = landau_features(p, args.c);
    j["source"] = {{"landau", {{"a", p.a}, {"b", p.b}}}};
    j["sigma"] = *args.sigma;
    j["r"] = relative_effort(p, args.c, args.t, *args.sigma, quad);
    j["threshold"] = threshold;
    j["occupancy_below"] = below;
    j["occupancy_above"] = 1.0 - below;
    j["tilted"] = {{"attractors", tf.attractors}, {"tipping_points", tf.tipping_points}};
  }
  write_json(g.dir() / "intervention.json", j);
  std::cout << j.dump() << '\n';
  return 0;
}

int report(ErrorCode code, const std::string& message) {
  std::string line = message;
  for (char& ch : line)
    if (ch == '\n' || ch == '\r') ch = ' ';
  std::cerr << "error: " << to_string(code) << ": " << line << std::endl;
  return 1;
}

}  // namespace

ModelFile fit_model(const CrossSection& data, const RunConfig& config) { return fit_full(data, config).file; }

int run(const std::vector<std::string>& args) {
  CLI::App app{"Langevin dynamics inferred from cross-sectional data", "crossdyn"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (required by stochastic commands)");
  app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output directory")->capture_default_str();

  std::string fit_input;
  auto* fit = app.add_subcommand("fit", "fit a model to a cross-section CSV");
  fit->add_option("input", fit_input, "CSV with a value column")->required();

  double a = 3.0, b = 1.0;
  std::size_t n = 5000;
  auto* surrogate = app.add_subcommand("surrogate", "sample the Landau double-well density");
  surrogate->add_option("--a", a)->capture_default_str();
  surrogate->add_option("--b", b)->capture_default_str();
  surrogate->add_option("--n", n)->capture_default_str();

  std::string sim_model;
  double x0 = 0.0;
  std::size_t steps = 0;
  double sim_dt = 0.0, sim_tp = 0.0;
  auto* sim = app.add_subcommand("simulate", "integrate the fitted Langevin equation");
  sim->add_option("model", sim_model, "model.json")->required();
  sim->add_option("--x0", x0, "start state in data units")->required();
  sim->add_option("--steps", steps)->required();
  auto* dt_opt = sim->add_option("--dt", sim_dt, "integration step (default: grid dt)");
  auto* tp_opt = sim->add_option("--tipping-point", sim_tp, "in data units (default: fitted tipping point)");

  ValidateArgs va;
  auto* val = app.add_subcommand("validate", "score directional predictions on follow-up data");
  val->add_option("input", va.input, "longitudinal CSV")->required();
  val->add_option("--model", va.model_path, "model.json");
  val->add_flag("--refit", va.refit, "fit the model on the cohort's baselines");
  val->add_option("--clusters", va.clusters, "'bmi' for the four BMI categories");
  val->add_option("--range", va.range, "lo:hi baseline range");
  val->add_option("--bin-width", va.bin_width)->capture_default_str();
  val->add_option("--bin-origin", va.bin_origin)->capture_default_str();

  InterveneArgs ia;
  double ia_a = 0.0, ia_b = 0.0, ia_sigma = 0.0, ia_thr = 0.0;
  auto* inter = app.add_subcommand("intervene", "relative effort and occupancy of a tilted landscape");
  inter->add_option("--model", ia.model_path, "model.json");
  auto* ia_a_opt = inter->add_option("--a", ia_a);
  auto* ia_b_opt = inter->add_option("--b", ia_b);
  inter->add_option("--c", ia.c)->required();
  inter->add_option("--t", ia.t)->required();
  auto* ia_sigma_opt = inter->add_option("--sigma", ia_sigma);
  auto* ia_thr_opt = inter->add_option("--threshold", ia_thr, "in data units");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(ErrorCode::InvalidArgument, e.what());
  }

  if (seed_opt->count() > 0) g.seed = seed;
  try {
    if (*fit) return cmd_fit(g, fit_input);
    if (*surrogate) return cmd_surrogate(g, a, b, n);
    if (*sim)
      return cmd_simulate(g, sim_model, x0, steps, dt_opt->count() ? std::optional(sim_dt) : std::nullopt,
                          tp_opt->count() ? std::optional(sim_tp) : std::nullopt);
    if (*val) return cmd_validate(g, va);
    if (*inter) {
      if (ia_a_opt->count()) ia.a = ia_a;
      if (ia_b_opt->count()) ia.b = ia_b;
      if (ia_sigma_opt->count()) ia.sigma = ia_sigma;
      if (ia_thr_opt->count()) ia.threshold = ia_thr;
      return cmd_intervene(g, ia);
    }
  } catch (const Error& e) {
    return report(e.code(), e.what());
  } catch (const fs::filesystem_error& e) {
    return report(ErrorCode::IoError, e.what());
  } catch (const std::exception& e) {
    return report(ErrorCode::InvalidArgument, e.what());
  }
  return report(ErrorCode::InvalidArgument, "no command given");
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace crossdyn::cli
