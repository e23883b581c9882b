#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "crossdyn/cli.hpp"
#include "crossdyn/io.hpp"
#include "doctest.h"

using namespace crossdyn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("crossdyn_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  int code;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "crossdyn");
  std::ostringstream err, out;
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  const int code = cli::run(args);
  std::cerr.rdbuf(old_err);
  std::cout.rdbuf(old_out);
  return {code, err.str()};
}

const fs::path& fitted_dir() {
  static const fs::path dir = [] {
    const auto d = scratch("fit");
    REQUIRE(run({"surrogate", "--n", "400", "--seed", "3", "--out", d.string()}).code == 0);
    REQUIRE(run({"fit", (d / "surrogate.csv").string(), "--out", (d / "a").string()}).code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("fit is byte-identical across runs") {
  const auto& d = fitted_dir();
  REQUIRE(run({"fit", (d / "surrogate.csv").string(), "--out", (d / "b").string()}).code == 0);
  CHECK(slurp(d / "a" / "model.json") == slurp(d / "b" / "model.json"));
  CHECK(slurp(d / "a" / "curves.csv") == slurp(d / "b" / "curves.csv"));
  CHECK(slurp(d / "a" / "curves.csv").rfind("x,x_original,pdf,energy,force,stationary_density\n", 0) == 0);
}

TEST_CASE("simulate is byte-identical per seed") {
  const auto& d = fitted_dir();
  const auto model = (d / "a" / "model.json").string();
  for (const char* out : {"s1", "s2"})
    REQUIRE(run({"simulate", model, "--x0", "1.0", "--steps", "2000", "--seed", "17", "--out", (d / out).string()})
                .code == 0);
  CHECK(slurp(d / "s1" / "trajectory.csv") == slurp(d / "s2" / "trajectory.csv"));
  CHECK(slurp(d / "s1" / "transitions.json") == slurp(d / "s2" / "transitions.json"));
  const auto j = nlohmann::json::parse(slurp(d / "s1" / "transitions.json"));
  CHECK(j["seed"] == 17);
  CHECK(j["schema_version"] == kSchemaVersion);
}

TEST_CASE("errors exit nonzero with one coded line") {
  const auto d = scratch("err");
  std::ofstream(d / "one.csv") << "value\n3.2\n";
  auto r = run({"fit", (d / "one.csv").string(), "--out", d.string()});
  CHECK(r.code != 0);
  CHECK(r.err.rfind("error: DegenerateData:", 0) == 0);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

  std::ofstream(d / "m.json") << R"({"schema_version": 2})";
  r = run({"simulate", (d / "m.json").string(), "--x0", "0", "--steps", "10", "--seed", "1"});
  CHECK(r.err.rfind("error: SchemaMismatch:", 0) == 0);

  r = run({"surrogate", "--n", "10", "--out", d.string()});
  CHECK(r.code != 0);
  CHECK(r.err.rfind("error: InvalidArgument:", 0) == 0);

  r = run({"bogus"});
  CHECK(r.code != 0);
}

TEST_CASE("validate with BMI clusters and a narrow range") {
  const auto d = scratch("val");
  std::mt19937_64 rng(8);
  std::normal_distribution<double> bmi(23.59, 2.69);
  std::normal_distribution<double> step(0.0, 0.6);
  LongitudinalCohort c;
  c.labels = {"year1"};
  c.followups.assign(1, {});
  for (int i = 0; i < 600; ++i) {
    double x = std::clamp(bmi(rng), 17.0, 35.0);
    c.ids.push_back("p" + std::to_string(i));
    c.baseline.push_back(x);
    c.followups[0].push_back(x + 0.15 * (23.0 - x) + step(rng));
  }
  write_file_atomic(d / "cohort.csv", longitudinal_csv(c));
  std::ofstream(d / "cfg.json") << R"({"null_repetitions": 200, "bootstrap_repetitions": 50})";

  auto r = run({"validate", (d / "cohort.csv").string(), "--refit", "--clusters", "bmi", "--seed", "4", "--config",
                (d / "cfg.json").string(), "--out", (d / "bmi").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rep = nlohmann::json::parse(slurp(d / "bmi" / "report.json"));
  CHECK(rep["schema_version"] == kSchemaVersion);
  CHECK(rep["seed"] == 4);
  const auto& groups = rep["reports"];
  REQUIRE(groups.size() == 5);
  CHECK(groups[0]["cluster"] == "all");
  CHECK(groups[1]["hi"] == 18.5);
  CHECK(groups[2]["lo"] == 18.5);
  CHECK(groups[2]["hi"] == 25.0);
  CHECK(groups[3]["hi"] == 30.0);
  std::size_t total = 0;
  for (std::size_t k = 1; k < 5; ++k) {
    total += groups[k]["members"].get<std::size_t>();
    CHECK(groups[k]["disregarded"] == (groups[k]["members"].get<std::size_t>() < 20));
  }
  CHECK(total == 600);
  CHECK(groups[4]["disregarded"] == true);
  CHECK(groups[4]["followups"].empty());
  CHECK(groups[0]["followups"][0]["a_scaled"].get<double>() > 0.0);
  CHECK(slurp(d / "bmi" / "histogram.csv").rfind("followup,bin_lower,bin_upper,positive,negative,relative\n", 0) == 0);

  // Any model will do for checking which rows the range keeps.
  const auto model = (fitted_dir() / "a" / "model.json").string();
  r = run({"validate", (d / "cohort.csv").string(), "--model", model, "--range", "21:22", "--seed", "4", "--config",
           (d / "cfg.json").string(), "--out", (d / "range").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rr = nlohmann::json::parse(slurp(d / "range" / "report.json"));
  const auto& narrow = rr["reports"][1];
  std::size_t expected = 0;
  for (double x : c.baseline) expected += x >= 21.0 && x < 22.0;
  CHECK(narrow["members"] == expected);
  for (const auto& ind : narrow["followups"][0]["per_individual"]) {
    CHECK(ind["baseline"].get<double>() >= 21.0);
    CHECK(ind["baseline"].get<double>() < 22.0);
  }
}

TEST_CASE("intervene on the Landau potential") {
  const auto d = scratch("int");
  REQUIRE(run({"intervene", "--a", "3", "--b", "1", "--c", "0", "--t", "0.0013", "--sigma", "1.41", "--out",
               d.string()})
              .code == 0);
  const auto j = nlohmann::json::parse(slurp(d / "intervention.json"));
  CHECK(std::abs(j["occupancy_below"].get<double>() - 0.5) < 1e-9);
  CHECK(j["r"] == 0.0);
  const auto& fit = fitted_dir();
  REQUIRE(run({"intervene", "--model", (fit / "a" / "model.json").string(), "--c", "1", "--t", "0.0013", "--out",
               d.string()})
              .code == 0);
}
