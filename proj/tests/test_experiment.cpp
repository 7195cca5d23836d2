#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "specfree/experiment.hpp"
#include "specfree/hamiltonian.hpp"

using namespace specfree;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "specfree_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json tiny_vpr_config(const fs::path& dir) {
  return json{{"experiment", "custom"},
              {"lattice", {{"rows", 1}, {"cols", 2}, {"spinful", true}}},
              {"state", {{"kind", "basis"}, {"bits", "1010"}}},
              {"dt", 0.3},
              {"n", 16},
              {"r_count", 1},
              {"flips_per_state", 1},
              {"shots", 1000},
              {"s_values", {2, 3, 4, 5, 6, 7, 8}},
              {"output_dir", dir.string()}};
}

}  // namespace

TEST_CASE("config validation names the offending field") {
  auto field_of = [](const json& j) {
    try {
      parse_config(j);
    } catch (const ConfigError& e) {
      return e.field;
    }
    return std::string("(no error)");
  };
  CHECK(field_of(json::object()) == "experiment");
  CHECK(field_of({{"experiment", "nope"}, {"output_dir", "x"}}) ==
        "experiment");
  CHECK(field_of({{"experiment", "custom"}}) == "output_dir");
  json base = tiny_vpr_config("x");
  base["beta"] = 1.7;
  CHECK(field_of(base) == "beta");
  base = tiny_vpr_config("x");
  base["init"] = "warmish";
  CHECK(field_of(base) == "init");
  base = tiny_vpr_config("x");
  base["s_values"] = {40};
  CHECK(field_of(base) == "s_values");
  base = tiny_vpr_config("x");
  base["state"]["bits"] = "101";
  CHECK(field_of(base) == "state.bits");
  base = tiny_vpr_config("x");
  base["experiment"] = "hio_2x2";
  base["m"] = 8;  // even grids are rejected for the 2D problem
  CHECK(field_of(base) == "n");
}

TEST_CASE("noiseless support study forces its defaults") {
  json j = tiny_vpr_config("x");
  j["experiment"] = "vpr_noiseless_support";
  j["n"] = 60;  // the default support truncation needs n/2 >= 25
  j["shots"] = 12345;
  ExperimentConfig cfg = parse_config(j);
  CHECK(cfg.shots == 0);
  CHECK(cfg.truncate_support == 25);
  json m = materialize_config(cfg);
  CHECK(m["shots"] == 0);
  CHECK(m["init"] == "random_phase");
}

TEST_CASE("desk-scale violations surface before any heavy work") {
  json j = tiny_vpr_config(fresh_dir("desk").string());
  j["lattice"] = {{"rows", 3}, {"cols", 3}, {"spinful", true}};
  j["state"] = {{"kind", "uniform"}};
  ExperimentConfig cfg = parse_config(j);
  CHECK_THROWS_AS(run_experiment(cfg), DeskScaleError);
}

TEST_CASE("reruns produce byte-identical artifacts") {
  fs::path dir = fresh_dir("rerun");
  ExperimentConfig cfg = parse_config(tiny_vpr_config(dir));
  REQUIRE(run_experiment(cfg) == 0);
  std::string manifest1 = slurp(dir / "manifest.json");
  std::string metrics1 = slurp(dir / "metrics.json");
  std::string sweep1 = slurp(dir / "sweep.csv");
  REQUIRE(run_experiment(cfg) == 0);
  CHECK(slurp(dir / "manifest.json") == manifest1);
  CHECK(slurp(dir / "metrics.json") == metrics1);
  CHECK(slurp(dir / "sweep.csv") == sweep1);
}

TEST_CASE("vpr budget counts every circuit run") {
  fs::path dir = fresh_dir("budget");
  ExperimentConfig cfg = parse_config(tiny_vpr_config(dir));
  REQUIRE(run_experiment(cfg) == 0);
  json metrics = json::parse(slurp(dir / "metrics.json"));
  // (3R + 1) signal families, N points each, `shots` repetitions per point
  CHECK(metrics["budget"] == doctest::Approx(4.0 * 16.0 * 1000.0));
  json manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["schema_version"] == kManifestSchemaVersion);
  for (const auto& a : manifest["artifacts"])
    CHECK(fs::exists(dir / a.get<std::string>()));
}

TEST_CASE("hio budget samples only the non-redundant half-plane") {
  fs::path dir = fresh_dir("hio_budget");
  json j = {{"experiment", "hio_2x2"},
            {"lattice", {{"rows", 1}, {"cols", 2}, {"spinful", true}}},
            {"state", {{"kind", "uniform"}}},
            {"dt", 0.6},
            {"n", 9},
            {"m", 9},
            {"iterations", 50},
            {"shots", 500},
            {"output_dir", dir.string()}};
  ExperimentConfig cfg = parse_config(j);
  REQUIRE(run_experiment(cfg) == 0);
  json metrics = json::parse(slurp(dir / "metrics.json"));
  CHECK(metrics["budget"] == doctest::Approx((9.0 * 9.0 + 1.0) / 2.0 * 500.0));
  std::string csv = slurp(dir / "retrieved_spectrum.csv");
  CHECK(csv.rfind("k,omega_k,re,im,abs\n", 0) == 0);
  CHECK(slurp(dir / "residual.csv").rfind("iter,residual\n", 0) == 0);
}

TEST_CASE("compare_manifests reports both sides over a shared grid") {
  fs::path da = fresh_dir("cmp_a"), db = fresh_dir("cmp_b");
  ExperimentConfig ca = parse_config(tiny_vpr_config(da));
  json jb = tiny_vpr_config(db);
  jb["seeds"] = {1};
  ExperimentConfig cb = parse_config(jb);
  REQUIRE(run_experiment(ca) == 0);
  REQUIRE(run_experiment(cb) == 0);

  fs::path report = fresh_dir("cmp_out") / "report.csv";
  CHECK(compare_manifests((da / "manifest.json").string(),
                          (db / "manifest.json").string(),
                          report.string()) == 0);
  std::string rep = slurp(report);
  CHECK(rep.rfind("side,experiment,l1_error,budget,peaks\n", 0) == 0);
  CHECK(rep.find("\na,") != std::string::npos);
  CHECK(rep.find("\nb,") != std::string::npos);
  CHECK(fs::exists(report.parent_path() / "overlay.csv"));

  // grids must agree
  json jc = tiny_vpr_config(fresh_dir("cmp_c"));
  jc["n"] = 20;
  jc["s_values"] = {2, 3, 4, 5};
  ExperimentConfig cc = parse_config(jc);
  REQUIRE(run_experiment(cc) == 0);
  CHECK_THROWS_AS(
      compare_manifests(
          (da / "manifest.json").string(),
          (fs::path(cc.output_dir) / "manifest.json").string(),
          (fresh_dir("cmp_bad") / "report.csv").string()),
      ConfigError);
}
