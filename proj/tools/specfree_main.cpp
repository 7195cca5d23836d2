#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "specfree/experiment.hpp"
#include "specfree/gatecost.hpp"
#include "specfree/hamiltonian.hpp"

namespace {

int run_cmd(const std::string& config_path) {
  specfree::ExperimentConfig cfg = specfree::load_config(config_path);
  return specfree::run_experiment(cfg);
}

int compare_cmd(const std::string& a, const std::string& b,
                const std::string& report) {
  return specfree::compare_manifests(a, b, report);
}

int gatecost_cmd(const std::string& model, const std::string& hardware,
                 std::int64_t n, std::int64_t k, bool alternate) {
  specfree::CostQuery q;
  if (model == "tfim_1d")
    q.model = specfree::CostModel::Tfim1D;
  else if (model == "fh2d_spinless")
    q.model = specfree::CostModel::Fh2DSpinless;
  else
    throw specfree::ConfigError("model", "unknown model '" + model + "'");
  if (hardware == "all_to_all")
    q.hardware = specfree::Hardware::AllToAll;
  else if (hardware == "line_1d")
    q.hardware = specfree::Hardware::Line1D;
  else if (hardware == "grid_2d")
    q.hardware = specfree::Hardware::Grid2D;
  else
    throw specfree::ConfigError("hardware",
                                "unknown hardware '" + hardware + "'");
  q.n = n;
  q.k = k;
  q.alternate_ghz_depth = alternate;

  q.use_pr = true;
  specfree::CostResult pr = specfree::trotter_cost(q);
  q.use_pr = false;
  specfree::CostResult ctl = specfree::trotter_cost(q);

  std::cout << "variant,cnots,depth\n";
  std::cout << "pr," << pr.cnots << "," << pr.depth << "\n";
  std::cout << "controlled," << ctl.cnots << "," << ctl.depth << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"control-free spectrum estimation via classical phase retrieval"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config_path, "config file path")->required();

  std::string cmp_a, cmp_b, report = "report.csv";
  auto* cmp = app.add_subcommand("compare", "compare two completed runs");
  cmp->add_option("a", cmp_a, "first manifest.json")->required();
  cmp->add_option("b", cmp_b, "second manifest.json")->required();
  cmp->add_option("--report", report, "report CSV output path");

  std::string model = "tfim_1d", hardware = "all_to_all";
  std::int64_t n = 100, k = 25;
  bool alternate = false;
  auto* gc = app.add_subcommand("gatecost", "Trotter-layer CNOT cost table");
  gc->add_option("--model", model, "tfim_1d | fh2d_spinless");
  gc->add_option("--hardware", hardware, "all_to_all | line_1d | grid_2d");
  gc->add_option("--n", n, "qubits or lattice side");
  gc->add_option("--k", k, "Trotter layers");
  gc->add_flag("--alternate-ghz-depth", alternate,
               "use the 3(n-2)/2 distributed-GHZ depth variant");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return run_cmd(config_path);
    if (cmp->parsed()) return compare_cmd(cmp_a, cmp_b, report);
    return gatecost_cmd(model, hardware, n, k, alternate);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const specfree::DeskScaleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const specfree::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
