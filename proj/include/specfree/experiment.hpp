#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "specfree/lattice.hpp"

namespace specfree {

inline constexpr int kManifestSchemaVersion = 1;

/// Validation failure naming the offending config field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field_name, const std::string& message)
      : std::runtime_error("config field '" + field_name + "': " + message),
        field(std::move(field_name)) {}
  std::string field;
};

struct StateSpec {
  std::string kind = "basis";  // basis | uniform | superposition
  std::string bits;
  // superposition terms: (re, im, bits)
  std::vector<std::tuple<double, double, std::string>> terms;
};

struct ExperimentConfig {
  std::string experiment;  // vpr_noiseless_support | vpr_r_resilience |
                           // hio_2x2 | head_to_head | gatecost_table | custom
  Lattice lattice{1, 5, true};
  FermiHubbardParams params;
  StateSpec state;
  std::string normalize = "shift_min_zero";  // none | shift_min_zero | band_0_pi
  double dt = 0.0;
  int n = 0;
  int m = 0;
  int r_count = 1;
  int flips_per_state = 1;
  std::uint64_t shots = 0;  // 0 = noiseless
  double beta = 0.9;
  int iterations = 5000;
  int restarts = 0;
  std::string init = "random_phase";  // | flat_positive | magnitude_dft |
                                      // oversampled
  double weight = 1.0;
  int truncate_support = 0;  // 0 = off
  std::vector<int> s_values;
  std::string strategy = "max_drop_ratio";  // | first_decay_onset
  std::string window = "triangular";        // | rectangular
  std::vector<std::uint64_t> seeds{0};
  // head_to_head: total circuit-run budget split between the two methods
  double budget = 0.0;
  std::vector<std::int64_t> gatecost_n{2, 10, 100};
  std::vector<std::int64_t> gatecost_k{1, 10, 25};
  std::string output_dir;
};

/// Parses and validates; unknown experiment names, missing required fields
/// and out-of-range values raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Fully resolved config (defaults materialized) as stored in the manifest.
nlohmann::json materialize_config(const ExperimentConfig& cfg);

/// Runs the experiment, writing all artifacts (CSV, metrics.json,
/// manifest.json) into cfg.output_dir. Returns the process exit code.
int run_experiment(const ExperimentConfig& cfg);

/// Side-by-side report of two completed runs identified by their manifest
/// paths; writes report.csv and overlay.csv next to `report_path`.
int compare_manifests(const std::string& manifest_a,
                      const std::string& manifest_b,
                      const std::string& report_path);

}  // namespace specfree
