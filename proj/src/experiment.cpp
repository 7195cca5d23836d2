#include "specfree/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "specfree/dsp.hpp"
#include "specfree/gatecost.hpp"
#include "specfree/hamiltonian.hpp"
#include "specfree/hio2d.hpp"
#include "specfree/shotnoise.hpp"
#include "specfree/signals.hpp"
#include "specfree/states.hpp"
#include "specfree/vpr.hpp"

namespace specfree {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kPeakMinSep = 2;
constexpr double kPeakRelHeight = 0.1;
constexpr std::uint64_t kSignal2DId = 1000;

template <typename T>
T get_field(const json& j, const std::string& key, const T& fallback,
            bool required = false) {
  if (!j.contains(key)) {
    if (required) throw ConfigError(key, "missing");
    return fallback;
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key, "wrong type");
  }
}

std::string default_half_filling_bits(int modes) {
  std::string bits(modes, '0');
  for (int i = 0; i < modes; i += 2) bits[i] = '1';
  return bits;
}

StateSpec parse_state(const json& j, int modes) {
  StateSpec spec;
  if (!j.contains("state")) {
    spec.bits = default_half_filling_bits(modes);
    return spec;
  }
  const json& s = j.at("state");
  spec.kind = get_field<std::string>(s, "kind", "basis");
  if (spec.kind == "basis") {
    spec.bits = get_field<std::string>(s, "bits", default_half_filling_bits(modes));
    if (static_cast<int>(spec.bits.size()) != modes)
      throw ConfigError("state.bits", "length must equal the mode count");
  } else if (spec.kind == "uniform") {
    // nothing further
  } else if (spec.kind == "superposition") {
    if (!s.contains("terms") || !s.at("terms").is_array() || s.at("terms").empty())
      throw ConfigError("state.terms", "missing or empty");
    for (const auto& t : s.at("terms")) {
      double re = get_field<double>(t, "re", 1.0);
      double im = get_field<double>(t, "im", 0.0);
      std::string bits = get_field<std::string>(t, "bits", "", true);
      if (static_cast<int>(bits.size()) != modes)
        throw ConfigError("state.terms", "bits length must equal the mode count");
      spec.terms.emplace_back(re, im, bits);
    }
    spec.bits = std::get<2>(spec.terms.front());
  } else {
    throw ConfigError("state.kind", "unknown kind '" + spec.kind + "'");
  }
  return spec;
}

QuantumState build_state(const StateSpec& spec, int modes) {
  if (spec.kind == "uniform") return make_uniform_superposition(modes);
  if (spec.kind == "basis") return make_basis_state(spec.bits);
  std::vector<std::pair<std::complex<double>, QuantumState>> terms;
  for (const auto& [re, im, bits] : spec.terms)
    terms.emplace_back(std::complex<double>(re, im), make_basis_state(bits));
  return make_superposition(terms);
}

Hamiltonian build_h(const ExperimentConfig& cfg, const std::string& normalize) {
  Hamiltonian h = build_fermi_hubbard(cfg.lattice, cfg.params);
  if (normalize == "none") return h;
  if (normalize == "shift_min_zero") {
    const auto& ev = h.eigenvalues();
    return normalize_to_band(h, 0.0, ev(ev.size() - 1) - ev(0));
  }
  if (normalize == "band_0_pi") return normalize_to_band(h, 0.0, M_PI);
  throw ConfigError("normalize", "unknown mode '" + normalize + "'");
}

TimeSeries1D truncate_to_support(const TimeSeries1D& ts, int sigma) {
  Spectrum1D F = dft1(ts);
  for (int k = sigma; k < F.n(); ++k) F.values(k) = 0.0;
  TimeSeries1D out = idft1(F);
  out.label = ts.label;
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_json(const fs::path& path, const json& j) {
  write_file(path, j.dump(2) + "\n");
}

json peaks_json(const std::vector<int>& peaks) {
  json out = json::array();
  for (int p : peaks) out.push_back(p);
  return out;
}

bool peaks_covered(const std::vector<int>& ideal, const std::vector<int>& rec,
                   int n, int tol = 1) {
  for (int p : ideal) {
    bool hit = false;
    for (int q : rec) {
      int d = std::abs(p - q);
      if (std::min(d, n - d) <= tol) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

struct VprOutcome {
  std::vector<SweepEntry> entries;
  int s_star = -1;
  bool flagged = false;
  int dropped = 0;
  Spectrum1D ideal;
  Spectrum1D rec;          // aligned, unrounded
  Spectrum1D rec_rounded;  // aligned, rounded
  double l1 = 0.0, l1_rounded = 0.0;
  std::vector<int> ideal_peaks, rec_peaks;
  double budget = 0.0;
};

VprOutcome run_vpr(const ExperimentConfig& cfg, const Hamiltonian& h,
                   std::uint64_t seed) {
  const int modes = cfg.lattice.modes();
  if (cfg.state.kind == "uniform")
    throw ConfigError("state.kind",
                      "vectorial retrieval needs a basis or superposition "
                      "target to derive secondary states");
  QuantumState phi = build_state(cfg.state, modes);

  TimeSeries1D f1 = signal_1d(h, phi, phi, cfg.dt, cfg.n, "f1");
  std::vector<TimeSeries1D> f2;
  std::vector<double> scales3, scales4;
  std::set<std::string> used;
  // Pair flips across symmetry sectors give identically vanishing
  // interference signals; skip those candidates.
  for (std::uint64_t attempt = 0;
       static_cast<int>(f2.size()) < cfg.r_count && attempt < 200; ++attempt) {
    auto batch = make_secondary_states(cfg.state.bits, cfg.r_count,
                                       cfg.flips_per_state,
                                       seed * 1000003ULL + attempt);
    for (const std::string& bits : batch) {
      if (static_cast<int>(f2.size()) == cfg.r_count) break;
      if (!used.insert(bits).second) continue;
      QuantumState psi = make_basis_state(bits);
      TimeSeries1D ts = signal_1d(h, phi, psi, cfg.dt, cfg.n,
                                  "f2_" + std::to_string(f2.size()));
      if (ts.values.cwiseAbs().maxCoeff() < 1e-9) continue;
      std::complex<double> overlap = phi.amplitudes.dot(psi.amplitudes);
      f2.push_back(std::move(ts));
      scales3.push_back(2.0 + 2.0 * overlap.real());
      scales4.push_back(2.0 - 2.0 * overlap.imag());
    }
  }
  if (static_cast<int>(f2.size()) < cfg.r_count)
    throw std::runtime_error("could not find enough secondary states with "
                             "nonvanishing interference signals");

  if (cfg.truncate_support > 0) {
    f1 = truncate_to_support(f1, cfg.truncate_support);
    for (auto& g : f2) g = truncate_to_support(g, cfg.truncate_support);
  }

  VprDataset ds;
  if (cfg.shots == 0) {
    ds = make_dataset(f1, f2);
  } else {
    ShotConfig sc{cfg.shots, seed};
    ds = make_noisy_dataset(f1, f2, sc, scales3, scales4);
  }

  std::vector<int> s_values = cfg.s_values;
  if (s_values.empty()) {
    int hi = cfg.truncate_support > 0 ? cfg.truncate_support + 5 : cfg.n / 2;
    for (int s = 1; s <= hi; ++s) s_values.push_back(s);
  }
  SupportStrategy strategy = cfg.strategy == "first_decay_onset"
                                 ? SupportStrategy::FirstDecayOnset
                                 : SupportStrategy::MaxDropRatio;
  SupportSweep sweep = sweep_support(ds, s_values, cfg.weight, strategy, true);

  VprOutcome out;
  out.entries = sweep.entries;
  out.s_star = sweep.s_star;
  out.flagged = sweep.flagged;
  out.dropped = SupportQuadratic(ds, sweep.s_star, cfg.weight).dropped_rows();
  out.ideal = dft1(f1);
  out.budget = cfg.shots == 0
                   ? 0.0
                   : static_cast<double>(3 * cfg.r_count + 1) * cfg.n *
                         static_cast<double>(cfg.shots);

  TimeSeries1D rec = reconstruct(ds, *sweep.y_at_s_star, false);
  TimeSeries1D rec_round = reconstruct(ds, *sweep.y_at_s_star, true);
  out.rec = align_ambiguities(dft1(rec), out.ideal).second;
  out.rec_rounded = align_ambiguities(dft1(rec_round), out.ideal).second;
  out.l1 = spectrum_l1_error(out.rec, out.ideal);
  out.l1_rounded = spectrum_l1_error(out.rec_rounded, out.ideal);
  out.ideal_peaks = prominent_peaks(out.ideal, kPeakRelHeight, kPeakMinSep);
  out.rec_peaks = prominent_peaks(out.rec, kPeakRelHeight, kPeakMinSep);
  return out;
}

std::string sweep_csv(const std::vector<SweepEntry>& entries) {
  std::string out = "s,lambda_min,lambda_second\n";
  for (const auto& e : entries)
    out += std::to_string(e.s) + "," + format_double(e.lambda_min) + "," +
           format_double(e.lambda_second) + "\n";
  return out;
}

struct HioOutcome {
  HioResult result;
  Spectrum1D ideal;
  Spectrum1D rec;  // aligned
  double l1 = 0.0;
  std::vector<int> ideal_peaks, rec_peaks;
  double budget = 0.0;
  Spectrum2D aligned_2d;
};

HioOutcome run_hio(const ExperimentConfig& cfg, const Hamiltonian& h,
                   std::uint64_t seed) {
  const int modes = cfg.lattice.modes();
  QuantumState psi = build_state(cfg.state, modes);
  Hamiltonian hd = build_number_operator(cfg.lattice);

  WindowKind window = cfg.window == "rectangular" ? WindowKind::Rectangular
                                                  : WindowKind::Triangular;
  Signal2D sig = signal_2d(h, hd, psi, cfg.dt, cfg.n, cfg.m, window);
  const int n = cfg.n, m = cfg.m;

  Eigen::MatrixXd abs_f = sig.values.cwiseAbs();
  double budget = 0.0;
  if (cfg.shots > 0) {
    ShotConfig sc{cfg.shots, seed};
    long sampled = 0;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < m; ++l) {
        int jr = (n - j) % n, lr = (m - l) % m;
        // canonical representative of the conjugate pair
        if (std::make_pair(j, l) > std::make_pair(jr, lr)) continue;
        double mag = noisy_magnitude(sig.values(j, l), 1.0, sc, kSignal2DId,
                                     static_cast<std::uint64_t>(j) * m + l);
        abs_f(j, l) = mag;
        abs_f(jr, lr) = mag;
        ++sampled;
      }
    budget = static_cast<double>(sampled) * static_cast<double>(cfg.shots);
  }

  double dz = (n * cfg.dt) / m;
  Eigen::VectorXcd anchors = classical_anchor_phases(hd, psi, dz, m);

  HioConfig hc;
  hc.beta = cfg.beta;
  hc.iterations = cfg.iterations;
  hc.restarts = cfg.restarts;
  hc.seed = seed;
  if (cfg.init == "flat_positive") hc.init = HioInit::FlatPositive;
  else if (cfg.init == "magnitude_dft") hc.init = HioInit::MagnitudeDft;
  else if (cfg.init == "oversampled") hc.init = HioInit::Oversampled;
  HioOutcome out;
  out.result = hio_run(abs_f, hc, anchors, n * cfg.dt);
  out.budget = budget;

  Spectrum2D ideal_2d = dft2(sig);
  out.aligned_2d = align_ambiguities(out.result.f_rec, ideal_2d).second;
  out.ideal = extract_1d(sig);
  // the sub-bin energy-offset ambiguity survives the integer 2D alignment
  out.rec = align_continuous(extract_1d(idft2(out.aligned_2d)), out.ideal).aligned;
  out.l1 = spectrum_l1_error(out.rec, out.ideal);
  out.ideal_peaks = prominent_peaks(out.ideal, kPeakRelHeight, kPeakMinSep);
  out.rec_peaks = prominent_peaks(out.rec, kPeakRelHeight, kPeakMinSep);
  return out;
}

Spectrum1D read_spectrum_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::complex<double>> vals;
  double omega1 = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 4) throw std::runtime_error("bad spectrum row");
    if (vals.size() == 1) omega1 = std::stod(cells[1]);
    vals.emplace_back(std::stod(cells[2]), std::stod(cells[3]));
  }
  Spectrum1D s;
  s.values = Eigen::Map<Eigen::VectorXcd>(vals.data(), vals.size());
  s.total_time = omega1 > 0.0 ? 2.0 * M_PI / omega1 : 1.0;
  return s;
}

int run_vpr_experiment(const ExperimentConfig& cfg, const fs::path& dir,
                       json& manifest) {
  std::string normalize = cfg.normalize;
  Hamiltonian h = build_h(cfg, normalize);

  json results;
  std::vector<std::string> artifacts;
  bool first = true;
  for (std::uint64_t seed : cfg.seeds) {
    VprOutcome out = run_vpr(cfg, h, seed);
    if (first) {
      write_file(dir / "sweep.csv", sweep_csv(out.entries));
      write_file(dir / "ideal_spectrum.csv", spectrum_to_csv(out.ideal));
      write_file(dir / "retrieved_spectrum.csv", spectrum_to_csv(out.rec));
      write_file(dir / "retrieved_spectrum_rounded.csv",
                 spectrum_to_csv(out.rec_rounded));
      artifacts = {"sweep.csv", "ideal_spectrum.csv", "retrieved_spectrum.csv",
                   "retrieved_spectrum_rounded.csv"};
      results["s_star"] = out.s_star;
      results["sweep_flagged"] = out.flagged;
      results["dropped_rows"] = out.dropped;
      results["ideal_peaks"] = peaks_json(out.ideal_peaks);
      results["budget"] = out.budget;
      first = false;
    }
    results["l1_error"].push_back(out.l1);
    results["l1_error_rounded"].push_back(out.l1_rounded);
    results["retrieved_peaks"].push_back(peaks_json(out.rec_peaks));
    results["peaks_covered"].push_back(
        peaks_covered(out.ideal_peaks, out.rec_peaks, cfg.n));
  }
  write_json(dir / "metrics.json", results);
  artifacts.push_back("metrics.json");
  manifest["artifacts"] = artifacts;
  manifest["results"] = results;
  return 0;
}

int run_hio_experiment(const ExperimentConfig& cfg, const fs::path& dir,
                       json& manifest) {
  Hamiltonian h = build_h(cfg, "band_0_pi");
  HioOutcome out = run_hio(cfg, h, cfg.seeds.front());

  write_file(dir / "ideal_spectrum.csv", spectrum_to_csv(out.ideal));
  write_file(dir / "retrieved_spectrum.csv", spectrum_to_csv(out.rec));
  write_file(dir / "residual.csv",
             residual_history_csv(out.result.residual_history));
  auto bin = spectrum2d_binary(out.aligned_2d);
  std::ofstream(dir / "spectrum2d.bin", std::ios::binary)
      .write(reinterpret_cast<const char*>(bin.data()),
             static_cast<std::streamsize>(bin.size()));

  json results;
  results["l1_error"] = out.l1;
  results["best_residual"] = out.result.best_residual;
  results["best_iteration"] = out.result.best_iteration;
  results["ideal_peaks"] = peaks_json(out.ideal_peaks);
  results["retrieved_peaks"] = peaks_json(out.rec_peaks);
  results["peaks_covered"] =
      peaks_covered(out.ideal_peaks, out.rec_peaks, cfg.n);
  results["budget"] = out.budget;
  write_json(dir / "metrics.json", results);

  manifest["artifacts"] = {"ideal_spectrum.csv", "retrieved_spectrum.csv",
                           "residual.csv", "spectrum2d.bin", "metrics.json"};
  manifest["results"] = results;
  return 0;
}

int run_head_to_head(const ExperimentConfig& cfg, const fs::path& dir,
                     json& manifest) {
  if (cfg.budget <= 0.0) throw ConfigError("budget", "must be positive");
  Hamiltonian h = build_h(cfg, "band_0_pi");

  // Split the circuit-run budget evenly between the two methods.
  long hio_entries = (static_cast<long>(cfg.n) * cfg.m + 1) / 2;
  long vpr_points = static_cast<long>(3 * cfg.r_count + 1) * cfg.n;
  std::uint64_t hio_shots =
      static_cast<std::uint64_t>(cfg.budget / 2.0 / hio_entries);
  std::uint64_t vpr_shots =
      static_cast<std::uint64_t>(cfg.budget / 2.0 / vpr_points);
  if (hio_shots == 0 || vpr_shots == 0)
    throw ConfigError("budget", "too small for one shot per sample point");

  ExperimentConfig vcfg = cfg;
  vcfg.shots = vpr_shots;
  VprOutcome v = run_vpr(vcfg, h, cfg.seeds.front());

  ExperimentConfig hcfg = cfg;
  hcfg.shots = hio_shots;
  HioOutcome ho = run_hio(hcfg, h, cfg.seeds.front());

  write_file(dir / "vpr_ideal_spectrum.csv", spectrum_to_csv(v.ideal));
  write_file(dir / "vpr_retrieved_spectrum.csv", spectrum_to_csv(v.rec));
  write_file(dir / "vpr_sweep.csv", sweep_csv(v.entries));
  write_file(dir / "hio_ideal_spectrum.csv", spectrum_to_csv(ho.ideal));
  write_file(dir / "hio_retrieved_spectrum.csv", spectrum_to_csv(ho.rec));

  std::string cmp = "side,l1_error,shots_per_point,budget,reference_l1_3x3\n";
  cmp += "vpr," + format_double(v.l1) + "," + std::to_string(vpr_shots) + "," +
         format_double(v.budget) + ",0.0018\n";
  cmp += "hio," + format_double(ho.l1) + "," + std::to_string(hio_shots) +
         "," + format_double(ho.budget) + ",0.0028\n";
  write_file(dir / "compare.csv", cmp);

  std::string overlay = "k,ideal_vpr_abs,vpr_abs,ideal_hio_abs,hio_abs\n";
  for (int k = 0; k < cfg.n; ++k)
    overlay += std::to_string(k) + "," +
               format_double(std::abs(v.ideal.values(k))) + "," +
               format_double(std::abs(v.rec.values(k))) + "," +
               format_double(std::abs(ho.ideal.values(k))) + "," +
               format_double(std::abs(ho.rec.values(k))) + "\n";
  write_file(dir / "overlay.csv", overlay);

  json results;
  results["vpr"] = {{"l1_error", v.l1},
                    {"s_star", v.s_star},
                    {"shots", vpr_shots},
                    {"budget", v.budget},
                    {"ideal_peaks", peaks_json(v.ideal_peaks)},
                    {"retrieved_peaks", peaks_json(v.rec_peaks)},
                    {"peaks_covered",
                     peaks_covered(v.ideal_peaks, v.rec_peaks, cfg.n)}};
  results["hio"] = {{"l1_error", ho.l1},
                    {"shots", hio_shots},
                    {"budget", ho.budget},
                    {"ideal_peaks", peaks_json(ho.ideal_peaks)},
                    {"retrieved_peaks", peaks_json(ho.rec_peaks)},
                    {"peaks_covered",
                     peaks_covered(ho.ideal_peaks, ho.rec_peaks, cfg.n)}};
  results["budget"] = v.budget + ho.budget;
  results["reference_l1_3x3"] = {{"vpr", 0.0018}, {"hio", 0.0028}};
  // The accounting samples only the non-redundant half-plane for HIO.
  results["hio_half_plane_accounting"] = true;
  write_json(dir / "metrics.json", results);

  manifest["artifacts"] = {"vpr_ideal_spectrum.csv", "vpr_retrieved_spectrum.csv",
                           "vpr_sweep.csv",          "hio_ideal_spectrum.csv",
                           "hio_retrieved_spectrum.csv", "compare.csv",
                           "overlay.csv",            "metrics.json"};
  manifest["results"] = results;
  return 0;
}

int run_gatecost(const ExperimentConfig& cfg, const fs::path& dir,
                 json& manifest) {
  const std::pair<CostModel, Hardware> rows[] = {
      {CostModel::Tfim1D, Hardware::AllToAll},
      {CostModel::Tfim1D, Hardware::Line1D},
      {CostModel::Fh2DSpinless, Hardware::Grid2D}};

  std::string csv =
      "model,hardware,n,k,pr_cnots,pr_depth,ctl_cnots,ctl_depth,cnot_ratio\n";
  for (auto [model, hw] : rows)
    for (std::int64_t n : cfg.gatecost_n)
      for (std::int64_t k : cfg.gatecost_k) {
        CostQuery pr{model, hw, n, k, true, false};
        CostQuery ctl{model, hw, n, k, false, false};
        CostResult a = trotter_cost(pr);
        CostResult b = trotter_cost(ctl);
        csv += to_string(model) + "," + to_string(hw) + "," +
               std::to_string(n) + "," + std::to_string(k) + "," +
               std::to_string(a.cnots) + "," + std::to_string(a.depth) + "," +
               std::to_string(b.cnots) + "," + std::to_string(b.depth) + "," +
               format_double(cnot_ratio(pr, ctl)) + "\n";
      }
  write_file(dir / "table.csv", csv);

  json results;
  results["rows"] = 3 * cfg.gatecost_n.size() * cfg.gatecost_k.size();
  results["budget"] = 0.0;
  write_json(dir / "metrics.json", results);
  manifest["artifacts"] = {"table.csv", "metrics.json"};
  manifest["results"] = results;
  return 0;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  cfg.experiment = get_field<std::string>(j, "experiment", "", true);
  const std::vector<std::string> known = {
      "vpr_noiseless_support", "vpr_r_resilience", "hio_2x2",
      "head_to_head",          "gatecost_table",   "custom"};
  if (std::find(known.begin(), known.end(), cfg.experiment) == known.end())
    throw ConfigError("experiment", "unknown experiment '" + cfg.experiment + "'");
  cfg.output_dir = get_field<std::string>(j, "output_dir", "", true);

  if (j.contains("lattice")) {
    const json& l = j.at("lattice");
    cfg.lattice.rows = get_field<int>(l, "rows", 1);
    cfg.lattice.cols = get_field<int>(l, "cols", 5);
    cfg.lattice.spinful = get_field<bool>(l, "spinful", true);
    if (cfg.lattice.rows < 1 || cfg.lattice.cols < 1)
      throw ConfigError("lattice", "dimensions must be positive");
  }
  if (j.contains("params")) {
    const json& p = j.at("params");
    cfg.params.tau = get_field<double>(p, "tau", 1.0);
    cfg.params.u = get_field<double>(p, "u", 4.0);
  }
  cfg.state = parse_state(j, cfg.lattice.modes());

  const bool needs_signals =
      cfg.experiment != "gatecost_table";
  cfg.dt = get_field<double>(j, "dt", 0.0, needs_signals);
  cfg.n = get_field<int>(j, "n", 0, needs_signals);
  if (needs_signals) {
    if (cfg.dt <= 0.0) throw ConfigError("dt", "must be positive");
    if (cfg.n < 2) throw ConfigError("n", "must be at least 2");
  }
  const bool needs_2d =
      cfg.experiment == "hio_2x2" || cfg.experiment == "head_to_head";
  cfg.m = get_field<int>(j, "m", 0, needs_2d);
  if (needs_2d) {
    if (cfg.m < 3) throw ConfigError("m", "must be at least 3");
    if (cfg.n % 2 == 0 || cfg.m % 2 == 0)
      throw ConfigError("n", "2D grids require odd n and m");
  }

  cfg.r_count = get_field<int>(j, "r_count", 1);
  if (cfg.r_count < 1) throw ConfigError("r_count", "must be at least 1");
  cfg.flips_per_state = get_field<int>(j, "flips_per_state", 1);
  if (cfg.flips_per_state < 1)
    throw ConfigError("flips_per_state", "must be at least 1");
  cfg.shots = get_field<std::uint64_t>(j, "shots", 0);
  cfg.beta = get_field<double>(j, "beta", 0.9);
  if (cfg.beta < 0.0 || cfg.beta > 1.0)
    throw ConfigError("beta", "must lie in [0,1]");
  cfg.iterations = get_field<int>(j, "iterations", 5000);
  if (cfg.iterations < 1) throw ConfigError("iterations", "must be positive");
  cfg.restarts = get_field<int>(j, "restarts", 0);
  if (cfg.restarts < 0) throw ConfigError("restarts", "must be nonnegative");
  cfg.init = get_field<std::string>(j, "init", "random_phase");
  if (cfg.init != "random_phase" && cfg.init != "flat_positive" &&
      cfg.init != "magnitude_dft" && cfg.init != "oversampled")
    throw ConfigError("init", "unknown strategy '" + cfg.init + "'");
  cfg.weight = get_field<double>(j, "weight", 1.0);
  if (cfg.weight <= 0.0) throw ConfigError("weight", "must be positive");
  cfg.truncate_support = get_field<int>(j, "truncate_support", 0);
  if (cfg.experiment == "vpr_noiseless_support" && cfg.truncate_support == 0)
    cfg.truncate_support = 25;
  if (cfg.truncate_support < 0 || cfg.truncate_support > cfg.n / 2)
    throw ConfigError("truncate_support", "must lie in [0, n/2]");
  cfg.s_values = get_field<std::vector<int>>(j, "s_values", {});
  for (int s : cfg.s_values)
    if (s < 0 || s > cfg.n)
      throw ConfigError("s_values", "entries must lie in [0, n]");
  cfg.strategy = get_field<std::string>(j, "strategy", "max_drop_ratio");
  if (cfg.strategy != "max_drop_ratio" && cfg.strategy != "first_decay_onset")
    throw ConfigError("strategy", "unknown strategy '" + cfg.strategy + "'");
  cfg.window = get_field<std::string>(j, "window", "triangular");
  if (cfg.window != "triangular" && cfg.window != "rectangular")
    throw ConfigError("window", "unknown window '" + cfg.window + "'");
  cfg.normalize = get_field<std::string>(j, "normalize", "shift_min_zero");
  if (cfg.normalize != "none" && cfg.normalize != "shift_min_zero" &&
      cfg.normalize != "band_0_pi")
    throw ConfigError("normalize", "unknown mode '" + cfg.normalize + "'");
  cfg.seeds = get_field<std::vector<std::uint64_t>>(j, "seeds", {0});
  if (cfg.seeds.empty()) throw ConfigError("seeds", "must be nonempty");
  cfg.budget = get_field<double>(j, "budget", 0.0);
  cfg.gatecost_n = get_field<std::vector<std::int64_t>>(j, "gatecost_n",
                                                        {2, 10, 100});
  cfg.gatecost_k =
      get_field<std::vector<std::int64_t>>(j, "gatecost_k", {1, 10, 25});
  if (cfg.experiment == "vpr_noiseless_support") cfg.shots = 0;
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

json materialize_config(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = cfg.experiment;
  j["lattice"] = {{"rows", cfg.lattice.rows},
                  {"cols", cfg.lattice.cols},
                  {"spinful", cfg.lattice.spinful}};
  j["params"] = {{"tau", cfg.params.tau}, {"u", cfg.params.u}};
  json state = {{"kind", cfg.state.kind}};
  if (cfg.state.kind == "basis") state["bits"] = cfg.state.bits;
  if (cfg.state.kind == "superposition") {
    json terms = json::array();
    for (const auto& [re, im, bits] : cfg.state.terms)
      terms.push_back({{"re", re}, {"im", im}, {"bits", bits}});
    state["terms"] = terms;
  }
  j["state"] = state;
  j["normalize"] = cfg.normalize;
  j["dt"] = cfg.dt;
  j["n"] = cfg.n;
  j["m"] = cfg.m;
  j["r_count"] = cfg.r_count;
  j["flips_per_state"] = cfg.flips_per_state;
  j["shots"] = cfg.shots;
  j["beta"] = cfg.beta;
  j["iterations"] = cfg.iterations;
  j["restarts"] = cfg.restarts;
  j["init"] = cfg.init;
  j["weight"] = cfg.weight;
  j["truncate_support"] = cfg.truncate_support;
  j["s_values"] = cfg.s_values;
  j["strategy"] = cfg.strategy;
  j["window"] = cfg.window;
  j["seeds"] = cfg.seeds;
  j["budget"] = cfg.budget;
  j["gatecost_n"] = cfg.gatecost_n;
  j["gatecost_k"] = cfg.gatecost_k;
  j["output_dir"] = cfg.output_dir;
  return j;
}

int run_experiment(const ExperimentConfig& cfg) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  json manifest;
  manifest["schema_version"] = kManifestSchemaVersion;
  manifest["experiment"] = cfg.experiment;
  manifest["config"] = materialize_config(cfg);

  int rc;
  if (cfg.experiment == "vpr_noiseless_support" ||
      cfg.experiment == "vpr_r_resilience" || cfg.experiment == "custom")
    rc = run_vpr_experiment(cfg, dir, manifest);
  else if (cfg.experiment == "hio_2x2")
    rc = run_hio_experiment(cfg, dir, manifest);
  else if (cfg.experiment == "head_to_head")
    rc = run_head_to_head(cfg, dir, manifest);
  else
    rc = run_gatecost(cfg, dir, manifest);

  manifest["artifacts"].push_back("manifest.json");
  write_json(dir / "manifest.json", manifest);
  return rc;
}

int compare_manifests(const std::string& manifest_a,
                      const std::string& manifest_b,
                      const std::string& report_path) {
  auto load = [](const std::string& p) {
    std::ifstream in(p);
    if (!in) throw ConfigError("manifest", "cannot open '" + p + "'");
    json j;
    in >> j;
    return j;
  };
  json a = load(manifest_a), b = load(manifest_b);
  const json& ca = a.at("config");
  const json& cb = b.at("config");
  if (ca.at("n") != cb.at("n") || ca.at("dt") != cb.at("dt"))
    throw ConfigError("manifest", "spectral grids disagree (n, dt)");

  fs::path da = fs::path(manifest_a).parent_path();
  fs::path db = fs::path(manifest_b).parent_path();
  auto side = [](const fs::path& dir, const json& m) {
    std::string prefix =
        m.at("experiment") == "head_to_head" ? "vpr_" : "";
    Spectrum1D ideal = read_spectrum_csv(dir / (prefix + "ideal_spectrum.csv"));
    Spectrum1D rec = read_spectrum_csv(dir / (prefix + "retrieved_spectrum.csv"));
    return std::make_pair(ideal, rec);
  };
  auto [ideal_a, rec_a] = side(da, a);
  auto [ideal_b, rec_b] = side(db, b);
  if (ideal_a.n() != ideal_b.n())
    throw ConfigError("manifest", "spectra shapes disagree");

  rec_a = align_ambiguities(rec_a, ideal_a).second;
  rec_b = align_ambiguities(rec_b, ideal_b).second;
  double l1a = spectrum_l1_error(rec_a, ideal_a);
  double l1b = spectrum_l1_error(rec_b, ideal_b);
  auto pa = prominent_peaks(rec_a, kPeakRelHeight, kPeakMinSep);
  auto pb = prominent_peaks(rec_b, kPeakRelHeight, kPeakMinSep);

  auto budget_of = [](const json& m) {
    return m.at("results").value("budget", 0.0);
  };

  auto peaks_str = [](const std::vector<int>& ps) {
    std::string s;
    for (std::size_t i = 0; i < ps.size(); ++i)
      s += (i ? ";" : "") + std::to_string(ps[i]);
    return s;
  };

  std::string report = "side,experiment,l1_error,budget,peaks\n";
  report += "a," + a.at("experiment").get<std::string>() + "," +
            format_double(l1a) + "," + format_double(budget_of(a)) + "," +
            peaks_str(pa) + "\n";
  report += "b," + b.at("experiment").get<std::string>() + "," +
            format_double(l1b) + "," + format_double(budget_of(b)) + "," +
            peaks_str(pb) + "\n";
  fs::path rp(report_path);
  if (rp.has_parent_path()) fs::create_directories(rp.parent_path());
  write_file(rp, report);

  std::string overlay = "k,ideal_a_abs,rec_a_abs,ideal_b_abs,rec_b_abs\n";
  for (int k = 0; k < ideal_a.n(); ++k)
    overlay += std::to_string(k) + "," +
               format_double(std::abs(ideal_a.values(k))) + "," +
               format_double(std::abs(rec_a.values(k))) + "," +
               format_double(std::abs(ideal_b.values(k))) + "," +
               format_double(std::abs(rec_b.values(k))) + "\n";
  write_file(rp.parent_path() / "overlay.csv", overlay);
  return 0;
}

}  // namespace specfree
