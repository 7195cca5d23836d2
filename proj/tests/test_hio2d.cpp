#include <algorithm>
#include <complex>
#include <cstring>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "specfree/dsp.hpp"
#include "specfree/hamiltonian.hpp"
#include "specfree/hio2d.hpp"
#include "specfree/signals.hpp"
#include "specfree/states.hpp"

using namespace specfree;
using Cx = std::complex<double>;

namespace {

// Single site, both spins: the number operator has diagonal {0, 1, 1, 2}.
Hamiltonian tiny_number_op() { return build_number_operator(Lattice{1, 1, true}); }

}  // namespace

TEST_CASE("anchor phases match the closed-form characteristic function") {
  Hamiltonian nop = tiny_number_op();
  QuantumState psi = make_uniform_superposition(2);
  const int m = 5;
  const double dz = 0.3;
  Eigen::VectorXcd anchors = classical_anchor_phases(nop, psi, dz, m);
  REQUIRE(anchors.size() == m);
  for (int lp = -2; lp <= 2; ++lp) {
    double z = lp * dz;
    Cx f = (1.0 + 2.0 * std::exp(Cx(0, z)) + std::exp(Cx(0, 2 * z))) / 4.0;
    int col = (lp % m + m) % m;  // centered grid, modulo storage
    CHECK(std::abs(anchors(col) - f / std::abs(f)) < 1e-12);
    CHECK(std::abs(std::abs(anchors(col)) - 1.0) < 1e-12);
  }
}

TEST_CASE("anchor phases require a diagonal operator") {
  Hamiltonian h = build_fermi_hubbard(Lattice{1, 1, true}, {1.0, 4.0});
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  QuantumState psi = make_uniform_superposition(1);
  CHECK_THROWS_AS(classical_anchor_phases(Hamiltonian(x), psi, 0.1, 3),
                  std::invalid_argument);
}

TEST_CASE("2D spectrum of a windowed signal is real and nonnegative") {
  Lattice lat{1, 2, true};
  Hamiltonian h = normalize_to_band(build_fermi_hubbard(lat, {1.0, 4.0}), 0.0,
                                    M_PI);
  Hamiltonian hd = build_number_operator(lat);
  QuantumState psi = make_uniform_superposition(4);
  Signal2D sig = signal_2d(h, hd, psi, 0.5, 15, 11);
  Spectrum2D F = dft2(sig);
  for (int k = 0; k < 15; ++k)
    for (int mm = 0; mm < 11; ++mm) {
      CHECK(std::abs(F.values(k, mm).imag()) < 1e-9);
      CHECK(F.values(k, mm).real() > -1e-9);
    }
}

TEST_CASE("init strategies are nonnegative and reproducible") {
  Eigen::MatrixXd abs_f(3, 3);
  abs_f << 1.0, 0.2, 0.2, 0.5, 0.1, 0.3, 0.5, 0.3, 0.1;
  HioConfig cfg;

  cfg.init = HioInit::FlatPositive;
  CHECK(init_spectrum(abs_f, cfg) == Eigen::MatrixXd::Ones(3, 3));

  cfg.init = HioInit::MagnitudeDft;
  Eigen::MatrixXd m = init_spectrum(abs_f, cfg);
  Eigen::MatrixXd expect =
      dft2_raw(abs_f.cast<Cx>(), -1).cwiseAbs();
  CHECK((m - expect).cwiseAbs().maxCoeff() < 1e-12);

  cfg.init = HioInit::RandomPhase;
  cfg.seed = 7;
  Eigen::MatrixXd a = init_spectrum(abs_f, cfg, 0);
  CHECK(a.minCoeff() >= 0.0);
  CHECK(a == init_spectrum(abs_f, cfg, 0));
  CHECK(a != init_spectrum(abs_f, cfg, 1));  // restarts decorrelate

  cfg.init = HioInit::Oversampled;  // realized inside hio_run only
  CHECK_THROWS_AS(init_spectrum(abs_f, cfg), std::invalid_argument);
}

TEST_CASE("hio_run validates its inputs") {
  Eigen::MatrixXd even = Eigen::MatrixXd::Ones(4, 3);
  HioConfig cfg;
  CHECK_THROWS_AS(hio_run(even, cfg), std::invalid_argument);
  Eigen::MatrixXd ok = Eigen::MatrixXd::Ones(3, 3);
  cfg.beta = 1.5;
  CHECK_THROWS_AS(hio_run(ok, cfg), std::invalid_argument);
  cfg.beta = 0.9;
  cfg.iterations = 0;
  CHECK_THROWS_AS(hio_run(ok, cfg), std::invalid_argument);
  cfg.iterations = 10;
  Eigen::VectorXcd bad_anchors = Eigen::VectorXcd::Ones(5);
  CHECK_THROWS_AS(
      hio_run(ok, cfg, std::optional<Eigen::VectorXcd>(bad_anchors)),
      std::invalid_argument);
}

TEST_CASE("hio_run bookkeeping is internally consistent") {
  Lattice lat{1, 2, true};
  Hamiltonian h = normalize_to_band(build_fermi_hubbard(lat, {1.0, 4.0}), 0.0,
                                    M_PI);
  Hamiltonian hd = build_number_operator(lat);
  QuantumState psi = make_uniform_superposition(4);
  const int n = 9;
  const double dt = 0.7;
  Signal2D sig = signal_2d(h, hd, psi, dt, n, n);
  Eigen::MatrixXd abs_f = sig.values.cwiseAbs();
  Eigen::VectorXcd anchors = classical_anchor_phases(hd, psi, dt, n);

  HioConfig cfg;
  cfg.iterations = 200;
  cfg.restarts = 2;
  cfg.seed = 1;
  HioResult r = hio_run(abs_f, cfg, anchors, n * dt);

  REQUIRE(r.residual_history.size() == 200u * 3u);
  double lo = *std::min_element(r.residual_history.begin(),
                                r.residual_history.end());
  CHECK(r.best_residual == lo);
  CHECK(r.residual_history[r.best_iteration] == r.best_residual);
  CHECK(r.f_rec.total_time == doctest::Approx(n * dt));
  // the working spectrum is real by construction
  for (int k = 0; k < n; ++k)
    for (int mm = 0; mm < n; ++mm)
      CHECK(r.f_rec.values(k, mm).imag() == 0.0);
  // recomputing the residual of the returned iterate reproduces the record
  Eigen::MatrixXcd f = dft2_raw(r.f_rec.values, +1) / double(n * n);
  double res = 0.0;
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      res += std::pow(std::abs(f(j, l)) - abs_f(j, l), 2);
  res = std::sqrt(res) / abs_f.norm();
  CHECK(res == doctest::Approx(r.best_residual).epsilon(1e-10));
}

TEST_CASE("the oversampled warm start converges on a small instance") {
  Lattice lat{1, 2, true};
  Hamiltonian h = normalize_to_band(build_fermi_hubbard(lat, {1.0, 4.0}), 0.0,
                                    M_PI);
  Hamiltonian hd = build_number_operator(lat);
  QuantumState psi = make_uniform_superposition(4);
  const int n = 15;
  const double dt = 0.6;
  Signal2D sig = signal_2d(h, hd, psi, dt, n, n);
  Eigen::MatrixXd abs_f = sig.values.cwiseAbs();
  Eigen::VectorXcd anchors = classical_anchor_phases(hd, psi, dt, n);

  HioConfig cfg;
  cfg.init = HioInit::Oversampled;
  cfg.iterations = 500;
  cfg.seed = 0;
  HioResult r = hio_run(abs_f, cfg, anchors, n * dt);
  // history covers the main loop only; the warm start is an init detail
  CHECK(r.residual_history.size() == 500u);
  CHECK(r.best_residual < 1e-2);
}

TEST_CASE("extract_1d reads the z = 0 column") {
  const int n = 7, m = 5;
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  Signal2D f;
  f.dt = 0.4;
  f.values.resize(n, m);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < m; ++l) f.values(j, l) = Cx(g(rng), g(rng));
  Spectrum1D F = extract_1d(f);
  REQUIRE(F.n() == n);
  CHECK(F.total_time == doctest::Approx(n * 0.4));
  for (int k = 0; k < n; ++k) {
    Cx sum(0, 0);
    for (int j = 0; j < n; ++j)
      sum += f.values(j, 0) * std::exp(Cx(0, -2.0 * M_PI * k * j / n));
    CHECK(std::abs(F.values(k) - sum) < 1e-10);
  }
}

TEST_CASE("residual history CSV carries the header") {
  std::string csv = residual_history_csv({0.5, 0.25});
  CHECK(csv.rfind("iter,residual\n", 0) == 0);
  CHECK(csv.find("0,0.5") != std::string::npos);
  CHECK(csv.find("1,0.25") != std::string::npos);
}

TEST_CASE("binary spectrum dump has the documented layout") {
  Spectrum2D s;
  s.values.resize(2, 3);
  s.values.setZero();
  s.values(0, 0) = 1.5;
  s.values(1, 2) = -2.0;
  auto bytes = spectrum2d_binary(s);
  REQUIRE(bytes.size() == 8 * sizeof(std::int64_t) + 6 * sizeof(double));
  std::int64_t header[8];
  std::memcpy(header, bytes.data(), sizeof(header));
  CHECK(header[0] == 0x3244324F4948LL);
  CHECK(header[1] == 1);
  CHECK(header[2] == 2);
  CHECK(header[3] == 3);
  double payload[6];
  std::memcpy(payload, bytes.data() + sizeof(header), sizeof(payload));
  CHECK(payload[0] == 1.5);   // row-major: (0,0)
  CHECK(payload[5] == -2.0);  // (1,2)
}
