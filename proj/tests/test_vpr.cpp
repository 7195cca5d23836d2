#include <random>

#include "doctest.h"
#include "specfree/dsp.hpp"
#include "specfree/vpr.hpp"

using namespace specfree;
using Cx = std::complex<double>;

namespace {

// Band-limited random signals: support {0..sigma-1} in frequency.
TimeSeries1D band_limited(int n, int sigma, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Spectrum1D F;
  F.values = Eigen::VectorXcd::Zero(n);
  for (int k = 0; k < sigma; ++k) F.values(k) = Cx(g(rng), g(rng));
  TimeSeries1D f = idft1(F);
  f.dt = 1.0;
  return f;
}

Eigen::VectorXcd random_phases(int len, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> a(0.0, 2.0 * M_PI);
  Eigen::VectorXcd y(len);
  for (int i = 0; i < len; ++i) y(i) = std::polar(1.0, a(rng));
  return y;
}

Eigen::VectorXcd true_phases(const TimeSeries1D& f1,
                             const std::vector<TimeSeries1D>& f2) {
  const int n = f1.n();
  Eigen::VectorXcd x((f2.size() + 1) * n);
  auto phase = [](Cx v) {
    double a = std::abs(v);
    return a < 1e-300 ? Cx(1.0, 0.0) : v / a;
  };
  for (int j = 0; j < n; ++j) x(j) = phase(f1.values(j));
  for (std::size_t r = 0; r < f2.size(); ++r)
    for (int j = 0; j < n; ++j) x((r + 1) * n + j) = phase(f2[r].values(j));
  return x;
}

}  // namespace

TEST_CASE("interference ratio equals the phase difference") {
  TimeSeries1D f1 = band_limited(24, 8, 1);
  std::vector<TimeSeries1D> f2 = {band_limited(24, 8, 2)};
  VprDataset ds = make_dataset(f1, f2);
  for (int j = 0; j < 24; ++j) {
    if (!interference_reliable(ds, 0, j)) continue;
    Cx expect = f1.values(j) * std::conj(f2[0].values(j)) /
                (std::abs(f1.values(j)) * std::abs(f2[0].values(j)));
    CHECK(std::abs(interference_ratio(ds, 0, j) - expect) < 1e-10);
  }
}

TEST_CASE("interference rows with tiny denominators are flagged") {
  TimeSeries1D f1, f2;
  f1.values = Eigen::VectorXcd::Ones(4);
  f2.values = Eigen::VectorXcd::Ones(4);
  f1.values(2) = Cx(0.0, 0.0);
  VprDataset ds = make_dataset(f1, {f2});
  CHECK(interference_reliable(ds, 0, 0));
  CHECK_FALSE(interference_reliable(ds, 0, 2));
}

TEST_CASE("Gram matrix reproduces the direct cost on random vectors") {
  TimeSeries1D f1 = band_limited(20, 6, 3);
  std::vector<TimeSeries1D> f2 = {band_limited(20, 6, 4),
                                  band_limited(20, 6, 5)};
  VprDataset ds = make_dataset(f1, f2);
  for (double weight : {1.0, 0.3}) {
    SupportQuadratic q(ds, 6, weight);
    for (unsigned seed = 0; seed < 5; ++seed) {
      Eigen::VectorXcd y = random_phases(3 * 20, 100 + seed);
      double direct = evaluate_cost(ds, 6, weight, y);
      Eigen::VectorXcd gy = q.gram() * y;
      double through_gram = std::real(y.dot(gy));
      CHECK(direct == doctest::Approx(through_gram).epsilon(1e-10));
    }
  }
}

TEST_CASE("true phases annihilate the noiseless cost at the true support") {
  TimeSeries1D f1 = band_limited(20, 6, 6);
  std::vector<TimeSeries1D> f2 = {band_limited(20, 6, 7)};
  VprDataset ds = make_dataset(f1, f2);
  Eigen::VectorXcd x = true_phases(f1, f2);
  CHECK(evaluate_cost(ds, 6, 1.0, x) < 1e-16);
  // an undersized support hypothesis leaves residual cost
  CHECK(evaluate_cost(ds, 4, 1.0, x) > 1e-6);
}

TEST_CASE("solve_quadratic recovers the signal up to trivial ambiguities") {
  TimeSeries1D f1 = band_limited(20, 6, 8);
  std::vector<TimeSeries1D> f2 = {band_limited(20, 6, 9)};
  VprDataset ds = make_dataset(f1, f2);
  SupportQuadratic q(ds, 6);
  EigPair e = solve_quadratic(q);
  CHECK(e.lambda_min < 1e-12);
  CHECK(e.lambda_second > 1e-8);

  PhaseAssignment y;
  y.y = e.y;
  TimeSeries1D rec = reconstruct(ds, y);
  Spectrum1D rec_f = dft1(rec), ref_f = dft1(f1);
  auto [t, aligned] = align_ambiguities(rec_f, ref_f);
  CHECK(spectrum_l1_error(aligned, ref_f) < 1e-6);
}

TEST_CASE("free coordinates are excluded and re-embedded as zeros") {
  TimeSeries1D f1, f2;
  f1.values = Eigen::VectorXcd::Ones(8);
  f2.values = Eigen::VectorXcd::Ones(8);
  f1.values(3) = Cx(0.0, 0.0);  // dead sample: support rows can't see it
  VprDataset ds = make_dataset(f1, {f2});
  SupportQuadratic q(ds, 8);  // s = N: no support rows at all
  CHECK(q.dropped_rows() == 1);
  // the dropped interference row frees both of its phase coordinates
  REQUIRE(q.free_coords().size() == 2);
  CHECK(q.free_coords()[0] == 3);
  CHECK(q.free_coords()[1] == 8 + 3);
  EigPair e = solve_quadratic(q);
  CHECK(std::abs(e.y(3)) < 1e-12);
  CHECK(std::abs(e.y(8 + 3)) < 1e-12);
}

TEST_CASE("shape accounts for support rows, interference rows and drops") {
  TimeSeries1D f1 = band_limited(12, 4, 10);
  std::vector<TimeSeries1D> f2 = {band_limited(12, 4, 11)};
  VprDataset ds = make_dataset(f1, {f2});
  SupportQuadratic q(ds, 4);
  auto [rows, cols] = q.shape();
  CHECK(cols == 2 * 12);
  CHECK(rows == 2 * (12 - 4) + 12 - q.dropped_rows());
}

TEST_CASE("smallest_eigpair agrees between dense and iterative paths") {
  std::mt19937 rng(13);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(30, 30);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j) a(i, j) = Cx(g(rng), g(rng));
  Eigen::MatrixXcd gram = a.adjoint() * a;  // Hermitian PSD
  EigPair dense = smallest_eigpair(gram, 1024);
  EigPair iter = smallest_eigpair(gram, 4);  // forces the Lanczos path
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  CHECK(dense.lambda_min == doctest::Approx(es.eigenvalues()(0)));
  CHECK(dense.lambda_second == doctest::Approx(es.eigenvalues()(1)));
  CHECK(iter.lambda_min ==
        doctest::Approx(es.eigenvalues()(0)).epsilon(1e-7));
  CHECK(iter.lambda_second ==
        doctest::Approx(es.eigenvalues()(1)).epsilon(1e-6));
  // eigenvector normalization contract: 2-norm sqrt(dim)
  CHECK(dense.y.norm() == doctest::Approx(std::sqrt(30.0)));
}

TEST_CASE("support selection picks the sharpest drop") {
  std::vector<SweepEntry> entries = {
      {3, 1.0e-2, 2.0e-2}, {4, 8.0e-3, 1.9e-2}, {5, 1.0e-6, 1.5e-2},
      {6, 9.0e-7, 1.4e-2},
  };
  // returns the index of the selected entry, here the one holding s = 5
  auto [idx, flagged] = select_support(entries, SupportStrategy::MaxDropRatio);
  CHECK(idx == 2);
  CHECK(entries[idx].s == 5);
  CHECK_FALSE(flagged);

  std::vector<SweepEntry> flat = {
      {3, 1.0e-2, 2.0e-2}, {4, 9.0e-3, 1.9e-2}, {5, 8.5e-3, 1.8e-2}};
  auto [idx2, flagged2] = select_support(flat, SupportStrategy::MaxDropRatio);
  CHECK(flagged2);
  CHECK(idx2 == 0);
}

TEST_CASE("sweep_support returns entries and the minimizing assignment") {
  TimeSeries1D f1 = band_limited(16, 5, 14);
  std::vector<TimeSeries1D> f2 = {band_limited(16, 5, 15)};
  VprDataset ds = make_dataset(f1, {f2});
  SupportSweep sw = sweep_support(ds, {3, 4, 5, 6, 7});
  REQUIRE(sw.entries.size() == 5);
  CHECK(sw.s_star == 5);
  CHECK_FALSE(sw.flagged);
  REQUIRE(sw.y_at_s_star.has_value());
  CHECK(sw.y_at_s_star->y.size() == 2 * 16);
}

TEST_CASE("reconstruct applies measured magnitudes and optional rounding") {
  TimeSeries1D f1, f2;
  f1.values.resize(3);
  f1.values << Cx(2, 0), Cx(0, 0), Cx(1, 0);
  f2.values = Eigen::VectorXcd::Ones(3);
  VprDataset ds = make_dataset(f1, {f2});
  PhaseAssignment y;
  y.y = Eigen::VectorXcd::Ones(6);
  y.y(0) = Cx(0.0, 0.5);  // non-unit modulus
  TimeSeries1D raw = reconstruct(ds, y, false);
  CHECK(std::abs(raw.values(0) - Cx(0.0, 1.0)) < 1e-12);  // 2 * 0.5i
  TimeSeries1D rounded = reconstruct(ds, y, true);
  CHECK(std::abs(rounded.values(0) - Cx(0.0, 2.0)) < 1e-12);
  CHECK(std::abs(rounded.values(1)) < 1e-12);  // zero magnitude stays zero
}

TEST_CASE("noisy dataset converges to the exact one with many shots") {
  TimeSeries1D f1 = band_limited(12, 4, 16);
  // rescale so all probabilities fit in [0,1]
  double peak = f1.values.cwiseAbs().maxCoeff();
  f1.values /= 4.0 * peak;
  std::vector<TimeSeries1D> f2 = {band_limited(12, 4, 17)};
  f2[0].values /= 4.0 * f2[0].values.cwiseAbs().maxCoeff();
  VprDataset exact = make_dataset(f1, f2);
  ShotConfig cfg{100000000, 5};
  VprDataset noisy = make_noisy_dataset(f1, f2, cfg);
  CHECK((noisy.abs_f1 - exact.abs_f1).cwiseAbs().maxCoeff() < 2e-3);
  CHECK((noisy.abs_f3[0] - exact.abs_f3[0]).cwiseAbs().maxCoeff() < 2e-3);
  CHECK((noisy.abs_f4[0] - exact.abs_f4[0]).cwiseAbs().maxCoeff() < 2e-3);
}
