#include "specfree/hio2d.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>

namespace specfree {

Eigen::VectorXcd classical_anchor_phases(const Hamiltonian& hd,
                                         const QuantumState& psi, double dz,
                                         int m) {
  const int dim = hd.dim();
  if (psi.amplitudes.size() != dim)
    throw std::invalid_argument("state dimension disagrees with operator");
  Eigen::MatrixXcd off = hd.matrix;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, hd.matrix.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("anchor operator must be diagonal");

  Eigen::VectorXd p = psi.amplitudes.cwiseAbs2();
  Eigen::VectorXd d = hd.matrix.diagonal().real();

  const int half = (m - 1) / 2;
  Eigen::VectorXcd anchors(m);
  for (int lp = -half; lp <= half; ++lp) {
    std::complex<double> f(0.0, 0.0);
    for (int i = 0; i < dim; ++i)
      f += p(i) * std::exp(std::complex<double>(0.0, lp * dz * d(i)));
    int col = (lp % m + m) % m;
    double a = std::abs(f);
    anchors(col) = a < 1e-300 ? std::complex<double>(1.0, 0.0) : f / a;
  }
  return anchors;
}

Eigen::MatrixXd init_spectrum(const Eigen::MatrixXd& abs_f,
                              const HioConfig& cfg, std::uint64_t run_index) {
  const long n = abs_f.rows(), m = abs_f.cols();
  switch (cfg.init) {
    case HioInit::FlatPositive:
      return Eigen::MatrixXd::Ones(n, m);
    case HioInit::MagnitudeDft:
      return dft2_raw(abs_f.cast<std::complex<double>>(), -1).cwiseAbs();
    case HioInit::RandomPhase: {
      std::mt19937_64 rng(cfg.seed * 0x9e3779b97f4a7c15ULL + run_index + 1);
      std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
      Eigen::MatrixXcd seeded(n, m);
      for (long j = 0; j < n; ++j)
        for (long l = 0; l < m; ++l)
          seeded(j, l) = std::polar(abs_f(j, l), angle(rng));
      return dft2_raw(seeded, -1).cwiseAbs();
    }
    case HioInit::Oversampled:
      throw std::invalid_argument(
          "the oversampled warm start is driven by hio_run, not init_spectrum");
  }
  throw std::invalid_argument("unknown init strategy");
}

namespace {

constexpr int kWarmStartIterations = 2000;

// Preliminary HIO pass on the zero-extended (2n+1)x(2m+1) grid. The window
// guarantees the true signal vanishes there, so the extension magnitudes are
// exactly zero; the oversampled problem converges from random phases where
// the critically sampled one stagnates. The best extended iterate, restricted
// back to the measured box, seeds the main loop.
Eigen::MatrixXd oversampled_warm_start(
    const Eigen::MatrixXd& abs_f, const HioConfig& cfg,
    const std::optional<Eigen::VectorXcd>& anchors, std::uint64_t run_index) {
  const long n = abs_f.rows(), m = abs_f.cols();
  const long gn = 2 * n + 1, gm = 2 * m + 1;
  const long hn = (n - 1) / 2, hm = (m - 1) / 2;
  auto wrap = [](long i, long len) { return (i % len + len) % len; };

  Eigen::MatrixXd abs_ext = Eigen::MatrixXd::Zero(gn, gm);
  for (long jp = -hn; jp <= hn; ++jp)
    for (long lp = -hm; lp <= hm; ++lp)
      abs_ext(wrap(jp, gn), wrap(lp, gm)) = abs_f(wrap(jp, n), wrap(lp, m));

  std::optional<Eigen::VectorXcd> anchors_ext;
  if (anchors) {
    Eigen::VectorXcd a = Eigen::VectorXcd::Ones(gm);
    for (long lp = -hm; lp <= hm; ++lp)
      a(wrap(lp, gm)) = (*anchors)(wrap(lp, m));
    anchors_ext = std::move(a);
  }

  HioConfig inner = cfg;
  inner.init = HioInit::RandomPhase;
  inner.iterations = kWarmStartIterations;
  inner.restarts = 0;
  inner.seed = cfg.seed + 0x51ed2701ULL * run_index;
  HioResult ext = hio_run(abs_ext, inner, anchors_ext);

  Spectrum2D rec;
  rec.values = ext.f_rec.values;
  rec.total_time = 1.0;
  Signal2D obj = idft2(rec);
  Eigen::MatrixXcd restricted(n, m);
  for (long jp = -hn; jp <= hn; ++jp)
    for (long lp = -hm; lp <= hm; ++lp)
      restricted(wrap(jp, n), wrap(lp, m)) =
          obj.values(wrap(jp, gn), wrap(lp, gm));
  return dft2_raw(restricted, -1).real();
}

}  // namespace

HioResult hio_run(const Eigen::MatrixXd& abs_f, const HioConfig& cfg,
                  const std::optional<Eigen::VectorXcd>& anchors,
                  double total_time) {
  const long n = abs_f.rows(), m = abs_f.cols();
  if (n % 2 == 0 || m % 2 == 0)
    throw std::invalid_argument("hio_run requires odd dimensions");
  if (cfg.beta < 0.0 || cfg.beta > 1.0)
    throw std::invalid_argument("beta must lie in [0,1]");
  if (cfg.iterations < 1)
    throw std::invalid_argument("iterations must be positive");
  if (anchors && anchors->size() != m)
    throw std::invalid_argument("anchor length disagrees with grid");
  const bool use_anchors = cfg.anchor_row0 && anchors.has_value();
  const double mag_norm = std::max(abs_f.norm(), 1e-300);
  const double nm = static_cast<double>(n * m);

  HioResult out;
  out.best_residual = std::numeric_limits<double>::infinity();
  out.residual_history.reserve(
      static_cast<std::size_t>(cfg.iterations) * (cfg.restarts + 1));

  for (int run = 0; run <= cfg.restarts; ++run) {
    Eigen::MatrixXd F =
        cfg.init == HioInit::Oversampled
            ? oversampled_warm_start(abs_f, cfg, anchors, run)
            : init_spectrum(abs_f, cfg, run);
    for (int it = 0; it < cfg.iterations; ++it) {
      Eigen::MatrixXcd f = dft2_raw(F.cast<std::complex<double>>(), +1) / nm;

      double residual = 0.0;
      for (long j = 0; j < n; ++j)
        for (long l = 0; l < m; ++l) {
          double d = std::abs(f(j, l)) - abs_f(j, l);
          residual += d * d;
        }
      residual = std::sqrt(residual) / mag_norm;
      long global_it = static_cast<long>(out.residual_history.size());
      out.residual_history.push_back(residual);
      if (residual < out.best_residual) {
        out.best_residual = residual;
        out.best_iteration = global_it;
        out.f_rec.values = F.cast<std::complex<double>>();
      }

      // Magnitude projection in the object domain; phases come from the
      // current iterate except on the anchored row.
      Eigen::MatrixXcd ft(n, m);
      for (long j = 0; j < n; ++j)
        for (long l = 0; l < m; ++l) {
          double a = std::abs(f(j, l));
          std::complex<double> ph =
              a < 1e-300 ? std::complex<double>(1.0, 0.0) : f(j, l) / a;
          ft(j, l) = abs_f(j, l) * ph;
        }
      if (use_anchors)
        for (long l = 0; l < m; ++l) ft(0, l) = abs_f(0, l) * (*anchors)(l);

      Eigen::MatrixXd Ft = dft2_raw(ft, -1).real();
      for (long k = 0; k < n; ++k)
        for (long mm = 0; mm < m; ++mm)
          F(k, mm) = Ft(k, mm) > 0.0 ? Ft(k, mm)
                                     : F(k, mm) - cfg.beta * Ft(k, mm);
    }
  }
  out.f_rec.total_time = total_time;
  return out;
}

Spectrum1D extract_1d(const Signal2D& f_rec) {
  Spectrum1D out;
  out.total_time = f_rec.total_time();
  out.values = dft1_raw(f_rec.values.col(0), -1);
  return out;
}

std::string residual_history_csv(const std::vector<double>& history) {
  std::string out = "iter,residual\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    out += std::to_string(i) + "," + format_double(history[i]) + "\n";
  return out;
}

std::vector<std::uint8_t> spectrum2d_binary(const Spectrum2D& s) {
  const std::int64_t header[8] = {0x3244324F4948LL,  // "HIO2D2"
                                  1,
                                  s.n(),
                                  s.m(),
                                  0,
                                  0,
                                  0,
                                  0};
  std::vector<std::uint8_t> out(sizeof(header) +
                                sizeof(double) * s.n() * s.m());
  std::memcpy(out.data(), header, sizeof(header));
  std::size_t pos = sizeof(header);
  for (int k = 0; k < s.n(); ++k)
    for (int mm = 0; mm < s.m(); ++mm) {
      double v = s.values(k, mm).real();
      std::memcpy(out.data() + pos, &v, sizeof(double));
      pos += sizeof(double);
    }
  return out;
}

}  // namespace specfree
