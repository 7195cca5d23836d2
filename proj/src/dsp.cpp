#include "specfree/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <charconv>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace specfree {

namespace {

std::mutex fftw_plan_mutex;

using RowMajorXcd =
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic,
                  Eigen::RowMajor>;

void run_fft_1d(const std::complex<double>* in, std::complex<double>* out,
                int n, int sign) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    plan = fftw_plan_dft_1d(
        n, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
        reinterpret_cast<fftw_complex*>(out), sign,
        FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(fftw_plan_mutex);
  fftw_destroy_plan(plan);
}

void run_fft_2d(const std::complex<double>* in, std::complex<double>* out,
                int n0, int n1, int sign) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    plan = fftw_plan_dft_2d(
        n0, n1,
        reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
        reinterpret_cast<fftw_complex*>(out), sign,
        FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(fftw_plan_mutex);
  fftw_destroy_plan(plan);
}

}  // namespace

Eigen::VectorXcd dft1_raw(const Eigen::VectorXcd& f, int sign) {
  Eigen::VectorXcd out(f.size());
  run_fft_1d(f.data(), out.data(), static_cast<int>(f.size()),
             sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  return out;
}

Eigen::MatrixXcd dft2_raw(const Eigen::MatrixXcd& f, int sign) {
  RowMajorXcd in = f;
  RowMajorXcd out(f.rows(), f.cols());
  run_fft_2d(in.data(), out.data(), static_cast<int>(f.rows()),
             static_cast<int>(f.cols()), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  return out;
}

Spectrum1D dft1(const TimeSeries1D& f) {
  Spectrum1D s;
  s.total_time = f.total_time();
  s.values = dft1_raw(f.values, -1);
  return s;
}

TimeSeries1D idft1(const Spectrum1D& F) {
  TimeSeries1D f;
  f.dt = F.total_time / F.n();
  f.values = dft1_raw(F.values, +1) / static_cast<double>(F.n());
  return f;
}

Spectrum2D dft2(const Signal2D& f) {
  Spectrum2D s;
  s.total_time = f.total_time();
  s.values = dft2_raw(f.values, -1);
  return s;
}

Signal2D idft2(const Spectrum2D& F) {
  Signal2D f;
  f.dt = F.total_time / F.n();
  f.values = dft2_raw(F.values, +1) / static_cast<double>(F.n() * F.m());
  return f;
}

double spectrum_l1_error(const Spectrum1D& a, const Spectrum1D& b) {
  if (a.n() != b.n()) throw std::invalid_argument("spectrum shape mismatch");
  return (a.values.cwiseAbs() - b.values.cwiseAbs()).cwiseAbs().sum() / a.n();
}

double spectrum_l1_error(const Spectrum2D& a, const Spectrum2D& b) {
  if (a.n() != b.n() || a.m() != b.m())
    throw std::invalid_argument("spectrum shape mismatch");
  return (a.values.cwiseAbs() - b.values.cwiseAbs()).cwiseAbs().sum() /
         (a.n() * a.m());
}

Spectrum1D apply_transform(const Spectrum1D& s, const AmbiguityTransform& t) {
  const int n = s.n();
  Spectrum1D out;
  out.total_time = s.total_time;
  out.values.resize(n);
  std::complex<double> phase = std::polar(1.0, t.global_phase);
  for (int k = 0; k < n; ++k) {
    int src = (k + t.shift_k) % n;
    std::complex<double> v =
        t.conj_reflect ? std::conj(s.values((n - src) % n)) : s.values(src);
    out.values(k) = phase * v;
  }
  return out;
}

Spectrum2D apply_transform(const Spectrum2D& s, const AmbiguityTransform& t) {
  const int n = s.n(), m = s.m();
  Spectrum2D out;
  out.total_time = s.total_time;
  out.values.resize(n, m);
  std::complex<double> phase = std::polar(1.0, t.global_phase);
  for (int k = 0; k < n; ++k) {
    int sk = (k + t.shift_k) % n;
    for (int mm = 0; mm < m; ++mm) {
      int sm = (mm + t.shift_m) % m;
      std::complex<double> v =
          t.conj_reflect ? std::conj(s.values((n - sk) % n, (m - sm) % m))
                         : s.values(sk, sm);
      out.values(k, mm) = phase * v;
    }
  }
  return out;
}

namespace {

double fit_phase(const Eigen::VectorXcd& ref, const Eigen::VectorXcd& cand) {
  std::complex<double> overlap = (ref.conjugate().array() * cand.array()).sum();
  if (std::abs(overlap) < 1e-300) return 0.0;
  return -std::arg(overlap);
}

}  // namespace

std::pair<AmbiguityTransform, Spectrum1D> align_ambiguities(
    const Spectrum1D& candidate, const Spectrum1D& reference) {
  if (candidate.n() != reference.n())
    throw std::invalid_argument("spectrum shape mismatch");
  const int n = candidate.n();
  Eigen::VectorXd ra = reference.values.cwiseAbs();

  AmbiguityTransform best;
  double best_err = std::numeric_limits<double>::infinity();
  for (int refl = 0; refl < 2; ++refl) {
    Eigen::VectorXd ca(n);
    for (int k = 0; k < n; ++k)
      ca(k) = refl ? std::abs(candidate.values((n - k) % n))
                   : std::abs(candidate.values(k));
    for (int shift = 0; shift < n; ++shift) {
      double err = 0.0;
      for (int k = 0; k < n; ++k) err += std::abs(ca((k + shift) % n) - ra(k));
      if (err < best_err - 1e-15) {
        best_err = err;
        best.shift_k = shift;
        best.conj_reflect = refl != 0;
      }
    }
  }
  best.global_phase = 0.0;
  Spectrum1D moved = apply_transform(candidate, best);
  best.global_phase = fit_phase(reference.values, moved.values);
  return {best, apply_transform(candidate, best)};
}

std::pair<AmbiguityTransform, Spectrum2D> align_ambiguities(
    const Spectrum2D& candidate, const Spectrum2D& reference) {
  if (candidate.n() != reference.n() || candidate.m() != reference.m())
    throw std::invalid_argument("spectrum shape mismatch");
  const int n = candidate.n(), m = candidate.m();

  // Cross-correlation through the DFT picks the L2-optimal shift for each
  // reflection option; the final choice between the two is by l1 error.
  Eigen::MatrixXcd rmag = reference.values.cwiseAbs().cast<std::complex<double>>();
  Eigen::MatrixXcd rhat = dft2_raw(rmag, -1);

  AmbiguityTransform best;
  double best_err = std::numeric_limits<double>::infinity();
  for (int refl = 0; refl < 2; ++refl) {
    Eigen::MatrixXcd cmagm(n, m);
    for (int k = 0; k < n; ++k)
      for (int mm = 0; mm < m; ++mm)
        cmagm(k, mm) = refl
                           ? std::abs(candidate.values((n - k) % n, (m - mm) % m))
                           : std::abs(candidate.values(k, mm));
    Eigen::MatrixXcd chat = dft2_raw(cmagm, -1);
    // corr[s] = sum_k R[k] * C[k+s]: conjugate trick in Fourier space.
    Eigen::MatrixXcd prod = rhat.conjugate().cwiseProduct(chat);
    Eigen::MatrixXcd corr = dft2_raw(prod, +1);  // unnormalized inverse
    int bk = 0, bm = 0;
    double bval = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k)
      for (int mm = 0; mm < m; ++mm)
        if (corr(k, mm).real() > bval + 1e-12) {
          bval = corr(k, mm).real();
          bk = k;
          bm = mm;
        }
    AmbiguityTransform t;
    t.shift_k = bk;
    t.shift_m = bm;
    t.conj_reflect = refl != 0;
    Spectrum2D moved = apply_transform(candidate, t);
    double err = spectrum_l1_error(moved, reference);
    if (err < best_err) {
      best_err = err;
      best = t;
    }
  }
  best.global_phase = 0.0;
  Spectrum2D moved = apply_transform(candidate, best);
  best.global_phase =
      fit_phase(reference.values.reshaped(), moved.values.reshaped());
  return {best, apply_transform(candidate, best)};
}

Spectrum1D fractional_shift(const Spectrum1D& s, double a) {
  const int n = s.n();
  TimeSeries1D f = idft1(s);
  for (int j = 0; j < n; ++j) {
    int jp = j <= n / 2 ? j : j - n;
    f.values(j) *=
        std::exp(std::complex<double>(0.0, -2.0 * M_PI * a * jp / n));
  }
  Spectrum1D out = dft1(f);
  out.total_time = s.total_time;
  return out;
}

ContinuousAlignment align_continuous(const Spectrum1D& candidate,
                                     const Spectrum1D& reference) {
  ContinuousAlignment best;
  best.l1 = std::numeric_limits<double>::infinity();
  auto eval = [&](double a) {
    Spectrum1D shifted = a == 0.0 ? candidate : fractional_shift(candidate, a);
    auto [t, aligned] = align_ambiguities(shifted, reference);
    double l1 = spectrum_l1_error(aligned, reference);
    if (l1 < best.l1) best = {t, a, std::move(aligned), l1};
  };
  for (double a = -1.0; a <= 1.0 + 1e-9; a += 0.05) eval(a);
  for (double step = 0.025; step > 1e-5; step /= 2.0) {
    double center = best.fractional_shift;
    eval(center - step);
    eval(center + step);
  }
  return best;
}

PeakList peak_locations(const Spectrum1D& F, int count, int min_separation) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  const int n = F.n();
  Eigen::VectorXd mag = F.values.cwiseAbs();

  std::vector<int> maxima;
  for (int k = 0; k < n; ++k) {
    double left = mag((k - 1 + n) % n), right = mag((k + 1) % n);
    if (mag(k) >= left && mag(k) >= right) maxima.push_back(k);
  }
  std::stable_sort(maxima.begin(), maxima.end(), [&](int a, int b) {
    if (mag(a) != mag(b)) return mag(a) > mag(b);
    return a < b;
  });

  PeakList out;
  std::vector<int> skipped;
  for (int k : maxima) {
    if (static_cast<int>(out.bins.size()) == count) break;
    bool ok = true;
    for (int sel : out.bins) {
      int d = std::abs(k - sel);
      d = std::min(d, n - d);
      if (d < min_separation) {
        ok = false;
        break;
      }
    }
    if (ok)
      out.bins.push_back(k);
    else
      skipped.push_back(k);
  }
  out.complete = static_cast<int>(out.bins.size()) == count;
  // Flag selections that rested on a height tie with a rejected candidate.
  for (int k : out.bins)
    for (int other : skipped)
      if (std::abs(mag(k) - mag(other)) <= 1e-12 * std::max(1.0, mag(k)))
        out.ambiguous = true;
  return out;
}

std::vector<int> prominent_peaks(const Spectrum1D& F, double rel_height,
                                 int min_separation) {
  const int n = F.n();
  Eigen::VectorXd mag = F.values.cwiseAbs();
  double cutoff = rel_height * mag.maxCoeff();

  std::vector<int> maxima;
  for (int k = 0; k < n; ++k) {
    double left = mag((k - 1 + n) % n), right = mag((k + 1) % n);
    if (mag(k) >= left && mag(k) >= right && mag(k) >= cutoff)
      maxima.push_back(k);
  }
  std::stable_sort(maxima.begin(), maxima.end(), [&](int a, int b) {
    if (mag(a) != mag(b)) return mag(a) > mag(b);
    return a < b;
  });
  std::vector<int> out;
  for (int k : maxima) {
    bool ok = true;
    for (int sel : out) {
      int d = std::abs(k - sel);
      d = std::min(d, n - d);
      if (d < min_separation) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(k);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string spectrum_to_csv(const Spectrum1D& s) {
  std::string out = "k,omega_k,re,im,abs\n";
  for (int k = 0; k < s.n(); ++k) {
    out += std::to_string(k) + "," + format_double(s.omega(k)) + "," +
           format_double(s.values(k).real()) + "," +
           format_double(s.values(k).imag()) + "," +
           format_double(std::abs(s.values(k))) + "\n";
  }
  return out;
}

std::string spectrum_to_csv(const Spectrum2D& s) {
  std::string out = "k,m,re,im,abs\n";
  for (int k = 0; k < s.n(); ++k)
    for (int mm = 0; mm < s.m(); ++mm)
      out += std::to_string(k) + "," + std::to_string(mm) + "," +
             format_double(s.values(k, mm).real()) + "," +
             format_double(s.values(k, mm).imag()) + "," +
             format_double(std::abs(s.values(k, mm))) + "\n";
  return out;
}

}  // namespace specfree
