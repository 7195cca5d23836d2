#include "specfree/vpr.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "specfree/dsp.hpp"

namespace specfree {

namespace {

void check_dataset(const VprDataset& ds) {
  const int n = ds.n();
  if (n == 0) throw std::invalid_argument("empty dataset");
  if (ds.abs_f3.size() != ds.abs_f2.size() ||
      ds.abs_f4.size() != ds.abs_f2.size())
    throw std::invalid_argument("dataset magnitude families disagree in count");
  for (std::size_t r = 0; r < ds.abs_f2.size(); ++r) {
    if (ds.abs_f2[r].size() != n || ds.abs_f3[r].size() != n ||
        ds.abs_f4[r].size() != n)
      throw std::invalid_argument("dataset magnitude lengths disagree");
  }
}

}  // namespace

VprDataset make_dataset(const TimeSeries1D& f1,
                        const std::vector<TimeSeries1D>& f2) {
  VprDataset ds;
  ds.dt = f1.dt;
  ds.abs_f1 = f1.values.cwiseAbs();
  const std::complex<double> iu(0.0, 1.0);
  for (const auto& g : f2) {
    if (g.n() != f1.n()) throw std::invalid_argument("signal lengths disagree");
    ds.abs_f2.push_back(g.values.cwiseAbs());
    ds.abs_f3.push_back((f1.values + g.values).cwiseAbs());
    ds.abs_f4.push_back((f1.values + iu * g.values).cwiseAbs());
  }
  return ds;
}

VprDataset make_noisy_dataset(const TimeSeries1D& f1,
                              const std::vector<TimeSeries1D>& f2,
                              const ShotConfig& cfg,
                              const std::vector<double>& scales3,
                              const std::vector<double>& scales4) {
  const int n = f1.n();
  const std::size_t r_count = f2.size();
  if ((!scales3.empty() && scales3.size() != r_count) ||
      (!scales4.empty() && scales4.size() != r_count))
    throw std::invalid_argument("interference scale count disagrees");
  const std::complex<double> iu(0.0, 1.0);

  VprDataset ds;
  ds.dt = f1.dt;
  ds.abs_f1.resize(n);
  for (int j = 0; j < n; ++j)
    ds.abs_f1(j) = noisy_magnitude(f1.values(j), 1.0, cfg, 0, j);
  for (std::size_t r = 0; r < r_count; ++r) {
    if (f2[r].n() != n) throw std::invalid_argument("signal lengths disagree");
    double s3 = scales3.empty() ? 2.0 : scales3[r];
    double s4 = scales4.empty() ? 2.0 : scales4[r];
    Eigen::VectorXd m2(n), m3(n), m4(n);
    for (int j = 0; j < n; ++j) {
      m2(j) = noisy_magnitude(f2[r].values(j), 1.0, cfg, 3 * r + 1, j);
      m3(j) = noisy_magnitude(f1.values(j) + f2[r].values(j), s3, cfg,
                              3 * r + 2, j);
      m4(j) = noisy_magnitude(f1.values(j) + iu * f2[r].values(j), s4, cfg,
                              3 * r + 3, j);
    }
    ds.abs_f2.push_back(std::move(m2));
    ds.abs_f3.push_back(std::move(m3));
    ds.abs_f4.push_back(std::move(m4));
  }
  return ds;
}

std::complex<double> interference_ratio(const VprDataset& ds, int r, int j,
                                        double eps) {
  double a1 = ds.abs_f1(j), a2 = ds.abs_f2[r](j);
  double denom = 2.0 * a1 * a2;
  if (denom < eps) return {0.0, 0.0};
  double s3 = ds.abs_f3[r](j) * ds.abs_f3[r](j);
  double s4 = ds.abs_f4[r](j) * ds.abs_f4[r](j);
  double common = a1 * a1 + a2 * a2;
  std::complex<double> num(s3 - common, s4 - common);
  return num / denom;
}

bool interference_reliable(const VprDataset& ds, int r, int j, double eps) {
  return 2.0 * ds.abs_f1(j) * ds.abs_f2[r](j) >= eps;
}

SupportQuadratic::SupportQuadratic(const VprDataset& ds, int s, double weight,
                                   double eps)
    : s_(s), weight_(weight) {
  check_dataset(ds);
  n_ = ds.n();
  r_ = ds.r_count();
  if (s < 0 || s > n_) throw std::invalid_argument("support size out of range");
  const int dim = (r_ + 1) * n_;
  gram_ = Eigen::MatrixXcd::Zero(dim, dim);

  // Support block per signal family: rows k = s..N-1 of the DFT applied to
  // the magnitude-weighted phase block. The Gram entries collapse to
  // m[j] m[j'] K(j'-j) with K(d) = sum_{k=s}^{N-1} e^{-i 2 pi k d / N}.
  Eigen::VectorXcd kernel(n_);
  for (int d = 0; d < n_; ++d) {
    std::complex<double> acc(0.0, 0.0);
    for (int k = s; k < n_; ++k)
      acc += std::polar(1.0, -2.0 * M_PI * k * d / n_);
    kernel(d) = acc;
  }
  for (int fam = 0; fam <= r_; ++fam) {
    const Eigen::VectorXd& mag = fam == 0 ? ds.abs_f1 : ds.abs_f2[fam - 1];
    const int off = fam * n_;
    for (int j = 0; j < n_; ++j)
      for (int jp = 0; jp < n_; ++jp)
        gram_(off + j, off + jp) +=
            weight * mag(j) * mag(jp) * kernel((jp - j + n_) % n_);
  }

  // Interference rows: |y_j - g y_{rN+j}|^2 per reliable (r, j) with the
  // phase-only ratio g = G/|G|.
  std::vector<std::vector<char>> kept(r_, std::vector<char>(n_, 0));
  for (int r = 0; r < r_; ++r) {
    for (int j = 0; j < n_; ++j) {
      if (!interference_reliable(ds, r, j, eps)) {
        ++dropped_;
        continue;
      }
      std::complex<double> g = interference_ratio(ds, r, j, eps);
      double ag = std::abs(g);
      if (ag < eps) {
        ++dropped_;
        continue;
      }
      g /= ag;
      kept[r][j] = 1;
      const int jb = (r + 1) * n_ + j;
      gram_(j, j) += 1.0;
      gram_(jb, jb) += 1.0;
      gram_(j, jb) -= g;
      gram_(jb, j) -= std::conj(g);
    }
  }

  // A dropped row together with a vanishing magnitude leaves a zero column:
  // that unknown is unconstrained and would contribute a spurious zero
  // eigenvalue.
  const double tol_mag = 1e-12;
  for (int j = 0; j < n_; ++j) {
    bool any_kept = false;
    for (int r = 0; r < r_; ++r) any_kept = any_kept || kept[r][j];
    if ((s >= n_ || ds.abs_f1(j) < tol_mag) && !any_kept) free_.push_back(j);
  }
  for (int r = 0; r < r_; ++r)
    for (int j = 0; j < n_; ++j)
      if ((s >= n_ || ds.abs_f2[r](j) < tol_mag) && !kept[r][j])
        free_.push_back((r + 1) * n_ + j);
  std::sort(free_.begin(), free_.end());
}

EigPair solve_quadratic(const SupportQuadratic& q, int dense_cap) {
  const Eigen::MatrixXcd& g = q.gram();
  const long dim = g.rows();
  if (q.free_coords().empty()) return smallest_eigpair(g, dense_cap);

  std::vector<long> keep;
  {
    std::size_t fi = 0;
    for (long i = 0; i < dim; ++i) {
      if (fi < q.free_coords().size() && q.free_coords()[fi] == i)
        ++fi;
      else
        keep.push_back(i);
    }
  }
  if (keep.size() < 2)
    throw std::runtime_error("quadratic form has fewer than 2 constrained coordinates");
  Eigen::MatrixXcd red(keep.size(), keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b)
      red(a, b) = g(keep[a], keep[b]);
  EigPair pair = smallest_eigpair(red, dense_cap);
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(dim);
  for (std::size_t a = 0; a < keep.size(); ++a) full(keep[a]) = pair.y(a);
  pair.y = full * (std::sqrt(static_cast<double>(dim)) / full.norm());
  return pair;
}

std::pair<long, long> SupportQuadratic::shape() const {
  long rows = static_cast<long>(r_ + 1) * (n_ - s_) +
              static_cast<long>(r_) * n_ - dropped_;
  return {rows, static_cast<long>(r_ + 1) * n_};
}

double evaluate_cost(const VprDataset& ds, int s, double weight,
                     const Eigen::VectorXcd& y, double eps) {
  check_dataset(ds);
  const int n = ds.n();
  const int r_count = ds.r_count();
  if (y.size() != static_cast<long>(r_count + 1) * n)
    throw std::invalid_argument("phase vector length disagrees with dataset");

  double q_support = 0.0;
  for (int fam = 0; fam <= r_count; ++fam) {
    const Eigen::VectorXd& mag = fam == 0 ? ds.abs_f1 : ds.abs_f2[fam - 1];
    Eigen::VectorXcd block(n);
    for (int j = 0; j < n; ++j) block(j) = mag(j) * y(fam * n + j);
    Eigen::VectorXcd F = dft1_raw(block, -1);
    for (int k = s; k < n; ++k) q_support += std::norm(F(k));
  }

  double q_interf = 0.0;
  for (int r = 0; r < r_count; ++r) {
    for (int j = 0; j < n; ++j) {
      if (!interference_reliable(ds, r, j, eps)) continue;
      std::complex<double> g = interference_ratio(ds, r, j, eps);
      double ag = std::abs(g);
      if (ag < eps) continue;
      g /= ag;
      q_interf += std::norm(y(j) - g * y((r + 1) * n + j));
    }
  }
  return weight * q_support + q_interf;
}

namespace {

EigPair dense_smallest(const Eigen::MatrixXcd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dense eigendecomposition failed");
  EigPair out;
  out.lambda_min = es.eigenvalues()(0);
  out.lambda_second = es.eigenvalues()(1);
  out.y = es.eigenvectors().col(0) *
          std::sqrt(static_cast<double>(gram.rows()));
  return out;
}

// Shift-invert Lanczos for the two smallest eigenvalues of a Hermitian PSD
// matrix: Lanczos on (G + eps I)^{-1} with full reorthogonalization, solves
// through a cached Cholesky factor. Restarts with a fresh random vector when
// the recurrence breaks down (invariant subspace hit).
EigPair lanczos_smallest(const Eigen::MatrixXcd& gram) {
  const long dim = gram.rows();
  double norm_est = gram.cwiseAbs().rowwise().sum().maxCoeff();
  if (norm_est <= 0.0) {
    EigPair out;
    out.y = Eigen::VectorXcd::Zero(dim);
    out.y(0) = std::sqrt(static_cast<double>(dim));
    return out;
  }

  double eps_shift = 1e-14 * norm_est;
  Eigen::LLT<Eigen::MatrixXcd> llt;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Eigen::MatrixXcd shifted = gram;
    shifted.diagonal().array() += eps_shift;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) break;
    eps_shift *= 100.0;
  }
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("shifted Cholesky factorization failed");

  const int max_vecs = std::min<long>(dim, 240);
  Eigen::MatrixXcd v_basis(dim, max_vecs);
  std::vector<double> alpha, beta;  // beta[i] links vector i and i+1

  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_unit = [&](int have) {
    Eigen::VectorXcd v(dim);
    for (long i = 0; i < dim; ++i) v(i) = {gauss(rng), gauss(rng)};
    for (int it = 0; it < 2; ++it)
      for (int c = 0; c < have; ++c)
        v -= v_basis.col(c).dot(v) * v_basis.col(c);
    double nv = v.norm();
    if (nv < 1e-12) throw std::runtime_error("Lanczos restart degenerated");
    return Eigen::VectorXcd(v / nv);
  };

  v_basis.col(0) = random_unit(0);
  int k = 0;  // number of completed Lanczos vectors is k+1
  EigPair out;

  auto try_extract = [&](int count) -> bool {
    // Tridiagonal Ritz problem of the inverse operator.
    Eigen::MatrixXd trid = Eigen::MatrixXd::Zero(count, count);
    for (int i = 0; i < count; ++i) {
      trid(i, i) = alpha[i];
      if (i + 1 < count) {
        trid(i, i + 1) = beta[i];
        trid(i + 1, i) = beta[i];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(trid);
    if (es.info() != Eigen::Success) return false;
    // Largest Ritz values of the inverse map to the smallest of G.
    int i1 = count - 1, i2 = count - 2;
    double theta1 = es.eigenvalues()(i1);
    double theta2 = i2 >= 0 ? es.eigenvalues()(i2) : 0.0;
    if (theta1 <= 0.0 || (i2 >= 0 && theta2 <= 0.0)) return false;

    Eigen::VectorXcd u1 = v_basis.leftCols(count) * es.eigenvectors().col(i1);
    u1.normalize();
    double lam1 = 1.0 / theta1 - eps_shift;
    double res1 = (gram * u1 - lam1 * u1).norm();
    double lam2 = i2 >= 0 ? 1.0 / theta2 - eps_shift : lam1;
    double res2 = res1;
    if (i2 >= 0) {
      Eigen::VectorXcd u2 = v_basis.leftCols(count) * es.eigenvectors().col(i2);
      u2.normalize();
      res2 = (gram * u2 - lam2 * u2).norm();
    }
    if (res1 > 1e-9 * norm_est || res2 > 1e-7 * norm_est) return false;
    out.lambda_min = lam1;
    out.lambda_second = lam2;
    out.y = u1 * std::sqrt(static_cast<double>(dim));
    return true;
  };

  while (true) {
    Eigen::VectorXcd w = llt.solve(v_basis.col(k));
    double a = v_basis.col(k).dot(w).real();
    alpha.push_back(a);
    w -= a * v_basis.col(k);
    if (k > 0) w -= beta[k - 1] * v_basis.col(k - 1);
    for (int it = 0; it < 2; ++it)
      for (int c = 0; c <= k; ++c) w -= v_basis.col(c).dot(w) * v_basis.col(c);
    double b = w.norm();

    int count = k + 1;
    bool converged = count >= 2 && count % 10 == 0 && try_extract(count);
    if (converged) break;
    if (count == max_vecs) {
      if (!try_extract(count))
        throw std::runtime_error("Lanczos failed to converge");
      break;
    }
    if (b < 1e-10) {
      // Invariant subspace; restart the recurrence in the orthogonal
      // complement and sever the coupling.
      beta.push_back(0.0);
      v_basis.col(k + 1) = random_unit(k + 1);
    } else {
      beta.push_back(b);
      v_basis.col(k + 1) = w / b;
    }
    ++k;
  }
  return out;
}

}  // namespace

EigPair smallest_eigpair(const Eigen::MatrixXcd& gram, int dense_cap) {
  if (gram.rows() != gram.cols() || gram.rows() < 2)
    throw std::invalid_argument("gram matrix must be square, dim >= 2");
  EigPair out = gram.rows() <= dense_cap ? dense_smallest(gram)
                                         : lanczos_smallest(gram);
  double norm_est = std::max(gram.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
  Eigen::VectorXcd unit = out.y / out.y.norm();
  double res = (gram * unit - out.lambda_min * unit).norm();
  if (res > 1e-8 * norm_est)
    throw std::runtime_error("eigenpair residual contract violated");
  return out;
}

SupportSweep sweep_support(const VprDataset& ds, const std::vector<int>& s_values,
                           double weight, SupportStrategy strategy,
                           bool solve_at_s_star) {
  if (s_values.empty()) throw std::invalid_argument("empty support sweep");
  SupportSweep sweep;
  for (int s : s_values) {
    SupportQuadratic q(ds, s, weight);
    EigPair pair = solve_quadratic(q);
    sweep.entries.push_back({s, pair.lambda_min, pair.lambda_second});
  }
  auto [idx, flagged] = select_support(sweep.entries, strategy);
  sweep.s_star = sweep.entries[idx].s;
  sweep.flagged = flagged;
  if (solve_at_s_star) {
    SupportQuadratic q(ds, sweep.s_star, weight);
    EigPair pair = solve_quadratic(q);
    PhaseAssignment assign;
    assign.y = pair.y;
    sweep.y_at_s_star = std::move(assign);
  }
  return sweep;
}

std::pair<int, bool> select_support(const std::vector<SweepEntry>& entries,
                                    SupportStrategy strategy) {
  const int count = static_cast<int>(entries.size());
  if (count == 0) throw std::invalid_argument("empty support sweep");
  if (count == 1) return {0, true};

  std::vector<double> ratios(count - 1);
  for (int i = 0; i + 1 < count; ++i) {
    double lo = std::max(entries[i + 1].lambda_min, 1e-300);
    ratios[i] = entries[i].lambda_min / lo;
  }
  double best = *std::max_element(ratios.begin(), ratios.end());
  std::vector<double> sorted = ratios;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  double median = sorted[sorted.size() / 2];
  bool flagged = best < 2.0 * std::max(median, 1e-300);

  if (strategy == SupportStrategy::MaxDropRatio) {
    int arg = static_cast<int>(std::max_element(ratios.begin(), ratios.end()) -
                               ratios.begin());
    return {flagged ? 0 : arg + 1, flagged};
  }
  // FirstDecayOnset: the first step whose drop ratio reaches a tenth of the
  // sweep's best drop.
  for (int i = 0; i + 1 < count; ++i)
    if (ratios[i] >= 0.1 * best) return {flagged ? 0 : i + 1, flagged};
  return {0, true};
}

TimeSeries1D reconstruct(const VprDataset& ds, const PhaseAssignment& assign,
                         bool round_phases) {
  const int n = ds.n();
  if (assign.y.size() < n)
    throw std::invalid_argument("phase vector shorter than signal");
  TimeSeries1D f;
  f.dt = ds.dt;
  f.label = "reconstructed";
  f.values.resize(n);
  for (int j = 0; j < n; ++j) {
    std::complex<double> y = assign.y(j);
    if (round_phases) {
      double a = std::abs(y);
      y = a < 1e-300 ? std::complex<double>(1.0, 0.0) : y / a;
    }
    f.values(j) = ds.abs_f1(j) * y;
  }
  return f;
}

}  // namespace specfree
