#include "specfree/signals.hpp"

#include <cmath>

namespace specfree {

double window_value(WindowKind kind, double t, double total_time) {
  if (std::abs(t) > total_time / 2.0) return 0.0;
  switch (kind) {
    case WindowKind::Rectangular:
      return 1.0;
    case WindowKind::Triangular:
      return 1.0 - 2.0 * std::abs(t / total_time);
  }
  return 0.0;
}

TimeSeries1D signal_1d(const Hamiltonian& h, const QuantumState& bra,
                       const QuantumState& ket, double dt, int n_samples,
                       const std::string& label) {
  const auto& ev = h.eigenvalues();
  const auto& v = h.eigenvectors();
  Eigen::VectorXcd a = v.adjoint() * bra.amplitudes;
  Eigen::VectorXcd b = v.adjoint() * ket.amplitudes;
  Eigen::VectorXcd c = a.conjugate().cwiseProduct(b);  // <bra|E_i><E_i|ket>

  TimeSeries1D ts;
  ts.dt = dt;
  ts.label = label;
  ts.values.resize(n_samples);
  for (int j = 0; j < n_samples; ++j) {
    std::complex<double> sum = 0.0;
    for (int i = 0; i < ev.size(); ++i)
      sum += c(i) * std::exp(std::complex<double>(0.0, ev(i) * j * dt));
    ts.values(j) = sum;
  }
  return ts;
}

CommonEigenbasis common_eigenbasis(const Hamiltonian& h, const Hamiltonian& hd,
                                   double commute_tol) {
  double hmax = std::max(1.0, h.matrix.cwiseAbs().maxCoeff());
  if (commutator_max_norm(h, hd) > commute_tol * hmax)
    throw std::invalid_argument("common_eigenbasis: operators do not commute");

  const auto& dvals = hd.eigenvalues();
  const auto& dvecs = hd.eigenvectors();
  const int dim = h.dim();
  double group_tol =
      1e-8 * std::max(1.0, std::abs(dvals.maxCoeff() - dvals.minCoeff()));

  CommonEigenbasis out;
  out.values_h.resize(dim);
  out.values_hd.resize(dim);
  out.vectors.resize(dim, dim);

  int start = 0;
  while (start < dim) {
    int end = start + 1;
    while (end < dim && dvals(end) - dvals(start) < group_tol) ++end;
    int g = end - start;
    Eigen::MatrixXcd wg = dvecs.middleCols(start, g);
    // h restricted to the hd eigenspace is still Hermitian; diagonalize it
    // to split the degeneracy.
    Eigen::MatrixXcd block = wg.adjoint() * h.matrix * wg;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block);
    out.vectors.middleCols(start, g) = wg * es.eigenvectors();
    out.values_h.segment(start, g) = es.eigenvalues();
    out.values_hd.segment(start, g).setConstant(dvals(start));
    start = end;
  }
  return out;
}

Signal2D signal_2d(const Hamiltonian& h, const Hamiltonian& hd,
                   const QuantumState& psi, double dt, int n, int m,
                   WindowKind window) {
  if (n % 2 == 0 || m % 2 == 0)
    throw std::invalid_argument("signal_2d requires odd sample counts");

  auto basis = common_eigenbasis(h, hd);
  const int dim = h.dim();

  Eigen::VectorXcd amp = basis.vectors.adjoint() * psi.amplitudes;
  Eigen::VectorXd p = amp.cwiseAbs2();

  // psi must not be an hd eigenstate, otherwise the second axis is trivial.
  double mean = p.dot(basis.values_hd);
  double var = p.dot(basis.values_hd.cwiseAbs2().matrix()) - mean * mean;
  if (var <= 1e-10)
    throw std::invalid_argument(
        "degenerate 2D embedding: psi is an eigenstate of the dummy operator");

  const double total_t = n * dt;
  const double dz = total_t / m;  // T' = T
  const int half_n = (n - 1) / 2;
  const int half_m = (m - 1) / 2;

  // f_hat[j',l'] = sum_i p_i e^{i j' dt E_i} e^{i l' dz E^D_i}; evaluate the
  // half-plane j' >= 0 as a matrix product and mirror the rest.
  Eigen::MatrixXcd u(half_n + 1, dim);
  for (int jp = 0; jp <= half_n; ++jp)
    for (int i = 0; i < dim; ++i)
      u(jp, i) = std::exp(std::complex<double>(0.0, jp * dt * basis.values_h(i)));
  Eigen::MatrixXcd w(m, dim);
  for (int lp = -half_m; lp <= half_m; ++lp)
    for (int i = 0; i < dim; ++i)
      w(lp + half_m, i) =
          std::exp(std::complex<double>(0.0, lp * dz * basis.values_hd(i)));
  Eigen::MatrixXcd upper = u * p.asDiagonal() * w.transpose();

  Signal2D sig;
  sig.dt = dt;
  sig.windowed = window != WindowKind::Rectangular;
  sig.values.resize(n, m);
  for (int jp = 0; jp <= half_n; ++jp) {
    double wj = window_value(window, jp * dt, total_t);
    for (int lp = -half_m; lp <= half_m; ++lp) {
      double wl = window_value(window, lp * dz, total_t);
      std::complex<double> val = wj * wl * upper(jp, lp + half_m);
      int row = (jp % n + n) % n;
      int col = (lp % m + m) % m;
      sig.values(row, col) = val;
      if (jp > 0 || lp > 0) {
        int rrow = ((n - jp) % n + n) % n;
        int rcol = ((m - lp) % m + m) % m;
        sig.values(rrow, rcol) = std::conj(val);
      }
    }
  }
  return sig;
}

}  // namespace specfree
