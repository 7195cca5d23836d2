#include "specfree/hamiltonian.hpp"

#include <bit>
#include <cstdint>

namespace specfree {

namespace {

// Occupation of mode p in basis index b, under the qubit-0-is-MSB convention.
inline bool occupied(std::uint64_t b, int p, int n_modes) {
  return (b >> (n_modes - 1 - p)) & 1u;
}

inline std::uint64_t mode_mask(int p, int n_modes) {
  return std::uint64_t{1} << (n_modes - 1 - p);
}

void check_cap(int n_modes, int dim_cap) {
  if (n_modes >= 63) throw DeskScaleError(-1);
  long long dim = 1LL << n_modes;
  if (dim > dim_cap) throw DeskScaleError(dim);
}

}  // namespace

const Eigen::VectorXd& Hamiltonian::eigenvalues() const {
  ensure_eig();
  return *evals_;
}

const Eigen::MatrixXcd& Hamiltonian::eigenvectors() const {
  ensure_eig();
  return *evecs_;
}

void Hamiltonian::ensure_eig() const {
  if (evals_) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("Hermitian eigendecomposition failed");
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
}

Hamiltonian build_fermi_hubbard(const Lattice& lattice,
                                const FermiHubbardParams& params,
                                int dim_cap) {
  const int n = lattice.modes();
  check_cap(n, dim_cap);
  const std::uint64_t dim = std::uint64_t{1} << n;
  const int sites = lattice.sites();

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);

  // Mode pairs carrying a hopping term: one per edge and spin sector.
  std::vector<std::pair<int, int>> hops;
  for (auto [a, b] : lattice.edges()) {
    hops.emplace_back(a, b);
    if (lattice.spinful) hops.emplace_back(sites + a, sites + b);
  }

  for (std::uint64_t b = 0; b < dim; ++b) {
    // On-site interaction: diagonal, counts doubly occupied sites.
    if (lattice.spinful) {
      int doubly = 0;
      for (int v = 0; v < sites; ++v)
        if (occupied(b, v, n) && occupied(b, sites + v, n)) ++doubly;
      h(b, b) += params.u * doubly;
    }
    // Hopping with the Jordan-Wigner parity string between the two modes.
    for (auto [i, j] : hops) {
      bool oi = occupied(b, i, n), oj = occupied(b, j, n);
      if (oi == oj) continue;
      std::uint64_t b2 = b ^ mode_mask(i, n) ^ mode_mask(j, n);
      int lo = std::min(i, j), hi = std::max(i, j);
      int parity = 0;
      for (int p = lo + 1; p < hi; ++p) parity ^= occupied(b, p, n) ? 1 : 0;
      double sign = parity ? -1.0 : 1.0;
      h(b2, b) += -params.tau * sign;
    }
  }
  return Hamiltonian(std::move(h));
}

Hamiltonian build_number_operator(const Lattice& lattice, int dim_cap) {
  const int n = lattice.modes();
  check_cap(n, dim_cap);
  const std::uint64_t dim = std::uint64_t{1} << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::uint64_t b = 0; b < dim; ++b)
    h(b, b) = static_cast<double>(std::popcount(b));
  return Hamiltonian(std::move(h));
}

Hamiltonian normalize_to_band(const Hamiltonian& h, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("normalize_to_band: hi <= lo");
  const auto& ev = h.eigenvalues();
  double emin = ev.minCoeff(), emax = ev.maxCoeff();
  Hamiltonian out;
  if (emax - emin < 1e-14 * std::max(1.0, std::abs(emax))) {
    out.matrix = h.matrix;
    out.matrix.diagonal().array() += std::complex<double>(lo - emin, 0.0);
    out.band_scale = 1.0;
    out.band_shift = lo - emin;
    out.degenerate_warning = true;
    return out;
  }
  double a = (hi - lo) / (emax - emin);
  double b = lo - a * emin;
  out.matrix = a * h.matrix;
  out.matrix.diagonal().array() += std::complex<double>(b, 0.0);
  out.band_scale = a;
  out.band_shift = b;
  return out;
}

double commutator_max_norm(const Hamiltonian& a, const Hamiltonian& b) {
  Eigen::MatrixXcd c = a.matrix * b.matrix - b.matrix * a.matrix;
  return c.cwiseAbs().maxCoeff();
}

}  // namespace specfree
