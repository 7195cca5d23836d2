#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

#include "specfree/lattice.hpp"

namespace specfree {

/// Thrown when a requested Hilbert dimension exceeds the dense-diagonalization
/// cap.
class DeskScaleError : public std::runtime_error {
 public:
  explicit DeskScaleError(long long required_dim)
      : std::runtime_error("desk-scale exceeded: dense diagonalization would "
                           "require dimension " +
                           std::to_string(required_dim)),
        required_dim(required_dim) {}
  long long required_dim;
};

/// Dense Hermitian operator on a 2^n qubit space, with a lazily cached
/// eigendecomposition (eigenvalues ascending, eigenvectors as columns).
struct Hamiltonian {
  Eigen::MatrixXcd matrix;
  // affine record from normalize_to_band: scaled = a * original + b
  double band_scale = 1.0;
  double band_shift = 0.0;
  bool degenerate_warning = false;

  Hamiltonian() = default;
  explicit Hamiltonian(Eigen::MatrixXcd m) : matrix(std::move(m)) {}

  int dim() const { return static_cast<int>(matrix.rows()); }

  const Eigen::VectorXd& eigenvalues() const;
  const Eigen::MatrixXcd& eigenvectors() const;

  /// Forces computation of the cached eigendecomposition.
  void ensure_eig() const;

 private:
  mutable std::optional<Eigen::VectorXd> evals_;
  mutable std::optional<Eigen::MatrixXcd> evecs_;
};

inline constexpr int kDefaultDimCap = 1 << 12;

/// Jordan-Wigner qubit image of the Fermi-Hubbard Hamiltonian
/// H = -tau sum_<i,j>,sigma (a^dag a + h.c.) + U sum_v n_up n_down.
/// Qubit 0 is the most significant bit of the basis index; the spin-up
/// mode block precedes spin-down.
Hamiltonian build_fermi_hubbard(const Lattice& lattice,
                                const FermiHubbardParams& params,
                                int dim_cap = kDefaultDimCap);

/// Total number operator sum_{i,sigma} (I - Z)/2: diagonal, eigenvalue =
/// Hamming weight of the basis label.
Hamiltonian build_number_operator(const Lattice& lattice,
                                  int dim_cap = kDefaultDimCap);

/// Affine map H -> a*H + b*I with a > 0 sending E_min to lo and E_max to hi.
/// A degenerate spectrum is shifted to lo with a = 1 and flagged.
Hamiltonian normalize_to_band(const Hamiltonian& h, double lo, double hi);

/// Max-norm of the commutator [a, b].
double commutator_max_norm(const Hamiltonian& a, const Hamiltonian& b);

}  // namespace specfree
