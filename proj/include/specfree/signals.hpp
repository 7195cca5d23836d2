#pragma once

#include <Eigen/Dense>
#include <string>

#include "specfree/hamiltonian.hpp"
#include "specfree/states.hpp"

namespace specfree {

enum class WindowKind { Rectangular, Triangular };

/// Triangular window 1 - 2|t/T| on |t| <= T/2, zero outside.
double window_value(WindowKind kind, double t, double total_time);

/// Complex samples f[j] at t_j = j*dt, j = 0..N-1.
struct TimeSeries1D {
  Eigen::VectorXcd values;
  double dt = 1.0;
  std::string label;

  int n() const { return static_cast<int>(values.size()); }
  double total_time() const { return dt * n(); }
};

/// Windowed centered samples f[j', l'] for j', l' in [-(N-1)/2, (N-1)/2],
/// stored at (j' mod N, l' mod M).
struct Signal2D {
  Eigen::MatrixXcd values;
  double dt = 1.0;
  bool windowed = true;

  int n() const { return static_cast<int>(values.rows()); }
  int m() const { return static_cast<int>(values.cols()); }
  double total_time() const { return dt * n(); }
};

/// f[j] = <bra| exp(i j H dt) |ket>, evaluated in the eigenbasis of h.
TimeSeries1D signal_1d(const Hamiltonian& h, const QuantumState& bra,
                       const QuantumState& ket, double dt, int n_samples,
                       const std::string& label = "");

/// Simultaneous eigendecomposition of a commuting Hermitian pair.
struct CommonEigenbasis {
  Eigen::VectorXd values_h;   // eigenvalues of h
  Eigen::VectorXd values_hd;  // eigenvalues of hd on the same vectors
  Eigen::MatrixXcd vectors;   // columns
};

CommonEigenbasis common_eigenbasis(const Hamiltonian& h, const Hamiltonian& hd,
                                   double commute_tol = 1e-9);

/// Centered, windowed 2D samples of f(t,z) = <psi| e^{itH} e^{izH_D} |psi>.
/// Requires [h, hd] = 0, odd n and m, and psi not an eigenstate of hd.
Signal2D signal_2d(const Hamiltonian& h, const Hamiltonian& hd,
                   const QuantumState& psi, double dt, int n, int m,
                   WindowKind window = WindowKind::Triangular);

}  // namespace specfree
