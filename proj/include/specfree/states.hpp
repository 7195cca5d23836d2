#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace specfree {

/// Normalized state vector on a 2^n qubit space.
struct QuantumState {
  Eigen::VectorXcd amplitudes;
  int dim() const { return static_cast<int>(amplitudes.size()); }
};

/// Standard-basis state for a bitstring, qubit 0 first (= most significant
/// bit of the basis index); "0101" maps to index 5.
QuantumState make_basis_state(const std::string& bits);

QuantumState make_superposition(
    const std::vector<std::pair<std::complex<double>, QuantumState>>& terms);

QuantumState make_uniform_superposition(int n_qubits);

/// Secondary basis states for interference signals: each is obtained from
/// `target` by flipping both bits of `flips_per_state` disjoint
/// unequally-occupied qubit pairs (seeded, uniform). Hamming weight is
/// preserved and all outputs are distinct from the target and each other.
std::vector<std::string> make_secondary_states(const std::string& target,
                                               int r_count,
                                               int flips_per_state,
                                               std::uint64_t seed);

}  // namespace specfree
