#include "specfree/states.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

namespace specfree {

QuantumState make_basis_state(const std::string& bits) {
  const int n = static_cast<int>(bits.size());
  if (n == 0 || n > 24) throw std::invalid_argument("bad bitstring length");
  std::uint64_t idx = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("bad bitstring");
    idx = (idx << 1) | (c == '1' ? 1u : 0u);
  }
  QuantumState s;
  s.amplitudes = Eigen::VectorXcd::Zero(std::int64_t{1} << n);
  s.amplitudes(idx) = 1.0;
  return s;
}

QuantumState make_superposition(
    const std::vector<std::pair<std::complex<double>, QuantumState>>& terms) {
  if (terms.empty()) throw std::invalid_argument("empty superposition");
  Eigen::VectorXcd sum =
      Eigen::VectorXcd::Zero(terms.front().second.amplitudes.size());
  for (const auto& [c, st] : terms) {
    if (st.amplitudes.size() != sum.size())
      throw std::invalid_argument("dimension mismatch in superposition");
    sum += c * st.amplitudes;
  }
  double nrm = sum.norm();
  if (nrm < 1e-14)
    throw std::invalid_argument("superposition sums to the zero vector");
  QuantumState out;
  out.amplitudes = sum / nrm;
  return out;
}

QuantumState make_uniform_superposition(int n_qubits) {
  QuantumState s;
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  s.amplitudes =
      Eigen::VectorXcd::Constant(dim, 1.0 / std::sqrt(double(dim)));
  return s;
}

std::vector<std::string> make_secondary_states(const std::string& target,
                                               int r_count,
                                               int flips_per_state,
                                               std::uint64_t seed) {
  const int n = static_cast<int>(target.size());
  if (flips_per_state < 1 || 2 * flips_per_state >= n)
    throw std::invalid_argument("flips_per_state must satisfy 0 < p < n/2");

  std::vector<std::pair<int, int>> unequal;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (target[i] != target[j]) unequal.emplace_back(i, j);
  if (static_cast<int>(unequal.size()) < flips_per_state)
    throw std::invalid_argument("target has too few unequally-occupied pairs");

  std::mt19937_64 rng(seed);
  std::set<std::string> seen;
  std::vector<std::string> out;
  const int max_attempts = 1000 * r_count + 1000;
  for (int attempt = 0; attempt < max_attempts &&
                        static_cast<int>(out.size()) < r_count;
       ++attempt) {
    // Draw disjoint unequal pairs so every flip preserves Hamming weight.
    auto pool = unequal;
    std::shuffle(pool.begin(), pool.end(), rng);
    std::string cand = target;
    std::vector<bool> used(n, false);
    int flipped = 0;
    for (auto [i, j] : pool) {
      if (flipped == flips_per_state) break;
      if (used[i] || used[j]) continue;
      std::swap(cand[i], cand[j]);
      used[i] = used[j] = true;
      ++flipped;
    }
    if (flipped < flips_per_state) continue;
    if (cand == target) continue;
    if (seen.insert(cand).second) out.push_back(cand);
  }
  if (static_cast<int>(out.size()) < r_count)
    throw std::runtime_error(
        "could only generate " + std::to_string(out.size()) + " of " +
        std::to_string(r_count) + " distinct secondary states");
  return out;
}

}  // namespace specfree
