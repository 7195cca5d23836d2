#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specfree/dsp.hpp"
#include "specfree/hamiltonian.hpp"
#include "specfree/signals.hpp"
#include "specfree/states.hpp"

namespace specfree {

enum class HioInit { RandomPhase, FlatPositive, MagnitudeDft, Oversampled };

struct HioConfig {
  double beta = 0.9;
  int iterations = 5000;
  int restarts = 0;  // extra seeded runs beyond the first
  std::uint64_t seed = 0;
  bool anchor_row0 = true;
  HioInit init = HioInit::RandomPhase;
};

struct HioResult {
  Spectrum2D f_rec;  // real-valued best iterate
  double best_residual = 0.0;
  long best_iteration = 0;  // global index into residual_history
  std::vector<double> residual_history;  // length iterations*(restarts+1)
};

/// Exact phases of f[0,l] = <psi| e^{i z_l H_D} |psi>, classically summed
/// over the diagonal of hd. z_l runs over the centered grid l' dz with
/// modulo storage, matching the 2D signal layout. Unit-modulus entries.
Eigen::VectorXcd classical_anchor_phases(const Hamiltonian& hd,
                                         const QuantumState& psi, double dz,
                                         int m);

/// Initial working spectrum F^1; real and entrywise nonnegative.
/// HioInit::Oversampled is handled inside hio_run, not here: the windowed
/// signal vanishes outside the sampled box, so a preliminary HIO pass on a
/// (2N+1)x(2M+1) grid with exact zero magnitudes in the extension converges
/// globally and its restriction seeds the main loop.
Eigen::MatrixXd init_spectrum(const Eigen::MatrixXd& abs_f,
                              const HioConfig& cfg, std::uint64_t run_index = 0);

/// Fienup hybrid input-output driven by measured magnitudes, realness,
/// positivity and optional row-0 phase anchors. Returns the iterate with the
/// lowest magnitude-mismatch residual across all iterations and restarts.
HioResult hio_run(const Eigen::MatrixXd& abs_f, const HioConfig& cfg,
                  const std::optional<Eigen::VectorXcd>& anchors = std::nullopt,
                  double total_time = 1.0);

/// 1D spectrum from the z = 0 column: DFT over j of idft2(F_rec)[j, 0].
Spectrum1D extract_1d(const Signal2D& f_rec);

std::string residual_history_csv(const std::vector<double>& history);

/// Dense little-endian dump: 8 int64 header (magic, version, N, M,
/// reserved x4) then row-major doubles.
std::vector<std::uint8_t> spectrum2d_binary(const Spectrum2D& s);

}  // namespace specfree
