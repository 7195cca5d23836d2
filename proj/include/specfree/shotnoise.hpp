#pragma once

#include <complex>
#include <cstdint>

namespace specfree {

/// Finite-shot measurement model. Streams are addressed by
/// (seed, signal id, sample index), so results do not depend on the order
/// in which samples are drawn.
struct ShotConfig {
  std::uint64_t shots = 1000000;
  std::uint64_t seed = 0;
};

/// Estimates a probability p as M0/M with M0 ~ Binomial(shots, p).
double estimate_abs2(double p, const ShotConfig& cfg,
                     std::uint64_t signal_id = 0, std::uint64_t sample_id = 0);

/// Shot-noise estimate of |f|. The prepared state carries normalization
/// `scale` (1 for direct signals, 2 for interference of orthogonal unit
/// states), so the sampled probability is |f|^2/scale and the estimate is
/// sqrt(scale * estimate_abs2).
double noisy_magnitude(std::complex<double> f_value, double scale,
                       const ShotConfig& cfg, std::uint64_t signal_id = 0,
                       std::uint64_t sample_id = 0);

}  // namespace specfree
