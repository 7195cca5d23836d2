#include "specfree/shotnoise.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace specfree {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-style stream key: independent per (seed, signal, sample) address.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

}  // namespace

double estimate_abs2(double p, const ShotConfig& cfg, std::uint64_t signal_id,
                     std::uint64_t sample_id) {
  if (p < -1e-9 || p > 1.0 + 1e-9)
    throw std::invalid_argument(
        "estimate_abs2: probability outside [0,1]; check signal "
        "normalization upstream");
  p = std::clamp(p, 0.0, 1.0);
  if (cfg.shots == 0) throw std::invalid_argument("shots must be positive");
  std::mt19937_64 rng(stream_key(cfg.seed, signal_id, sample_id));
  std::binomial_distribution<std::uint64_t> dist(cfg.shots, p);
  return static_cast<double>(dist(rng)) / static_cast<double>(cfg.shots);
}

double noisy_magnitude(std::complex<double> f_value, double scale,
                       const ShotConfig& cfg, std::uint64_t signal_id,
                       std::uint64_t sample_id) {
  if (scale <= 0.0) throw std::invalid_argument("scale must be positive");
  double p = std::norm(f_value) / scale;
  double est = estimate_abs2(p, cfg, signal_id, sample_id);
  return std::sqrt(scale * est);
}

}  // namespace specfree
