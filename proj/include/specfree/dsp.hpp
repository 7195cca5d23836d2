#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "specfree/signals.hpp"

namespace specfree {

/// F[k] with bin-to-frequency map omega_k = 2*pi*k/T, T = N*dt.
struct Spectrum1D {
  Eigen::VectorXcd values;
  double total_time = 1.0;

  int n() const { return static_cast<int>(values.size()); }
  double omega(int k) const { return 2.0 * M_PI * k / total_time; }
};

/// F[k,m] with omega_k = 2*pi*k/T and eta_m = 2*pi*m/T'.
struct Spectrum2D {
  Eigen::MatrixXcd values;
  double total_time = 1.0;

  int n() const { return static_cast<int>(values.rows()); }
  int m() const { return static_cast<int>(values.cols()); }
  double omega(int k) const { return 2.0 * M_PI * k / total_time; }
  double eta(int mm) const { return 2.0 * M_PI * mm / total_time; }
};

/// Trivial-ambiguity transform: cyclic shift, optional conjugate reflection,
/// global phase. Applied to a candidate as reflect-then-shift-then-phase.
struct AmbiguityTransform {
  int shift_k = 0;
  int shift_m = 0;
  bool conj_reflect = false;
  double global_phase = 0.0;
};

// F[k] = sum_j f[j] e^{-i 2 pi k j / N}; the inverse carries the 1/N.
Spectrum1D dft1(const TimeSeries1D& f);
TimeSeries1D idft1(const Spectrum1D& F);
Eigen::VectorXcd dft1_raw(const Eigen::VectorXcd& f, int sign = -1);

Spectrum2D dft2(const Signal2D& f);
Signal2D idft2(const Spectrum2D& F);
Eigen::MatrixXcd dft2_raw(const Eigen::MatrixXcd& f, int sign);

/// (1/N) sum_k | |a[k]| - |b[k]| |  (2D: normalized by N*M).
double spectrum_l1_error(const Spectrum1D& a, const Spectrum1D& b);
double spectrum_l1_error(const Spectrum2D& a, const Spectrum2D& b);

Spectrum1D apply_transform(const Spectrum1D& s, const AmbiguityTransform& t);
Spectrum2D apply_transform(const Spectrum2D& s, const AmbiguityTransform& t);

/// Searches cyclic shifts x {identity, conjugate reflection} for the
/// transform minimizing spectrum_l1_error against the reference, then fits
/// the global phase in closed form from the overlap.
std::pair<AmbiguityTransform, Spectrum1D> align_ambiguities(
    const Spectrum1D& candidate, const Spectrum1D& reference);
std::pair<AmbiguityTransform, Spectrum2D> align_ambiguities(
    const Spectrum2D& candidate, const Spectrum2D& reference);

/// Shifts the spectrum by a fractional number of bins: the signal is
/// multiplied by a linear phase ramp exp(-2 pi i a j'/N) over the centered
/// sample index j', so integer a reduces to a cyclic shift.
Spectrum1D fractional_shift(const Spectrum1D& s, double a);

/// Integer alignment refined by a continuous sub-bin shift. Window-limited
/// magnitude data is invariant under linear phase ramps with non-integer
/// slope, so recovered spectra can sit a fraction of a bin away from the
/// reference (a constant offset of the frequency axis); this resolves it.
struct ContinuousAlignment {
  AmbiguityTransform transform;
  double fractional_shift = 0.0;  // bins, applied to the candidate first
  Spectrum1D aligned;
  double l1 = 0.0;
};

ContinuousAlignment align_continuous(const Spectrum1D& candidate,
                                     const Spectrum1D& reference);

struct PeakList {
  std::vector<int> bins;
  bool complete = true;    // false when fewer maxima exist than requested
  bool ambiguous = false;  // height ties broken by lowest index
};

/// Greedy local maxima of |F| in descending height with enforced separation;
/// ties break toward the lowest index.
PeakList peak_locations(const Spectrum1D& F, int count, int min_separation);

/// Local maxima of |F| at least rel_height times the global maximum, with
/// enforced cyclic separation; sorted by descending height.
std::vector<int> prominent_peaks(const Spectrum1D& F, double rel_height,
                                 int min_separation);

/// CSV with header "k,omega_k,re,im,abs"; floats as shortest round-trip.
std::string spectrum_to_csv(const Spectrum1D& s);
std::string spectrum_to_csv(const Spectrum2D& s);

std::string format_double(double v);

}  // namespace specfree
