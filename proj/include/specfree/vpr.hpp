#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "specfree/shotnoise.hpp"
#include "specfree/signals.hpp"

namespace specfree {

/// Magnitude measurements for multi-interference vectorial phase retrieval:
/// |f1|, and per secondary signal r the magnitudes of f2^(r), the sum
/// interference f3^(r) = f1 + f2^(r) and the quarter-turn interference
/// f4^(r) = f1 + i f2^(r).
struct VprDataset {
  Eigen::VectorXd abs_f1;
  std::vector<Eigen::VectorXd> abs_f2;
  std::vector<Eigen::VectorXd> abs_f3;
  std::vector<Eigen::VectorXd> abs_f4;
  double dt = 1.0;

  int n() const { return static_cast<int>(abs_f1.size()); }
  int r_count() const { return static_cast<int>(abs_f2.size()); }
};

/// Exact magnitudes from the complex signals.
VprDataset make_dataset(const TimeSeries1D& f1,
                        const std::vector<TimeSeries1D>& f2);

/// Finite-shot magnitudes. `scales3`/`scales4` hold the squared norms of the
/// prepared superpositions |Phi> + |psi_r> and |Phi> + i|psi_r> per secondary
/// signal (both 2 for orthogonal unit states); empty means all 2.
VprDataset make_noisy_dataset(const TimeSeries1D& f1,
                              const std::vector<TimeSeries1D>& f2,
                              const ShotConfig& cfg,
                              const std::vector<double>& scales3 = {},
                              const std::vector<double>& scales4 = {});

struct PhaseAssignment {
  enum class NormKind { Relaxed, Rounded };
  Eigen::VectorXcd y;  // length (R+1)*N, f1 block first
  NormKind norm_kind = NormKind::Relaxed;
};

/// G_r[j], the measurement-accessible ratio between the phases of f1[j] and
/// f2^(r)[j]. Callers normalize to G/|G| in the noisy setting.
std::complex<double> interference_ratio(const VprDataset& ds, int r, int j,
                                        double eps = 1e-12);

/// False when the denominator 2|f1[j]||f2^(r)[j]| is below eps; such rows
/// are dropped from the quadratic form.
bool interference_reliable(const VprDataset& ds, int r, int j,
                           double eps = 1e-12);

/// The quadratic form y^dag A_s^dag A_s y = weight * Q_support + Q_interf.
/// Defined through the cost-function identity; the Gram matrix is assembled
/// directly in O((R+1) N^2).
class SupportQuadratic {
 public:
  SupportQuadratic(const VprDataset& ds, int s, double weight = 1.0,
                   double eps = 1e-12);

  int s() const { return s_; }
  double weight() const { return weight_; }
  int dropped_rows() const { return dropped_; }
  /// Nominal shape of A_s: ((R+1)(N-s) + R*N - dropped) x (R+1)N.
  std::pair<long, long> shape() const;
  const Eigen::MatrixXcd& gram() const { return gram_; }
  /// Coordinates whose A_s column vanishes (magnitude ~0 and interference
  /// row dropped): unconstrained unknowns, excluded from the eigenproblem.
  const std::vector<int>& free_coords() const { return free_; }

 private:
  int n_, r_, s_, dropped_ = 0;
  double weight_;
  Eigen::MatrixXcd gram_;
  std::vector<int> free_;
};

/// Direct evaluation of weight * Q_support(y) + Q_interference(y) via DFTs;
/// the reference the Gram matrix is tested against.
double evaluate_cost(const VprDataset& ds, int s, double weight,
                     const Eigen::VectorXcd& y, double eps = 1e-12);

struct EigPair {
  double lambda_min = 0.0;
  double lambda_second = 0.0;
  Eigen::VectorXcd y;  // 2-norm sqrt(dim)
};

/// Two smallest eigenvalues and the minimizing vector of a Hermitian PSD
/// matrix. Dense eigendecomposition below `dense_cap`, shift-invert Lanczos
/// above; either way the residual contract
/// ||G y - lambda_min y|| <= 1e-8 ||G|| is verified.
EigPair smallest_eigpair(const Eigen::MatrixXcd& gram, int dense_cap = 1024);

/// Smallest eigenpair of the quadratic form restricted to its constrained
/// coordinates; free coordinates re-enter the assignment as zeros (their
/// magnitudes vanish, so the reconstruction is unaffected).
EigPair solve_quadratic(const SupportQuadratic& q, int dense_cap = 1024);

struct SweepEntry {
  int s = 0;
  double lambda_min = 0.0;
  double lambda_second = 0.0;
};

enum class SupportStrategy { MaxDropRatio, FirstDecayOnset };

struct SupportSweep {
  std::vector<SweepEntry> entries;
  int s_star = -1;
  bool flagged = false;  // no distinguished drop; first index returned
  std::optional<PhaseAssignment> y_at_s_star;
};

SupportSweep sweep_support(const VprDataset& ds, const std::vector<int>& s_values,
                           double weight = 1.0,
                           SupportStrategy strategy = SupportStrategy::MaxDropRatio,
                           bool solve_at_s_star = true);

/// Heuristic support selection from sweep eigenvalues only.
std::pair<int, bool> select_support(const std::vector<SweepEntry>& entries,
                                    SupportStrategy strategy);

/// {|f1[j]| * y_j}; with round_phases each y_j is divided by its modulus
/// (zero entries become 1).
TimeSeries1D reconstruct(const VprDataset& ds, const PhaseAssignment& y,
                         bool round_phases = false);

}  // namespace specfree
