#pragma once

#include <cstdint>
#include <string>

namespace specfree {

enum class CostModel { Tfim1D, Fh2DSpinless };
enum class Hardware { AllToAll, Line1D, Grid2D };

struct CostQuery {
  CostModel model = CostModel::Tfim1D;
  Hardware hardware = Hardware::AllToAll;
  std::int64_t n = 2;  // qubits (TFIM) or lattice side (FH2D)
  std::int64_t k = 1;  // Trotter layers
  bool use_pr = true;
  // Uses the appendix text value 3(n-2)/2 in place of 3(n-2) for the FH2D
  // controlled-evolution depth.
  bool alternate_ghz_depth = false;
};

struct CostResult {
  std::int64_t cnots = 0;
  std::int64_t depth = 0;
};

/// Closed-form CNOT counts and depths for k Trotter layers, with (use_pr)
/// and without the control-free phase-retrieval circuit style.
/// Valid combinations: TFIM on all-to-all, TFIM on a 1D line, spinless
/// Fermi-Hubbard on a 2D grid.
CostResult trotter_cost(const CostQuery& q);

/// cnots(controlled) / cnots(phase retrieval) at equal (model, hardware, n, k).
double cnot_ratio(const CostQuery& q_pr, const CostQuery& q_ctl);

std::string to_string(CostModel m);
std::string to_string(Hardware h);

}  // namespace specfree
