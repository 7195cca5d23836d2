#pragma once

#include <utility>
#include <vector>

namespace specfree {

/// Rectangular lattice of fermionic sites, optionally with two spin modes
/// per site. Mode indices run over the spin-up block first, then spin-down.
struct Lattice {
  int rows = 1;
  int cols = 1;
  bool spinful = true;

  int sites() const { return rows * cols; }
  int modes() const { return sites() * (spinful ? 2 : 1); }

  /// Nearest-neighbor site pairs on the rows x cols grid.
  std::vector<std::pair<int, int>> edges() const;
};

struct FermiHubbardParams {
  double tau = 1.0;  // hopping strength
  double u = 4.0;    // on-site interaction
};

}  // namespace specfree
