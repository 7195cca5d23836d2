#include "specfree/lattice.hpp"

namespace specfree {

std::vector<std::pair<int, int>> Lattice::edges() const {
  std::vector<std::pair<int, int>> out;
  auto site = [this](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) out.emplace_back(site(r, c), site(r, c + 1));
      if (r + 1 < rows) out.emplace_back(site(r, c), site(r + 1, c));
    }
  }
  return out;
}

}  // namespace specfree
