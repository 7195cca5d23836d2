#include "specfree/gatecost.hpp"

#include <stdexcept>

namespace specfree {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return (a + b - 1) / b;
}

std::int64_t ceil_log2(std::int64_t n) {
  std::int64_t r = 0, v = 1;
  while (v < n) {
    v <<= 1;
    ++r;
  }
  return r;
}

}  // namespace

CostResult trotter_cost(const CostQuery& q) {
  if (q.n < 1 || q.k < 1)
    throw std::invalid_argument("n and k must be positive");
  const std::int64_t n = q.n, k = q.k;
  CostResult r;

  if (q.model == CostModel::Tfim1D && q.hardware == Hardware::AllToAll) {
    if (q.use_pr) {
      r.cnots = (2 * n - 2) * k;
      r.depth = 4 * k;
    } else {
      r.cnots = (6 * n - 4) * k;
      r.depth = 2 * ceil_log2(n) + 10 * k;
    }
    return r;
  }
  if (q.model == CostModel::Tfim1D && q.hardware == Hardware::Line1D) {
    if (q.use_pr) {
      r.cnots = (2 * n - 2) * k;
      r.depth = 4 * k;
    } else {
      r.cnots = 6 * (n - 1) + (6 * n - 4) * k;
      r.depth = 6 * ceil_div(n, 2) + 10 * k;
    }
    return r;
  }
  if (q.model == CostModel::Fh2DSpinless && q.hardware == Hardware::Grid2D) {
    if (q.use_pr) {
      r.cnots = 32 * k * n * (n - 1) / 2;
      r.depth = 32 * k;
    } else {
      r.cnots = 48 * k * n * (n - 1) / 2 + 6 * ceil_div((n - 1) * (n - 1), 2);
      r.depth = 48 * k + (q.alternate_ghz_depth ? 3 * (n - 2) / 2
                                                : 3 * (n - 2));
    }
    return r;
  }
  throw std::invalid_argument("unsupported model/hardware combination");
}

double cnot_ratio(const CostQuery& q_pr, const CostQuery& q_ctl) {
  if (q_pr.model != q_ctl.model || q_pr.hardware != q_ctl.hardware ||
      q_pr.n != q_ctl.n || q_pr.k != q_ctl.k)
    throw std::invalid_argument("queries must match in model, hardware, n, k");
  if (!q_pr.use_pr || q_ctl.use_pr)
    throw std::invalid_argument("expected one PR and one controlled query");
  CostResult pr = trotter_cost(q_pr);
  CostResult ctl = trotter_cost(q_ctl);
  if (pr.cnots == 0)
    throw std::invalid_argument("degenerate circuit with zero CNOTs");
  return static_cast<double>(ctl.cnots) / static_cast<double>(pr.cnots);
}

std::string to_string(CostModel m) {
  switch (m) {
    case CostModel::Tfim1D:
      return "tfim_1d";
    case CostModel::Fh2DSpinless:
      return "fh2d_spinless";
  }
  return "?";
}

std::string to_string(Hardware h) {
  switch (h) {
    case Hardware::AllToAll:
      return "all_to_all";
    case Hardware::Line1D:
      return "line_1d";
    case Hardware::Grid2D:
      return "grid_2d";
  }
  return "?";
}

}  // namespace specfree
