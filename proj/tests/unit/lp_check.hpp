#pragma once

#include <cmath>
#include <vector>

#include "doctest.h"
#include "rebalance/lp.hpp"

namespace lp_check {

// Full optimality certificate for a claimed-optimal result: primal
// feasibility within 1e-8, stationarity, sign-correct duals, complementary
// slackness within 1e-6, and a closed duality gap.  A passing check proves
// optimality, so no external reference solver is needed.
inline void verify_optimal(const rebalance::LpProblem& lp, const rebalance::LpResult& res) {
  using rebalance::LpProblem;
  REQUIRE(res.status == rebalance::LpStatus::Optimal);
  REQUIRE(res.x.size() == static_cast<size_t>(lp.num_cols));
  REQUIRE(res.dual.size() == static_cast<size_t>(lp.num_rows));

  double scale = 1.0;
  for (double v : lp.value) scale = std::max(scale, std::fabs(v));

  // Primal feasibility and recomputed activities.
  std::vector<double> activity(static_cast<size_t>(lp.num_rows), 0.0);
  for (int r = 0; r < lp.num_rows; ++r)
    for (int32_t k = lp.row_begin[r]; k < lp.row_begin[r + 1]; ++k)
      activity[r] += lp.value[k] * res.x[lp.col_index[k]];
  for (int r = 0; r < lp.num_rows; ++r) {
    CHECK(std::fabs(activity[r] - res.row_activity[r]) <= 1e-7 * scale);
    CHECK(activity[r] >= lp.row_lb[r] - 1e-8 * scale);
    CHECK(activity[r] <= lp.row_ub[r] + 1e-8 * scale);
  }
  for (int c = 0; c < lp.num_cols; ++c) {
    CHECK(res.x[c] >= lp.col_lb[c] - 1e-8);
    CHECK(res.x[c] <= lp.col_ub[c] + 1e-8);
  }

  // Stationarity: reduced costs are c - A'y.
  std::vector<double> d(lp.objective);
  for (int r = 0; r < lp.num_rows; ++r)
    for (int32_t k = lp.row_begin[r]; k < lp.row_begin[r + 1]; ++k)
      d[lp.col_index[k]] -= lp.value[k] * res.dual[r];
  for (int c = 0; c < lp.num_cols; ++c) CHECK(std::fabs(d[c] - res.reduced_cost[c]) <= 1e-5);

  // Dual feasibility + complementary slackness, mirroring variable bounds.
  const double tol = 1e-6;
  for (int c = 0; c < lp.num_cols; ++c) {
    const bool at_lb = res.x[c] <= lp.col_lb[c] + tol;
    const bool at_ub = res.x[c] >= lp.col_ub[c] - tol;
    if (!at_lb) CHECK(d[c] <= tol * scale);
    if (!at_ub) CHECK(d[c] >= -tol * scale);
  }
  for (int r = 0; r < lp.num_rows; ++r) {
    const bool at_lb = activity[r] <= lp.row_lb[r] + tol * scale;
    const bool at_ub = activity[r] >= lp.row_ub[r] - tol * scale;
    if (res.dual[r] > tol * scale) CHECK(at_lb);
    if (res.dual[r] < -tol * scale) CHECK(at_ub);
  }

  // Duality gap.
  double dual_obj = 0.0;
  for (int r = 0; r < lp.num_rows; ++r) {
    if (std::fabs(res.dual[r]) <= tol * scale) continue;
    dual_obj += res.dual[r] * (res.dual[r] > 0.0 ? lp.row_lb[r] : lp.row_ub[r]);
  }
  for (int c = 0; c < lp.num_cols; ++c) {
    if (std::fabs(d[c]) <= tol * scale) continue;
    dual_obj += d[c] * (d[c] > 0.0 ? lp.col_lb[c] : lp.col_ub[c]);
  }
  CHECK(std::fabs(res.objective - dual_obj) <= 1e-5 * (1.0 + std::fabs(res.objective)));

  double primal = 0.0;
  for (int c = 0; c < lp.num_cols; ++c) primal += lp.objective[c] * res.x[c];
  CHECK(std::fabs(primal - res.objective) <= 1e-7 * (1.0 + std::fabs(primal)));
}

}  // namespace lp_check
