#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace rebalance {

// A bounded-variable LP in row form: minimize c'x subject to
//   row_lb <= A x <= row_ub,  col_lb <= x <= col_ub.
// Equalities set row_lb == row_ub; one-sided rows use +-inf.
struct LpProblem {
  int num_rows = 0;
  int num_cols = 0;
  std::vector<double> objective;           // size num_cols
  std::vector<double> col_lb, col_ub;      // size num_cols
  std::vector<double> row_lb, row_ub;      // size num_rows
  // CSR by row.
  std::vector<int32_t> row_begin;          // size num_rows + 1
  std::vector<int32_t> col_index;
  std::vector<double> value;

  static constexpr double kInf = std::numeric_limits<double>::infinity();
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* lp_status_name(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;             // primal values, size num_cols
  std::vector<double> row_activity;  // A x, size num_rows
  std::vector<double> dual;          // row duals, size num_rows
  std::vector<double> reduced_cost;  // size num_cols
  long long iterations = 0;
};

struct LpOptions {
  long long iteration_limit = 2'000'000;
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  // After this many consecutive non-improving pivots, switch from Dantzig
  // pricing to Bland's rule until progress resumes.
  int stall_threshold = 1000;
  // Rebuild the basis factorization after this many eta updates.
  int refactor_interval = 128;
  bool scale = true;
  // Progress callback, invoked at every refactorization with a one-line
  // summary (iteration, phase, factor fill).  Leave empty for silence.
  std::function<void(const std::string&)> log;
};

class SimplexSolver {
 public:
  explicit SimplexSolver(LpProblem problem, LpOptions options = {});

  // Solve from scratch (phase 1 + phase 2).
  LpResult solve();

  // Tighten one column's bounds and re-solve warm from the previous basis.
  // Used by branch and bound; falls back to a cold solve if the basis is stale.
  LpResult resolve_with_bounds(const std::vector<double>& col_lb,
                               const std::vector<double>& col_ub);

  const LpProblem& problem() const { return problem_; }

 private:
  struct Impl;
  LpProblem problem_;
  LpOptions options_;
  std::vector<int> basis_;        // persisted between warm solves
  std::vector<uint8_t> nonbasic_at_upper_;
  bool have_basis_ = false;

  LpResult run(const std::vector<double>& col_lb, const std::vector<double>& col_ub,
               bool warm);
};

// One-shot convenience wrapper.
LpResult solve_lp(const LpProblem& problem, LpOptions options = {});

}  // namespace rebalance
