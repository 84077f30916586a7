#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rebalance/lp.hpp"
#include "rebalance/model.hpp"

namespace rebalance {

enum class SolveStatus { Optimal, Infeasible, Unbounded, Limit };

const char* solve_status_name(SolveStatus status);

struct MilpResult {
  SolveStatus status = SolveStatus::Limit;
  double objective = 0.0;
  double bound = -LpProblem::kInf;  // best proven lower bound
  std::vector<double> x;
  long long nodes_explored = 0;
  long long lp_iterations = 0;
  double wall_seconds = 0.0;
};

struct BnbOptions {
  double integrality_tol = 1e-6;
  double gap_tol = 1e-9;           // absolute bound gap at which a node is fathomed
  long long node_limit = 50'000'000;
  double time_limit_seconds = 0.0; // 0 = none
  // Relax the server-slot variables to continuous and verify integrality of
  // the result afterwards; re-solve with integral slots if verification fails.
  bool relax_server_slots = true;
  // Optional warm-start solution; used as the initial incumbent if feasible.
  std::optional<std::vector<double>> incumbent;
  LpOptions lp;
  std::function<void(const std::string&)> log;
};

LpProblem to_lp(const MilpModel& model);

MilpResult solve_milp(const MilpModel& model, const BnbOptions& options = {});

}  // namespace rebalance
