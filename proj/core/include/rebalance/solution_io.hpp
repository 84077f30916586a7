#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rebalance/bnb.hpp"
#include "rebalance/model.hpp"

namespace rebalance {

struct SolutionRecord {
  std::string mode;    // "myopic" | "non-myopic"
  std::string method;  // "exact" | "greedy" | "brute"
  std::string status;  // exact/brute: "optimal" | "infeasible" | "unbounded" | "limit";
                       // greedy: "feasible" | "unknown" (no infeasibility proof)
  double objective = 0.0;
  double bound = 0.0;
  double wall_seconds = 0.0;
  long long nodes_explored = 0;
  std::vector<std::pair<std::string, double>> nonzeros;  // named, model order
};

SolutionRecord make_record(const MilpModel& model, const MilpResult& result,
                           Mode mode, const std::string& method, double nonzero_tol = 1e-9);

void write_solution(std::ostream& out, const SolutionRecord& record);
SolutionRecord read_solution(std::istream& in);

void save_solution_file(const std::string& path, const SolutionRecord& record);
SolutionRecord load_solution_file(const std::string& path);

}  // namespace rebalance
