#pragma once

#include "rebalance/model.hpp"
#include "rebalance/subproblems.hpp"

namespace rebalance {

struct PlacementSearchResult {
  bool feasible = false;
  double objective = 0.0;
  Placement placement;
  std::vector<double> x;  // model-ordered solution vector
};

// Starting placement for local search: the idle stock, with any per-vertex
// excess over max_servers pushed to the nearest vertices with spare room.
Placement initial_placement(const Instance& inst);

// Vertex-substitution local search over placements: repeatedly apply the
// best single-server move until none improves the objective.
PlacementSearchResult greedy_place(const Instance& inst, const MilpModel& model, Mode mode);

struct BruteForceOptions {
  long long enumeration_limit = 10'000'000;
};

// Exhaustive search over all placements; the reference optimum for small
// instances.  Throws std::length_error when the placement count exceeds
// the enumeration limit.
PlacementSearchResult brute_force(const Instance& inst, const MilpModel& model, Mode mode,
                                  const BruteForceOptions& options = {});

}  // namespace rebalance
