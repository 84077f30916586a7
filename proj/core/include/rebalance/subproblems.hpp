#pragma once

#include <optional>
#include <vector>

#include "rebalance/graph.hpp"
#include "rebalance/instance.hpp"
#include "rebalance/model.hpp"
#include "rebalance/queueing.hpp"

namespace rebalance {

// Open server slots per node-charge vertex, indexed [j*levels + (h-1)],
// each entry in [0, max_servers]; entries sum to the fleet size.
using Placement = std::vector<int>;

int placement_total(const Placement& placement);

struct AssignmentResult {
  bool feasible = false;
  double cost = 0.0;               // arrival-rate-weighted access time
  std::vector<int> server_vertex;  // per demand vertex, the serving vertex
};

// Assign every demand vertex to a covering open server.  Myopic picks the
// nearest covering server (ties: lowest node, then lowest level); non-myopic
// minimizes total access time subject to the queue capacity rows.
AssignmentResult assign_demand(const Instance& inst, const NodeChargeGraph& graph,
                               const IntensityTable& table, const Placement& placement,
                               Mode mode);

struct FlowResult {
  bool feasible = false;
  double cost = 0.0;               // repositioning cost, already theta-weighted
  std::vector<double> arc_flow;    // per graph arc
  std::vector<double> path_flow;   // per charging path
};

// Cheapest repositioning of the initial idle stock onto the placement,
// respecting station slot capacities on the charging ladders.
FlowResult min_cost_flow(const Instance& inst, const NodeChargeGraph& graph,
                         const ChargingPathSet& paths, const Placement& placement);

// Full objective of a fixed placement (assignment + repositioning), or
// nullopt when either subproblem is infeasible.
std::optional<double> placement_cost(const Instance& inst, const NodeChargeGraph& graph,
                                     const ChargingPathSet& paths, const IntensityTable& table,
                                     const Placement& placement, Mode mode);

// Stitch subproblem results into a model-ordered solution vector.
std::vector<double> expand_solution(const MilpModel& model, const Placement& placement,
                                    const AssignmentResult& assign, const FlowResult& flow);

}  // namespace rebalance
