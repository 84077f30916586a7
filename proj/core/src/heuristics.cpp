#include "rebalance/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rebalance/queueing.hpp"

namespace rebalance {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Arrival-weighted access cost of nearest-covering assignment, or +inf when
// some demand has no covering open vertex.  Used both as the myopic
// assignment cost and as the cheap screen for non-myopic candidate moves.
double nearest_assignment_cost(const Instance& inst, const std::vector<int>& open) {
  const int H = inst.levels;
  const int vertices = inst.node_count * H;
  double cost = 0.0;
  for (int d = 0; d < vertices; ++d) {
    const int g = d % H + 1;
    double best = kInf;
    for (int v : open) {
      if (v % H + 1 < g) continue;
      best = std::min(best, inst.travel(d / H, v / H));
    }
    if (best == kInf) return kInf;
    cost += inst.lambda(d / H, g) * best;
  }
  return cost;
}

std::vector<int> open_vertices(const Placement& placement) {
  std::vector<int> open;
  for (int v = 0; v < static_cast<int>(placement.size()); ++v)
    if (placement[static_cast<size_t>(v)] > 0) open.push_back(v);
  return open;
}

struct Context {
  const Instance& inst;
  NodeChargeGraph graph;
  ChargingPathSet paths;
  IntensityTable table;
  Mode mode;

  double full_cost(const Placement& placement) const {
    const auto cost = placement_cost(inst, graph, paths, table, placement, mode);
    return cost ? *cost : kInf;
  }

  PlacementSearchResult finish(const MilpModel& model, const Placement& placement,
                               double objective) const {
    PlacementSearchResult res;
    res.placement = placement;
    if (objective == kInf) return res;
    res.feasible = true;
    res.objective = objective;
    const AssignmentResult assign = assign_demand(inst, graph, table, placement, mode);
    const FlowResult flow = min_cost_flow(inst, graph, paths, placement);
    res.x = expand_solution(model, placement, assign, flow);
    return res;
  }
};

Context make_context(const Instance& inst, Mode mode) {
  return {inst, build_graph(inst), charging_paths(inst),
          make_intensity_table(inst.queue_params, inst.max_servers), mode};
}

}  // namespace

Placement initial_placement(const Instance& inst) {
  const int H = inst.levels;
  const int vertices = inst.node_count * H;
  Placement placement(static_cast<size_t>(vertices), 0);
  std::vector<int> excess;
  for (int v = 0; v < vertices; ++v) {
    const int stock = inst.stock(v / H, v % H + 1);
    placement[static_cast<size_t>(v)] = std::min(stock, inst.max_servers);
    for (int k = inst.max_servers; k < stock; ++k) excess.push_back(v);
  }
  for (int v : excess) {
    int best = -1;
    double best_time = kInf;
    for (int w = 0; w < vertices; ++w) {
      if (placement[static_cast<size_t>(w)] >= inst.max_servers) continue;
      const double t = inst.travel(v / H, w / H);
      if (t < best_time) {
        best_time = t;
        best = w;
      }
    }
    if (best < 0) throw std::invalid_argument("idle fleet exceeds total server slots");
    ++placement[static_cast<size_t>(best)];
  }
  return placement;
}

PlacementSearchResult greedy_place(const Instance& inst, const MilpModel& model, Mode mode) {
  const Context ctx = make_context(inst, mode);
  const int vertices = ctx.graph.vertex_count();

  Placement current = initial_placement(inst);
  double current_cost = ctx.full_cost(current);

  struct Move {
    double screen;
    int from, to;
  };

  for (int iter = 0; iter < 500; ++iter) {
    std::vector<Move> moves;
    Placement tentative = current;
    for (int v = 0; v < vertices; ++v) {
      if (current[static_cast<size_t>(v)] <= 0) continue;
      --tentative[static_cast<size_t>(v)];
      for (int w = 0; w < vertices; ++w) {
        if (w == v || current[static_cast<size_t>(w)] >= inst.max_servers) continue;
        ++tentative[static_cast<size_t>(w)];
        const double screen = nearest_assignment_cost(inst, open_vertices(tentative));
        if (screen < kInf) moves.push_back({screen, v, w});
        --tentative[static_cast<size_t>(w)];
      }
      ++tentative[static_cast<size_t>(v)];
    }
    std::stable_sort(moves.begin(), moves.end(),
                     [](const Move& a, const Move& b) { return a.screen < b.screen; });

    // Full objectives are expensive (repositioning flow, capacity-aware
    // assignment), so evaluate only the best-screened moves -- but keep
    // going while the incumbent placement itself is infeasible.
    constexpr size_t kFullEvals = 16;
    int best_from = -1, best_to = -1;
    double best_cost = current_cost;
    for (size_t k = 0; k < moves.size(); ++k) {
      if (k >= kFullEvals && current_cost < kInf) break;
      if (k >= kFullEvals && best_cost < kInf) break;
      --tentative[static_cast<size_t>(moves[k].from)];
      ++tentative[static_cast<size_t>(moves[k].to)];
      const double cost = ctx.full_cost(tentative);
      ++tentative[static_cast<size_t>(moves[k].from)];
      --tentative[static_cast<size_t>(moves[k].to)];
      if (cost < best_cost - 1e-9) {
        best_cost = cost;
        best_from = moves[k].from;
        best_to = moves[k].to;
      }
    }
    if (best_from < 0) break;
    --current[static_cast<size_t>(best_from)];
    ++current[static_cast<size_t>(best_to)];
    current_cost = best_cost;
  }

  return ctx.finish(model, current, current_cost);
}

PlacementSearchResult brute_force(const Instance& inst, const MilpModel& model, Mode mode,
                                  const BruteForceOptions& options) {
  const Context ctx = make_context(inst, mode);
  const int vertices = ctx.graph.vertex_count();
  const int fleet = inst.total_vehicles();

  // Count distributions of `fleet` identical servers over `vertices` slots of
  // height max_servers before enumerating any.
  std::vector<double> ways(static_cast<size_t>(fleet) + 1, 0.0);
  ways[0] = 1.0;
  for (int v = 0; v < vertices; ++v) {
    std::vector<double> next(ways.size(), 0.0);
    for (int r = 0; r <= fleet; ++r)
      for (int k = 0; k <= std::min(inst.max_servers, r); ++k) next[static_cast<size_t>(r)] += ways[static_cast<size_t>(r - k)];
    ways = std::move(next);
    if (ways[static_cast<size_t>(fleet)] > static_cast<double>(options.enumeration_limit)) break;
  }
  if (ways[static_cast<size_t>(fleet)] > static_cast<double>(options.enumeration_limit))
    throw std::length_error("placement enumeration exceeds the configured limit");

  Placement placement(static_cast<size_t>(vertices), 0);
  Placement best_placement;
  double best_cost = kInf;
  auto enumerate = [&](auto&& self, int v, int remaining) -> void {
    if (remaining > (vertices - v) * inst.max_servers) return;
    if (v == vertices) {
      if (remaining != 0) return;
      const double cost = ctx.full_cost(placement);
      if (cost < best_cost - 1e-12) {
        best_cost = cost;
        best_placement = placement;
      }
      return;
    }
    const int cap = std::min(inst.max_servers, remaining);
    for (int k = 0; k <= cap; ++k) {
      placement[static_cast<size_t>(v)] = k;
      self(self, v + 1, remaining - k);
    }
    placement[static_cast<size_t>(v)] = 0;
  };
  enumerate(enumerate, 0, fleet);

  if (best_cost == kInf) {
    PlacementSearchResult res;
    res.placement.assign(static_cast<size_t>(vertices), 0);
    return res;
  }
  return ctx.finish(model, best_placement, best_cost);
}

}  // namespace rebalance
