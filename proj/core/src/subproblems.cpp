#include "rebalance/subproblems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rebalance/lp.hpp"

namespace rebalance {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Option {
  int vertex;
  double time;
};

// Covering open vertices for one demand, cheapest first (ties: lowest vertex,
// i.e. lowest node then lowest level).
std::vector<Option> covering_options(const Instance& inst, int demand, const Placement& placement) {
  const int H = inst.levels;
  const int i = demand / H;
  const int g = demand % H + 1;
  std::vector<Option> options;
  for (int v = 0; v < static_cast<int>(placement.size()); ++v) {
    if (placement[v] <= 0) continue;
    if (v % H + 1 < g) continue;
    options.push_back({v, inst.travel(i, v / H)});
  }
  std::stable_sort(options.begin(), options.end(),
                   [](const Option& a, const Option& b) { return a.time < b.time; });
  return options;
}

AssignmentResult assign_myopic(const Instance& inst, const Placement& placement) {
  const int H = inst.levels;
  const int vertices = inst.node_count * H;
  AssignmentResult res;
  res.server_vertex.assign(static_cast<size_t>(vertices), -1);
  for (int d = 0; d < vertices; ++d) {
    const int g = d % H + 1;
    int best = -1;
    double best_time = kInf;
    for (int v = 0; v < vertices; ++v) {
      if (placement[static_cast<size_t>(v)] <= 0 || v % H + 1 < g) continue;
      const double t = inst.travel(d / H, v / H);
      if (t < best_time) {
        best_time = t;
        best = v;
      }
    }
    if (best < 0) return res;
    res.server_vertex[static_cast<size_t>(d)] = best;
    res.cost += inst.lambda(d / H, g) * best_time;
  }
  res.feasible = true;
  return res;
}

// Exhaustive search over loaded demands in decreasing arrival-rate order with
// cost and capacity pruning.  Exact; used when the option product is small.
struct ExactSearch {
  const std::vector<double>& load;              // per listed demand
  const std::vector<std::vector<Option>>& options;
  const std::vector<double>& suffix_floor;      // optimistic cost of the tail
  std::vector<double> room;                     // per vertex, remaining capacity
  std::vector<int> choice, best_choice;
  double best_cost = kInf;
  long long expansions = 0;

  void run(size_t depth, double cost) {
    if (++expansions > 40'000'000) throw std::length_error("assignment search budget");
    if (cost + suffix_floor[depth] >= best_cost - 1e-12) return;
    if (depth == options.size()) {
      best_cost = cost;
      best_choice = choice;
      return;
    }
    for (const Option& opt : options[depth]) {
      if (room[static_cast<size_t>(opt.vertex)] < load[depth] - 1e-9) continue;
      room[static_cast<size_t>(opt.vertex)] -= load[depth];
      choice[depth] = opt.vertex;
      run(depth + 1, cost + load[depth] * opt.time);
      room[static_cast<size_t>(opt.vertex)] += load[depth];
    }
  }
};

// Transportation relaxation plus rounding repair for instances too large to
// search exhaustively.  May miss a feasible assignment; callers treat the
// result as a heuristic.
bool assign_by_lp(const std::vector<double>& load, const std::vector<std::vector<Option>>& options,
                  const std::vector<double>& capacity, std::vector<int>& choice) {
  const int demands = static_cast<int>(options.size());
  LpProblem lp;
  std::vector<std::pair<int, int>> pair_of_col;  // (demand, option index)
  std::vector<std::vector<int>> cols_of_vertex(capacity.size());
  for (int d = 0; d < demands; ++d)
    for (int o = 0; o < static_cast<int>(options[static_cast<size_t>(d)].size()); ++o) {
      const Option& opt = options[static_cast<size_t>(d)][static_cast<size_t>(o)];
      cols_of_vertex[static_cast<size_t>(opt.vertex)].push_back(lp.num_cols);
      pair_of_col.emplace_back(d, o);
      lp.objective.push_back(load[static_cast<size_t>(d)] * opt.time);
      lp.col_lb.push_back(0.0);
      lp.col_ub.push_back(1.0);
      ++lp.num_cols;
    }
  lp.row_begin.push_back(0);
  int col = 0;
  for (int d = 0; d < demands; ++d) {
    for (size_t o = 0; o < options[static_cast<size_t>(d)].size(); ++o) {
      lp.col_index.push_back(col++);
      lp.value.push_back(1.0);
    }
    lp.row_begin.push_back(static_cast<int32_t>(lp.col_index.size()));
    lp.row_lb.push_back(1.0);
    lp.row_ub.push_back(1.0);
    ++lp.num_rows;
  }
  for (size_t v = 0; v < capacity.size(); ++v) {
    if (cols_of_vertex[v].empty()) continue;
    for (int c : cols_of_vertex[v]) {
      lp.col_index.push_back(c);
      lp.value.push_back(load[static_cast<size_t>(pair_of_col[static_cast<size_t>(c)].first)]);
    }
    lp.row_begin.push_back(static_cast<int32_t>(lp.col_index.size()));
    lp.row_lb.push_back(-LpProblem::kInf);
    lp.row_ub.push_back(capacity[v]);
    ++lp.num_rows;
  }

  const LpResult sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) return false;

  choice.assign(static_cast<size_t>(demands), -1);
  col = 0;
  std::vector<double> weight(static_cast<size_t>(demands), -1.0);
  for (int d = 0; d < demands; ++d)
    for (size_t o = 0; o < options[static_cast<size_t>(d)].size(); ++o, ++col)
      if (sol.x[static_cast<size_t>(col)] > weight[static_cast<size_t>(d)] + 1e-12) {
        weight[static_cast<size_t>(d)] = sol.x[static_cast<size_t>(col)];
        choice[static_cast<size_t>(d)] = options[static_cast<size_t>(d)][o].vertex;
      }

  std::vector<double> used(capacity.size(), 0.0);
  for (int d = 0; d < demands; ++d) used[static_cast<size_t>(choice[static_cast<size_t>(d)])] += load[static_cast<size_t>(d)];
  for (int pass = 0; pass < 10 * demands + 10; ++pass) {
    int worst = -1;
    for (size_t v = 0; v < capacity.size(); ++v)
      if (used[v] > capacity[v] + 1e-9 && (worst < 0 || used[v] - capacity[v] > used[static_cast<size_t>(worst)] - capacity[static_cast<size_t>(worst)]))
        worst = static_cast<int>(v);
    if (worst < 0) return true;
    int move_d = -1, move_v = -1;
    double move_delta = kInf;
    for (int d = 0; d < demands; ++d) {
      if (choice[static_cast<size_t>(d)] != worst) continue;
      double from_time = 0.0;
      for (const Option& opt : options[static_cast<size_t>(d)])
        if (opt.vertex == worst) from_time = opt.time;
      for (const Option& opt : options[static_cast<size_t>(d)]) {
        if (opt.vertex == worst) continue;
        if (used[static_cast<size_t>(opt.vertex)] + load[static_cast<size_t>(d)] > capacity[static_cast<size_t>(opt.vertex)] + 1e-9) continue;
        const double delta = load[static_cast<size_t>(d)] * (opt.time - from_time);
        if (delta < move_delta) {
          move_delta = delta;
          move_d = d;
          move_v = opt.vertex;
        }
      }
    }
    if (move_d < 0) return false;
    used[static_cast<size_t>(worst)] -= load[static_cast<size_t>(move_d)];
    used[static_cast<size_t>(move_v)] += load[static_cast<size_t>(move_d)];
    choice[static_cast<size_t>(move_d)] = move_v;
  }
  return false;
}

AssignmentResult assign_nonmyopic(const Instance& inst, const IntensityTable& table,
                                  const Placement& placement) {
  const int H = inst.levels;
  const int vertices = inst.node_count * H;
  AssignmentResult res;
  res.server_vertex.assign(static_cast<size_t>(vertices), -1);

  std::vector<double> capacity(static_cast<size_t>(vertices), 0.0);
  for (int v = 0; v < vertices; ++v) {
    const int m = std::min(placement[static_cast<size_t>(v)], table.server_count());
    if (m > 0) capacity[static_cast<size_t>(v)] = inst.mu(v / H, v % H + 1) * table.rho[static_cast<size_t>(m) - 1];
  }

  // Unloaded demands never consume capacity; serve them from the cheapest
  // covering vertex up front.
  std::vector<int> loaded;
  for (int d = 0; d < vertices; ++d) {
    const auto options = covering_options(inst, d, placement);
    if (options.empty()) return res;
    if (inst.lambda(d / H, d % H + 1) > 0.0) {
      loaded.push_back(d);
    } else {
      res.server_vertex[static_cast<size_t>(d)] = options.front().vertex;
    }
  }
  std::stable_sort(loaded.begin(), loaded.end(), [&](int a, int b) {
    return inst.lambda(a / H, a % H + 1) > inst.lambda(b / H, b % H + 1);
  });

  std::vector<double> load;
  std::vector<std::vector<Option>> options;
  double option_product = 1.0;
  for (int d : loaded) {
    load.push_back(inst.lambda(d / H, d % H + 1));
    options.push_back(covering_options(inst, d, placement));
    option_product = std::min(option_product * static_cast<double>(options.back().size()), 1e18);
  }

  std::vector<double> suffix_floor(loaded.size() + 1, 0.0);
  for (size_t k = loaded.size(); k > 0; --k)
    suffix_floor[k - 1] = suffix_floor[k] + load[k - 1] * options[k - 1].front().time;

  std::vector<int> choice;
  if (option_product <= 1e7) {
    ExactSearch search{load, options, suffix_floor, capacity,
                       std::vector<int>(loaded.size(), -1), {}};
    search.run(0, 0.0);
    if (search.best_choice.empty()) return res;
    choice = std::move(search.best_choice);
  } else {
    if (!assign_by_lp(load, options, capacity, choice)) return res;
  }

  for (size_t k = 0; k < loaded.size(); ++k) {
    res.server_vertex[static_cast<size_t>(loaded[k])] = choice[k];
    res.cost += load[k] * inst.travel(loaded[k] / H, choice[k] / H);
  }
  res.feasible = true;
  return res;
}

// Residual edge kinds of the repositioning network.
enum EdgeKind : uint8_t { kSpatial, kLadder, kSource, kSink };

struct Edge {
  int from, to;
  double cost;
  EdgeKind kind;
  int ref;  // arc id / path id / vertex id
  double cap;
  double flow = 0.0;
};

}  // namespace

int placement_total(const Placement& placement) {
  return std::accumulate(placement.begin(), placement.end(), 0);
}

AssignmentResult assign_demand(const Instance& inst, const NodeChargeGraph& graph,
                               const IntensityTable& table, const Placement& placement,
                               Mode mode) {
  if (static_cast<int>(placement.size()) != graph.vertex_count())
    throw std::invalid_argument("placement size does not match the graph");
  return mode == Mode::Myopic ? assign_myopic(inst, placement)
                              : assign_nonmyopic(inst, table, placement);
}

FlowResult min_cost_flow(const Instance& inst, const NodeChargeGraph& graph,
                         const ChargingPathSet& paths, const Placement& placement) {
  const int V = graph.vertex_count();
  FlowResult res;
  res.arc_flow.assign(graph.arcs().size(), 0.0);
  res.path_flow.assign(static_cast<size_t>(paths.path_count()), 0.0);

  std::vector<double> supply(static_cast<size_t>(V), 0.0);
  double total = 0.0;
  for (int v = 0; v < V; ++v) {
    supply[static_cast<size_t>(v)] =
        inst.stock(v / inst.levels, v % inst.levels + 1) - placement[static_cast<size_t>(v)];
    if (supply[static_cast<size_t>(v)] > 0) total += supply[static_cast<size_t>(v)];
  }
  if (std::fabs(std::accumulate(supply.begin(), supply.end(), 0.0)) > 0.5) return res;

  const int src = V, dst = V + 1;
  std::vector<Edge> edges;
  std::vector<double> ladder_used(inst.stations.size(), 0.0);
  std::vector<double> ladder_cap(inst.stations.size(), 0.0);
  for (size_t s = 0; s < inst.stations.size(); ++s) ladder_cap[s] = inst.stations[s].capacity;

  for (size_t a = 0; a < graph.arcs().size(); ++a) {
    const Arc& arc = graph.arcs()[a];
    if (arc.kind != ArcKind::Spatial) continue;
    edges.push_back({arc.from, arc.to, arc.cost, kSpatial, static_cast<int>(a), total});
  }
  for (int p = 0; p < paths.path_count(); ++p) {
    const ChargingPath& path = paths.paths()[static_cast<size_t>(p)];
    const int node = inst.stations[static_cast<size_t>(path.station_index)].node;
    edges.push_back({graph.vertex(node, path.from), graph.vertex(node, path.to),
                     inst.station_charge_cost(path.station_index) * (path.to - path.from), kLadder,
                     p, ladder_cap[static_cast<size_t>(path.station_index)]});
  }
  for (int v = 0; v < V; ++v) {
    if (supply[static_cast<size_t>(v)] > 0.5)
      edges.push_back({src, v, 0.0, kSource, v, supply[static_cast<size_t>(v)]});
    else if (supply[static_cast<size_t>(v)] < -0.5)
      edges.push_back({dst, v, 0.0, kSink, v, -supply[static_cast<size_t>(v)]});
  }
  // Sink edges run v -> dst; stored reversed above for uniform construction.
  for (Edge& e : edges)
    if (e.kind == kSink) std::swap(e.from, e.to);

  const int nodes = V + 2;
  auto ladder_room = [&](const Edge& e) {
    return e.kind != kLadder ||
           ladder_used[static_cast<size_t>(paths.paths()[static_cast<size_t>(e.ref)].station_index)] <
               ladder_cap[static_cast<size_t>(paths.paths()[static_cast<size_t>(e.ref)].station_index)] - 0.5;
  };
  auto push = [&](Edge& e, double amount) {
    e.flow += amount;
    if (e.kind == kLadder)
      ladder_used[static_cast<size_t>(paths.paths()[static_cast<size_t>(e.ref)].station_index)] += amount;
  };

  std::vector<double> dist(static_cast<size_t>(nodes));
  std::vector<int> parent_edge(static_cast<size_t>(nodes));
  std::vector<int8_t> parent_dir(static_cast<size_t>(nodes));

  // Unit augmentations along Bellman-Ford shortest residual paths.
  for (double routed = 0.0; routed < total - 0.5;) {
    std::fill(dist.begin(), dist.end(), kInf);
    dist[static_cast<size_t>(src)] = 0.0;
    for (int round = 0; round < nodes; ++round) {
      bool changed = false;
      for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        const Edge& ed = edges[static_cast<size_t>(e)];
        if (ed.flow < ed.cap - 0.5 && ladder_room(ed) && dist[static_cast<size_t>(ed.from)] < kInf &&
            dist[static_cast<size_t>(ed.from)] + ed.cost < dist[static_cast<size_t>(ed.to)] - 1e-12) {
          dist[static_cast<size_t>(ed.to)] = dist[static_cast<size_t>(ed.from)] + ed.cost;
          parent_edge[static_cast<size_t>(ed.to)] = e;
          parent_dir[static_cast<size_t>(ed.to)] = 1;
          changed = true;
        }
        if (ed.flow > 0.5 && dist[static_cast<size_t>(ed.to)] < kInf &&
            dist[static_cast<size_t>(ed.to)] - ed.cost < dist[static_cast<size_t>(ed.from)] - 1e-12) {
          dist[static_cast<size_t>(ed.from)] = dist[static_cast<size_t>(ed.to)] - ed.cost;
          parent_edge[static_cast<size_t>(ed.from)] = e;
          parent_dir[static_cast<size_t>(ed.from)] = -1;
          changed = true;
        }
      }
      if (!changed) break;
    }
    if (dist[static_cast<size_t>(dst)] >= kInf) return res;  // stock cannot reach the placement
    for (int at = dst; at != src;) {
      Edge& e = edges[static_cast<size_t>(parent_edge[static_cast<size_t>(at)])];
      if (parent_dir[static_cast<size_t>(at)] > 0) {
        push(e, 1.0);
        at = e.from;
      } else {
        push(e, -1.0);
        at = e.to;
      }
    }
    routed += 1.0;
  }

  // Shared ladder capacity can make the augmenting order suboptimal once
  // multi-step paths exist; cancel residual negative cycles to clean up.
  for (int pass = 0; pass < 1000; ++pass) {
    std::fill(dist.begin(), dist.end(), 0.0);
    std::fill(parent_edge.begin(), parent_edge.end(), -1);
    int touched = -1;
    for (int round = 0; round < nodes && touched < 0; ++round) {
      bool changed = false;
      for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        const Edge& ed = edges[static_cast<size_t>(e)];
        if (ed.flow < ed.cap - 0.5 && ladder_room(ed) &&
            dist[static_cast<size_t>(ed.from)] + ed.cost < dist[static_cast<size_t>(ed.to)] - 1e-9) {
          dist[static_cast<size_t>(ed.to)] = dist[static_cast<size_t>(ed.from)] + ed.cost;
          parent_edge[static_cast<size_t>(ed.to)] = e;
          parent_dir[static_cast<size_t>(ed.to)] = 1;
          changed = true;
          if (round == nodes - 1) touched = ed.to;
        }
        if (ed.flow > 0.5 &&
            dist[static_cast<size_t>(ed.to)] - ed.cost < dist[static_cast<size_t>(ed.from)] - 1e-9) {
          dist[static_cast<size_t>(ed.from)] = dist[static_cast<size_t>(ed.to)] - ed.cost;
          parent_edge[static_cast<size_t>(ed.from)] = e;
          parent_dir[static_cast<size_t>(ed.from)] = -1;
          changed = true;
          if (round == nodes - 1) touched = ed.from;
        }
      }
      if (!changed) break;
    }
    if (touched < 0) break;
    // Walk back into the cycle, then cancel one unit around it.  The walk can
    // dead-end on a never-relaxed node when the improvement was numeric noise;
    // stop cancelling in that case.
    std::vector<uint8_t> seen(static_cast<size_t>(nodes), 0);
    int at = touched;
    bool traced = true;
    while (!seen[static_cast<size_t>(at)]) {
      seen[static_cast<size_t>(at)] = 1;
      if (parent_edge[static_cast<size_t>(at)] < 0) {
        traced = false;
        break;
      }
      const Edge& e = edges[static_cast<size_t>(parent_edge[static_cast<size_t>(at)])];
      at = parent_dir[static_cast<size_t>(at)] > 0 ? e.from : e.to;
    }
    if (!traced) break;
    const int start = at;
    do {
      Edge& e = edges[static_cast<size_t>(parent_edge[static_cast<size_t>(at)])];
      if (parent_dir[static_cast<size_t>(at)] > 0) {
        push(e, 1.0);
        at = e.from;
      } else {
        push(e, -1.0);
        at = e.to;
      }
    } while (at != start);
  }

  for (const Edge& e : edges) {
    if (e.flow <= 0.5) continue;
    if (e.kind == kSpatial) {
      res.arc_flow[static_cast<size_t>(e.ref)] = e.flow;
      res.cost += e.cost * e.flow;
    } else if (e.kind == kLadder) {
      res.path_flow[static_cast<size_t>(e.ref)] = e.flow;
      res.cost += e.cost * e.flow;
      const ChargingPath& path = paths.paths()[static_cast<size_t>(e.ref)];
      for (Level g = path.from; g < path.to; ++g)
        res.arc_flow[static_cast<size_t>(graph.charging_arc(path.station_index, g))] += e.flow;
    }
  }
  res.cost *= inst.theta;
  res.feasible = true;
  return res;
}

std::optional<double> placement_cost(const Instance& inst, const NodeChargeGraph& graph,
                                     const ChargingPathSet& paths, const IntensityTable& table,
                                     const Placement& placement, Mode mode) {
  const AssignmentResult assign = assign_demand(inst, graph, table, placement, mode);
  if (!assign.feasible) return std::nullopt;
  const FlowResult flow = min_cost_flow(inst, graph, paths, placement);
  if (!flow.feasible) return std::nullopt;
  return assign.cost + flow.cost;
}

std::vector<double> expand_solution(const MilpModel& model, const Placement& placement,
                                    const AssignmentResult& assign, const FlowResult& flow) {
  const int vertices = static_cast<int>(placement.size());
  if (model.x_count() != vertices * vertices ||
      static_cast<int>(assign.server_vertex.size()) != vertices ||
      static_cast<int>(flow.arc_flow.size()) != model.w_count() ||
      static_cast<int>(flow.path_flow.size()) != model.p_count())
    throw std::invalid_argument("subproblem results do not match the model");
  const int slots = model.y_count() / vertices;

  std::vector<double> x(static_cast<size_t>(model.num_cols()), 0.0);
  for (int d = 0; d < vertices; ++d) {
    const int v = assign.server_vertex[static_cast<size_t>(d)];
    if (v >= 0) x[static_cast<size_t>(d) * vertices + v] = 1.0;
  }
  int base = model.x_count();
  for (int v = 0; v < vertices; ++v)
    for (int m = 0; m < placement[static_cast<size_t>(v)]; ++m)
      x[static_cast<size_t>(base + v * slots + m)] = 1.0;
  base += model.y_count();
  for (int a = 0; a < model.w_count(); ++a) x[static_cast<size_t>(base + a)] = flow.arc_flow[static_cast<size_t>(a)];
  base += model.w_count();
  for (int p = 0; p < model.p_count(); ++p) x[static_cast<size_t>(base + p)] = flow.path_flow[static_cast<size_t>(p)];
  return x;
}

}  // namespace rebalance
