#pragma once

#include <vector>

#include "rebalance/instance.hpp"
#include "rebalance/types.hpp"

namespace rebalance {

enum class ArcKind { Spatial, Charging };

struct Arc {
  int from = 0;       // vertex id
  int to = 0;         // vertex id
  double cost = 0.0;  // travel cost for spatial arcs, one-level charging cost otherwise
  ArcKind kind = ArcKind::Spatial;
  int station_index = -1;  // index into Instance::stations for charging arcs
};

/// Layered expansion of the zone network: one vertex per (node, level),
/// spatial arcs inside a level, charging arcs climbing one level at
/// station nodes. Immutable once built.
class NodeChargeGraph {
 public:
  NodeChargeGraph(int nodes, int levels, std::vector<Arc> arcs);

  int node_count() const { return nodes_; }
  int level_count() const { return levels_; }
  int vertex_count() const { return nodes_ * levels_; }

  int vertex(NodeId i, Level g) const { return i * levels_ + (g - 1); }
  NodeCharge vertex_info(int v) const { return {v / levels_, v % levels_ + 1}; }

  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<int>& in_arcs(int v) const { return in_arcs_[v]; }
  const std::vector<int>& out_arcs(int v) const { return out_arcs_[v]; }

  int spatial_arc_count() const { return spatial_count_; }
  int charging_arc_count() const { return static_cast<int>(arcs_.size()) - spatial_count_; }
  /// Arc id of the charging step g -> g+1 at station index s, or -1.
  int charging_arc(int station_index, Level g) const;

 private:
  int nodes_;
  int levels_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> in_arcs_;
  std::vector<std::vector<int>> out_arcs_;
  std::vector<int> charging_index_;  // [station_index * (levels-1) + (g-1)]
  int spatial_count_ = 0;
};

/// Builds the node-charge graph. Spatial arcs replicate the instance's
/// arc list (complete digraph by default) on every level with cost
/// t[i][j]; charging arcs exist only at stations.
NodeChargeGraph build_graph(const Instance& inst);

/// A server at (j,h) covers demand (i,g) iff h >= g, any node.
bool covers(NodeCharge server, NodeCharge demand);

/// Spatial access cost t[i][j] of serving demand (i,g) from (j,h).
/// Throws std::invalid_argument if the pair is not covering.
double access_cost(const Instance& inst, NodeCharge demand, NodeCharge server);

/// One charger occupation at a station: a climb from `from` to `to`.
struct ChargingPath {
  int station_index = -1;
  Level from = 1;
  Level to = 2;  // to > from
};

/// Enumeration of the per-station level-span paths matched to charging
/// arcs: path (g,h) traverses the step g' -> g'+1 iff g <= g' < h.
class ChargingPathSet {
 public:
  ChargingPathSet(int levels, int station_count);

  int levels() const { return levels_; }
  int path_count() const { return static_cast<int>(paths_.size()); }
  const std::vector<ChargingPath>& paths() const { return paths_; }
  const std::vector<int>& paths_of_station(int station_index) const { return by_station_[station_index]; }
  /// Paths at `station_index` traversing the charging step g -> g+1.
  const std::vector<int>& paths_through(int station_index, Level g) const;
  int path_id(int station_index, Level from, Level to) const;

 private:
  int levels_;
  std::vector<ChargingPath> paths_;
  std::vector<std::vector<int>> by_station_;
  std::vector<std::vector<int>> through_;  // [station*(levels-1) + (g-1)]
};

ChargingPathSet charging_paths(const Instance& inst);

}  // namespace rebalance
