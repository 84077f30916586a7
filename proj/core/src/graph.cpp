#include "rebalance/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace rebalance {

NodeChargeGraph::NodeChargeGraph(int nodes, int levels, std::vector<Arc> arcs)
    : nodes_(nodes), levels_(levels), arcs_(std::move(arcs)) {
  in_arcs_.resize(static_cast<size_t>(vertex_count()));
  out_arcs_.resize(static_cast<size_t>(vertex_count()));
  int station_count = 0;
  for (const Arc& a : arcs_) station_count = std::max(station_count, a.station_index + 1);
  charging_index_.assign(static_cast<size_t>(station_count) * (levels_ > 1 ? levels_ - 1 : 0), -1);
  for (size_t id = 0; id < arcs_.size(); ++id) {
    const Arc& a = arcs_[id];
    out_arcs_[a.from].push_back(static_cast<int>(id));
    in_arcs_[a.to].push_back(static_cast<int>(id));
    if (a.kind == ArcKind::Spatial) {
      ++spatial_count_;
    } else {
      const Level g = vertex_info(a.from).level;
      charging_index_[static_cast<size_t>(a.station_index) * (levels_ - 1) + (g - 1)] =
          static_cast<int>(id);
    }
  }
}

int NodeChargeGraph::charging_arc(int station_index, Level g) const {
  if (levels_ < 2 || g < 1 || g >= levels_) return -1;
  const size_t idx = static_cast<size_t>(station_index) * (levels_ - 1) + (g - 1);
  if (idx >= charging_index_.size()) return -1;
  return charging_index_[idx];
}

NodeChargeGraph build_graph(const Instance& inst) {
  const int n = inst.node_count;
  const int levels = inst.levels;
  std::vector<Arc> arcs;

  std::vector<std::pair<NodeId, NodeId>> spatial;
  if (inst.spatial_arcs) {
    spatial = *inst.spatial_arcs;
  } else {
    spatial.reserve(static_cast<size_t>(n) * (n - 1));
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = 0; j < n; ++j)
        if (i != j) spatial.emplace_back(i, j);
  }

  arcs.reserve(spatial.size() * levels + inst.stations.size() * (levels - 1));
  for (Level g = 1; g <= levels; ++g)
    for (const auto& [i, j] : spatial)
      arcs.push_back({i * levels + (g - 1), j * levels + (g - 1), inst.travel(i, j),
                      ArcKind::Spatial, -1});

  for (size_t s = 0; s < inst.stations.size(); ++s) {
    const NodeId j = inst.stations[s].node;
    const double cost = inst.station_charge_cost(static_cast<int>(s));
    for (Level g = 1; g < levels; ++g)
      arcs.push_back({j * levels + (g - 1), j * levels + g, cost, ArcKind::Charging,
                      static_cast<int>(s)});
  }

  return NodeChargeGraph(n, levels, std::move(arcs));
}

bool covers(NodeCharge server, NodeCharge demand) { return server.level >= demand.level; }

double access_cost(const Instance& inst, NodeCharge demand, NodeCharge server) {
  if (!covers(server, demand))
    throw std::invalid_argument("access_cost: server level below demand level");
  return inst.travel(demand.node, server.node);
}

ChargingPathSet::ChargingPathSet(int levels, int station_count) : levels_(levels) {
  by_station_.resize(static_cast<size_t>(station_count));
  through_.resize(static_cast<size_t>(station_count) * (levels > 1 ? levels - 1 : 0));
  for (int s = 0; s < station_count; ++s)
    for (Level from = 1; from < levels; ++from)
      for (Level to = from + 1; to <= levels; ++to) {
        const int id = static_cast<int>(paths_.size());
        paths_.push_back({s, from, to});
        by_station_[s].push_back(id);
        for (Level g = from; g < to; ++g)
          through_[static_cast<size_t>(s) * (levels - 1) + (g - 1)].push_back(id);
      }
}

const std::vector<int>& ChargingPathSet::paths_through(int station_index, Level g) const {
  return through_[static_cast<size_t>(station_index) * (levels_ - 1) + (g - 1)];
}

int ChargingPathSet::path_id(int station_index, Level from, Level to) const {
  for (int id : by_station_[static_cast<size_t>(station_index)]) {
    const ChargingPath& p = paths_[static_cast<size_t>(id)];
    if (p.from == from && p.to == to) return id;
  }
  return -1;
}

ChargingPathSet charging_paths(const Instance& inst) {
  return ChargingPathSet(inst.levels, static_cast<int>(inst.stations.size()));
}

}  // namespace rebalance
