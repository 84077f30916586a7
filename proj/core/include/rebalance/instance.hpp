#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rebalance/types.hpp"

namespace rebalance {

/// Queueing-reliability parameters: either an explicit intensity table
/// (rho[m-1] for the m-th server) or an (eta, b) pair the table is
/// solved from.
struct QueueParams {
  std::vector<double> rho;       // explicit table, empty if (eta, b) given
  std::optional<double> eta;     // service reliability in (0,1)
  std::optional<int> b;          // queue bound, >= 0

  bool has_explicit_rho() const { return !rho.empty(); }
};

/// One rebalancing problem: zones, travel times, charge discretization,
/// stations, demand/service rates and the idle fleet at interval start.
///
/// Matrices are stored row-major; node-level matrices are N x H with
/// levels 1-based (entry [i*H + (g-1)]).
struct Instance {
  int node_count = 0;
  std::vector<double> travel_time;            // N*N, minutes
  int levels = 1;                             // |H|
  double charge_per_level = 0.25;             // phi
  std::vector<Station> stations;              // J with capacities u_j
  std::vector<double> arrival_rate;           // lambda, N*H, customers/hour
  std::vector<double> service_rate;           // mu, N*H, services/hour
  std::vector<int> idle_stock;                // y, N*H, vehicles
  double theta = 0.2;                         // rebalancing-cost weight
  int max_servers = 3;                        // C
  double big_m = 10000.0;                     // M
  std::vector<double> charging_arc_cost{1.0}; // size 1 (uniform) or |J|
  QueueParams queue_params;
  /// Optional explicit spatial arc list (applied on every level).
  /// Absent means the complete digraph between distinct nodes.
  std::optional<std::vector<std::pair<NodeId, NodeId>>> spatial_arcs;

  double travel(NodeId i, NodeId j) const { return travel_time[static_cast<size_t>(i) * node_count + j]; }
  double lambda(NodeId i, Level g) const { return arrival_rate[static_cast<size_t>(i) * levels + g - 1]; }
  double mu(NodeId i, Level g) const { return service_rate[static_cast<size_t>(i) * levels + g - 1]; }
  int stock(NodeId i, Level g) const { return idle_stock[static_cast<size_t>(i) * levels + g - 1]; }

  /// Total idle vehicles B.
  int total_vehicles() const;
  /// Node-charges with positive idle stock (the origin set).
  std::vector<NodeCharge> origins() const;
  /// Charging cost of one level step at station index s (not node id).
  double station_charge_cost(int station_index) const;
  bool is_station(NodeId node) const;

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
  /// Non-fatal data screens (e.g. demand at charge levels beyond a full
  /// battery). Returns one message per finding.
  std::vector<std::string> warnings() const;
};

/// JSON (de)serialization. Schema documented in README.md.
Instance load_instance(std::istream& in);
Instance load_instance_file(const std::string& path);
std::string serialize_instance(const Instance& inst);
void save_instance_file(const Instance& inst, const std::string& path);

}  // namespace rebalance
