#pragma once

#include <cstdint>

#include "rebalance/instance.hpp"

namespace rebalance {

// Synthetic line-city family: nodes on a line with unit spacing, stations
// evenly spread, bidirectional per-level arcs between neighbours, uniform
// arrival rates, and a random distinct scatter of the idle fleet.
struct GeneratorConfig {
  int nodes = 10;
  int levels = 4;
  int stations = 4;
  int station_capacity = 4;
  int fleet = 10;
  int max_servers = 3;
  double theta = 0.2;
  double big_m = 10000.0;
  double charge_per_level = 0.25;
  double mu_multiplier = 1.0;  // service rate at every vertex = multiplier * nodes
  double charging_arc_cost = 1.0;
  std::vector<double> rho = {0.2236, 0.6416, 1.1576};
  uint64_t seed = 0;
};

Instance generate_instance(const GeneratorConfig& config);

}  // namespace rebalance
