#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>

#include "rebalance/generator.hpp"
#include "rebalance/instance.hpp"

namespace fixtures {

// Two zones, one charge level, one vehicle: the placement trades demand-
// weighted access cost against the theta-weighted repositioning hop.
//   t = [[0,4],[4,0]], lambda = (3,5), stock at node 0.
// Optimal: theta small -> serve from node 1 (Z = 3*4 + theta*4);
//          theta large -> stay at node 0 (Z = 5*4).
inline rebalance::Instance two_node_line(double theta) {
  rebalance::Instance inst;
  inst.node_count = 2;
  inst.travel_time = {0.0, 4.0, 4.0, 0.0};
  inst.levels = 1;
  inst.charge_per_level = 1.0;
  inst.stations = {{0, 1}};
  inst.arrival_rate = {3.0, 5.0};
  inst.service_rate = {100.0, 100.0};
  inst.idle_stock = {1, 0};
  inst.theta = theta;
  inst.max_servers = 1;
  inst.big_m = 100.0;
  inst.queue_params.rho = {0.2236};
  inst.validate();
  return inst;
}

// Two zones, two levels, one station (node 1, one charger): the only vehicle
// starts empty at node 0 and must hop to the station and climb one level to
// cover the level-2 demands.  Optimal placement (1,2), Z = theta * (2 + 3).
inline rebalance::Instance charge_ladder(double theta = 1.0, int station_capacity = 1) {
  rebalance::Instance inst;
  inst.node_count = 2;
  inst.travel_time = {0.0, 2.0, 2.0, 0.0};
  inst.levels = 2;
  inst.charge_per_level = 0.5;
  inst.stations = {{1, station_capacity}};
  inst.arrival_rate = {0.0, 0.0, 0.0, 7.0};  // only (1,2) is loaded
  inst.service_rate = {50.0, 50.0, 50.0, 50.0};
  inst.idle_stock = {1, 0, 0, 0};  // (0,1)
  inst.theta = theta;
  inst.max_servers = 1;
  inst.big_m = 100.0;
  inst.charging_arc_cost = {3.0};
  inst.queue_params.rho = {0.2236};
  inst.validate();
  return inst;
}

// Seeded small random instance for oracle cross-checks.
inline rebalance::Instance tiny_random(uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&rng](int lo, int hi) { return lo + static_cast<int>(rng() % (hi - lo + 1)); };
  rebalance::GeneratorConfig config;
  config.nodes = pick(2, 4);
  config.levels = pick(1, 2);
  config.stations = pick(1, std::min(2, config.nodes));
  config.station_capacity = pick(1, 2);
  config.fleet = pick(1, 2);
  config.max_servers = pick(1, 2);
  config.theta = pick(1, 2) == 1 ? 0.2 : 1.0;
  config.mu_multiplier = std::array{0.25, 1.0, 4.0}[pick(0, 2)];
  config.rho = {0.2236, 0.6416};
  config.seed = rng();
  return rebalance::generate_instance(config);
}

}  // namespace fixtures
