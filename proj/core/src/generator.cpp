#include "rebalance/generator.hpp"

#include <cstdlib>
#include <random>
#include <stdexcept>
#include <utility>

namespace rebalance {

namespace {

// Fixed 53-bit mapping keeps generated instances identical across platforms
// and standard libraries (std::uniform_real_distribution is not portable).
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Instance generate_instance(const GeneratorConfig& config) {
  const int n = config.nodes;
  const int h = config.levels;
  if (n < 1) throw std::invalid_argument("generator: need at least one node");
  if (h < 1) throw std::invalid_argument("generator: need at least one charge level");
  if (config.stations < 1 || config.stations > n)
    throw std::invalid_argument("generator: station count must be in [1, nodes]");
  if (config.fleet < 1 || config.fleet > n * h)
    throw std::invalid_argument("generator: fleet must fit distinct node-charge origins");

  Instance inst;
  inst.node_count = n;
  inst.levels = h;
  inst.charge_per_level = config.charge_per_level;
  inst.theta = config.theta;
  inst.max_servers = config.max_servers;
  inst.big_m = config.big_m;
  inst.charging_arc_cost = {config.charging_arc_cost};
  inst.queue_params.rho = config.rho;

  inst.travel_time.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      inst.travel_time[static_cast<size_t>(i) * n + j] = std::abs(i - j);

  std::vector<std::pair<NodeId, NodeId>> arcs;
  for (int i = 0; i + 1 < n; ++i) {
    arcs.emplace_back(i, i + 1);
    arcs.emplace_back(i + 1, i);
  }
  inst.spatial_arcs = std::move(arcs);

  // Station k of J sits at the midpoint of the k-th of J equal line segments:
  // 1-based node ceil((2k-1) n / (2J)).
  for (int k = 1; k <= config.stations; ++k) {
    const long long num = static_cast<long long>(2 * k - 1) * n;
    const long long den = 2LL * config.stations;
    inst.stations.push_back({static_cast<int>((num + den - 1) / den) - 1, config.station_capacity});
  }

  std::mt19937_64 rng(config.seed);
  inst.arrival_rate.resize(static_cast<size_t>(n) * h);
  for (double& rate : inst.arrival_rate) rate = uniform01(rng);
  inst.service_rate.assign(static_cast<size_t>(n) * h, config.mu_multiplier * n);

  // Scatter the fleet over distinct node-charges: a Fisher-Yates pass over
  // all vertices, keeping the first `fleet` entries.
  std::vector<int> vertices(static_cast<size_t>(n) * h);
  for (int v = 0; v < n * h; ++v) vertices[static_cast<size_t>(v)] = v;
  for (size_t i = 0; i + 1 < vertices.size(); ++i) {
    const size_t j = i + static_cast<size_t>(rng() % (vertices.size() - i));
    std::swap(vertices[i], vertices[j]);
  }
  inst.idle_stock.assign(static_cast<size_t>(n) * h, 0);
  for (int k = 0; k < config.fleet; ++k) inst.idle_stock[static_cast<size_t>(vertices[static_cast<size_t>(k)])] = 1;

  inst.validate();
  return inst;
}

}  // namespace rebalance
