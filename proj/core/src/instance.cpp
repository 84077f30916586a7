#include "rebalance/instance.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace rebalance {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument("instance: " + what); }

template <typename T>
std::vector<T> read_matrix(const Json& value, const char* key, size_t rows, size_t cols) {
  if (!value.is_array() || value.size() != rows)
    fail(std::string(key) + " must be an array of " + std::to_string(rows) + " rows");
  std::vector<T> out;
  out.reserve(rows * cols);
  for (const auto& row : value) {
    if (!row.is_array() || row.size() != cols)
      fail(std::string(key) + " rows must have " + std::to_string(cols) + " entries");
    for (const auto& cell : row) out.push_back(cell.get<T>());
  }
  return out;
}

template <typename T>
Json write_matrix(const std::vector<T>& flat, size_t rows, size_t cols) {
  Json out = Json::array();
  for (size_t r = 0; r < rows; ++r) {
    Json row = Json::array();
    for (size_t c = 0; c < cols; ++c) row.push_back(flat[r * cols + c]);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

int Instance::total_vehicles() const {
  int total = 0;
  for (int y : idle_stock) total += y;
  return total;
}

std::vector<NodeCharge> Instance::origins() const {
  std::vector<NodeCharge> out;
  for (NodeId i = 0; i < node_count; ++i)
    for (Level g = 1; g <= levels; ++g)
      if (stock(i, g) > 0) out.push_back({i, g});
  return out;
}

double Instance::station_charge_cost(int station_index) const {
  if (charging_arc_cost.size() == 1) return charging_arc_cost[0];
  return charging_arc_cost[static_cast<size_t>(station_index)];
}

bool Instance::is_station(NodeId node) const {
  return std::any_of(stations.begin(), stations.end(),
                     [node](const Station& s) { return s.node == node; });
}

void Instance::validate() const {
  if (node_count < 1) fail("node_count must be >= 1");
  const size_t n = static_cast<size_t>(node_count);
  if (travel_time.size() != n * n) fail("travel_time must be node_count x node_count");
  for (double t : travel_time)
    if (t < 0.0) fail("travel times must be nonnegative");
  if (levels < 1) fail("levels must be >= 1");
  if (!(charge_per_level > 0.0 && charge_per_level <= 1.0))
    fail("charge_per_level must be in (0, 1]");

  std::set<NodeId> station_nodes;
  for (const Station& s : stations) {
    if (s.node < 0 || s.node >= node_count) fail("station node out of range");
    if (s.capacity < 0) fail("station capacity must be >= 0");
    if (!station_nodes.insert(s.node).second) fail("duplicate station node");
  }

  const size_t nh = n * static_cast<size_t>(levels);
  if (arrival_rate.size() != nh) fail("arrival_rate must be node_count x levels");
  if (service_rate.size() != nh) fail("service_rate must be node_count x levels");
  if (idle_stock.size() != nh) fail("idle_stock must be node_count x levels");
  for (double v : arrival_rate)
    if (v < 0.0) fail("arrival rates must be nonnegative");
  for (double v : service_rate)
    if (v < 0.0) fail("service rates must be nonnegative");
  for (int v : idle_stock)
    if (v < 0) fail("idle stock must be nonnegative");

  if (theta < 0.0) fail("theta must be >= 0");
  if (max_servers < 1) fail("max_servers must be >= 1");
  if (big_m <= 0.0) fail("big_m must be positive");

  if (charging_arc_cost.size() != 1 && charging_arc_cost.size() != stations.size())
    fail("charging_arc_cost must be a scalar or one value per station");
  for (double c : charging_arc_cost)
    if (c < 0.0) fail("charging arc costs must be nonnegative");

  // A zero fleet is allowed: the model is simply infeasible to solve.
  if (static_cast<long long>(total_vehicles()) >
      static_cast<long long>(nh) * max_servers)
    fail("fleet exceeds total server slot capacity");

  if (queue_params.has_explicit_rho()) {
    if (static_cast<int>(queue_params.rho.size()) < max_servers)
      fail("queue_params.rho needs one entry per server slot");
    for (size_t m = 0; m < queue_params.rho.size(); ++m) {
      if (queue_params.rho[m] <= 0.0) fail("queue_params.rho entries must be positive");
      if (m > 0 && queue_params.rho[m] <= queue_params.rho[m - 1])
        fail("queue_params.rho must be strictly increasing");
    }
  } else {
    if (!queue_params.eta || !queue_params.b) fail("queue_params needs rho or (eta, b)");
    if (!(*queue_params.eta > 0.0 && *queue_params.eta < 1.0))
      fail("queue_params.eta must be in (0, 1)");
    if (*queue_params.b < 0) fail("queue_params.b must be >= 0");
  }

  if (spatial_arcs) {
    std::set<std::pair<NodeId, NodeId>> seen;
    for (const auto& [from, to] : *spatial_arcs) {
      if (from < 0 || from >= node_count || to < 0 || to >= node_count)
        fail("spatial arc endpoint out of range");
      if (from == to) fail("spatial arcs must connect distinct nodes");
      if (!seen.insert({from, to}).second) fail("duplicate spatial arc");
    }
  }
}

std::vector<std::string> Instance::warnings() const {
  std::vector<std::string> out;
  for (NodeId i = 0; i < node_count; ++i)
    for (Level g = 1; g <= levels; ++g)
      if (lambda(i, g) > 0.0 && g * charge_per_level > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "arrival rate " << lambda(i, g) << " at node " << i << " level " << g
           << " requests more charge than a full battery (" << g * charge_per_level << ")";
        out.push_back(os.str());
      }
  for (size_t s = 0; s < stations.size(); ++s)
    if (stations[s].capacity == 0)
      out.push_back("station at node " + std::to_string(stations[s].node) +
                    " has zero capacity; its chargers are unusable");
  return out;
}

Instance load_instance(std::istream& in) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(std::string("instance: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("top level must be an object");

  Instance inst;
  try {
    inst.node_count = doc.at("node_count").get<int>();
    if (inst.node_count < 1) fail("node_count must be >= 1");
    inst.levels = doc.at("levels").get<int>();
    if (inst.levels < 1) fail("levels must be >= 1");
    const size_t n = static_cast<size_t>(inst.node_count);
    const size_t h = static_cast<size_t>(inst.levels);

    inst.travel_time = read_matrix<double>(doc.at("travel_time"), "travel_time", n, n);
    inst.charge_per_level = doc.at("charge_per_level").get<double>();

    inst.stations.clear();
    for (const auto& s : doc.at("stations")) {
      inst.stations.push_back({s.at("node").get<NodeId>(), s.at("capacity").get<int>()});
    }

    inst.arrival_rate = read_matrix<double>(doc.at("arrival_rate"), "arrival_rate", n, h);
    inst.service_rate = read_matrix<double>(doc.at("service_rate"), "service_rate", n, h);
    inst.idle_stock = read_matrix<int>(doc.at("idle_stock"), "idle_stock", n, h);

    inst.theta = doc.at("theta").get<double>();
    inst.max_servers = doc.at("max_servers").get<int>();
    inst.big_m = doc.at("big_m").get<double>();

    const Json& cc = doc.at("charging_arc_cost");
    if (cc.is_array())
      inst.charging_arc_cost = cc.get<std::vector<double>>();
    else
      inst.charging_arc_cost = {cc.get<double>()};

    const Json& qp = doc.at("queue_params");
    inst.queue_params = {};
    if (qp.contains("rho")) {
      inst.queue_params.rho = qp.at("rho").get<std::vector<double>>();
    } else {
      inst.queue_params.eta = qp.at("eta").get<double>();
      inst.queue_params.b = qp.at("b").get<int>();
    }

    if (doc.contains("spatial_arcs")) {
      std::vector<std::pair<NodeId, NodeId>> arcs;
      for (const auto& a : doc.at("spatial_arcs")) {
        if (!a.is_array() || a.size() != 2) fail("spatial_arcs entries must be [from, to]");
        arcs.emplace_back(a[0].get<NodeId>(), a[1].get<NodeId>());
      }
      inst.spatial_arcs = std::move(arcs);
    }
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("instance: ") + e.what());
  }

  inst.validate();
  return inst;
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("instance: cannot open " + path);
  return load_instance(in);
}

std::string serialize_instance(const Instance& inst) {
  const size_t n = static_cast<size_t>(inst.node_count);
  const size_t h = static_cast<size_t>(inst.levels);
  Json doc;
  doc["node_count"] = inst.node_count;
  doc["travel_time"] = write_matrix(inst.travel_time, n, n);
  doc["levels"] = inst.levels;
  doc["charge_per_level"] = inst.charge_per_level;
  Json stations = Json::array();
  for (const Station& s : inst.stations) stations.push_back({{"node", s.node}, {"capacity", s.capacity}});
  doc["stations"] = std::move(stations);
  doc["arrival_rate"] = write_matrix(inst.arrival_rate, n, h);
  doc["service_rate"] = write_matrix(inst.service_rate, n, h);
  doc["idle_stock"] = write_matrix(inst.idle_stock, n, h);
  doc["theta"] = inst.theta;
  doc["max_servers"] = inst.max_servers;
  doc["big_m"] = inst.big_m;
  if (inst.charging_arc_cost.size() == 1)
    doc["charging_arc_cost"] = inst.charging_arc_cost[0];
  else
    doc["charging_arc_cost"] = inst.charging_arc_cost;
  if (inst.queue_params.has_explicit_rho())
    doc["queue_params"] = {{"rho", inst.queue_params.rho}};
  else
    doc["queue_params"] = {{"eta", *inst.queue_params.eta}, {"b", *inst.queue_params.b}};
  if (inst.spatial_arcs) {
    Json arcs = Json::array();
    for (const auto& [from, to] : *inst.spatial_arcs) arcs.push_back({from, to});
    doc["spatial_arcs"] = std::move(arcs);
  }
  return doc.dump(2) + "\n";
}

void save_instance_file(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("instance: cannot write " + path);
  out << serialize_instance(inst);
}

}  // namespace rebalance
