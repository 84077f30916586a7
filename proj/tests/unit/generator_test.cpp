#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rebalance/generator.hpp"
#include "rebalance/graph.hpp"
#include "rebalance/model.hpp"

using namespace rebalance;

namespace {

GeneratorConfig sized(int nodes) {
  GeneratorConfig cfg;
  cfg.nodes = nodes;
  cfg.seed = 1;
  return cfg;
}

}  // namespace

TEST_CASE("the same seed reproduces the instance byte for byte") {
  GeneratorConfig cfg = sized(25);
  cfg.seed = 12345;
  const std::string a = serialize_instance(generate_instance(cfg));
  const std::string b = serialize_instance(generate_instance(cfg));
  CHECK(a == b);
  cfg.seed = 12346;
  CHECK(serialize_instance(generate_instance(cfg)) != a);
}

TEST_CASE("line geometry, stations, and arcs follow the layout rules") {
  const Instance inst = generate_instance(sized(10));
  REQUIRE(inst.node_count == 10);
  REQUIRE(inst.levels == 4);

  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) CHECK(inst.travel(i, j) == doctest::Approx(std::abs(i - j)));

  // Four stations spread over ten nodes.
  std::vector<int> station_nodes;
  for (const Station& s : inst.stations) station_nodes.push_back(s.node);
  CHECK(station_nodes == std::vector<int>{1, 3, 6, 8});

  // Neighbour arcs in both directions, replicated on every level, plus the
  // charging steps: 2(N-1)H spatial + J(H-1) charging.
  REQUIRE(inst.spatial_arcs.has_value());
  CHECK(inst.spatial_arcs->size() == 2 * 9);
  const NodeChargeGraph graph = build_graph(inst);
  CHECK(graph.spatial_arc_count() == 2 * 9 * 4);
  CHECK(graph.charging_arc_count() == 4 * 3);
  CHECK(static_cast<int>(graph.arcs().size()) == 8 * 10 + 4);
}

TEST_CASE("station spacing tracks the node count") {
  CHECK(generate_instance(sized(4)).stations.size() == 4);
  std::vector<int> four;
  for (const Station& s : generate_instance(sized(4)).stations) four.push_back(s.node);
  CHECK(four == std::vector<int>{0, 1, 2, 3});

  std::vector<int> twenty;
  for (const Station& s : generate_instance(sized(20)).stations) twenty.push_back(s.node);
  CHECK(twenty == std::vector<int>{2, 7, 12, 17});
}

TEST_CASE("demand is uniform and the fleet is a distinct scatter") {
  GeneratorConfig cfg = sized(30);
  cfg.fleet = 12;
  cfg.seed = 99;
  const Instance inst = generate_instance(cfg);
  for (double rate : inst.arrival_rate) {
    CHECK(rate >= 0.0);
    CHECK(rate < 1.0);
  }
  // Rates vary (not a constant fill).
  CHECK(*std::max_element(inst.arrival_rate.begin(), inst.arrival_rate.end()) >
        *std::min_element(inst.arrival_rate.begin(), inst.arrival_rate.end()));

  int total = 0;
  for (int stock : inst.idle_stock) {
    CHECK((stock == 0 || stock == 1));
    total += stock;
  }
  CHECK(total == 12);
  CHECK(inst.origins().size() == 12);

  for (double mu : inst.service_rate) CHECK(mu == doctest::Approx(30.0));
}

TEST_CASE("generated model sizes match the closed forms at every scale") {
  // (nodes, variables, constraints) for the default generator shape.
  const struct {
    int nodes;
    long long variables;
    long long constraints;
  } table[] = {
      {10, 1828, 1907},           {50, 41028, 41547},
      {100, 162028, 163097},      {200, 644028, 646197},
      {400, 2568028, 2572397},    {800, 10256028, 10264797},
      {1000, 16020028, 16030997},
  };
  // The fleet (and so the origin count) stays at 10 while the city scales.
  for (const auto& row : table) {
    const long long arcs = 8LL * row.nodes + 4;
    CHECK(count_variables(row.nodes, 4, arcs, 4, 3) == row.variables);
    CHECK(count_constraints(row.nodes, 4, 4, 3, 10, Mode::Myopic) == row.constraints);
  }

  // The smallest row is also verified against a real assembly.
  const Instance inst = generate_instance(sized(10));
  const MilpModel model = assemble_model(inst, Mode::Myopic);
  CHECK(model.num_cols() == 1828);
  CHECK(model.num_rows() == 1907);
}

TEST_CASE("generated instances validate and warn cleanly") {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    GeneratorConfig cfg = sized(15);
    cfg.seed = seed;
    const Instance inst = generate_instance(cfg);
    CHECK_NOTHROW(inst.validate());
    CHECK(inst.warnings().empty());
  }
}

TEST_CASE("invalid shapes are rejected") {
  GeneratorConfig bad = sized(5);
  bad.stations = 6;  // more stations than nodes
  CHECK_THROWS_AS(generate_instance(bad), std::invalid_argument);
  bad = sized(5);
  bad.nodes = 0;
  CHECK_THROWS_AS(generate_instance(bad), std::invalid_argument);
  bad = sized(5);
  bad.fleet = 5 * 4 + 1;  // more vehicles than distinct origins
  CHECK_THROWS_AS(generate_instance(bad), std::invalid_argument);
  bad = sized(5);
  bad.stations = 0;
  CHECK_THROWS_AS(generate_instance(bad), std::invalid_argument);
}
