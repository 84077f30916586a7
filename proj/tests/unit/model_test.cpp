#include <cmath>
#include <limits>
#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "rebalance/model.hpp"

using namespace rebalance;

namespace {

std::map<RowFamily, int> family_counts(const MilpModel& model) {
  std::map<RowFamily, int> counts;
  for (const Row& r : model.rows()) ++counts[r.family];
  return counts;
}

}  // namespace

TEST_CASE("two-zone single-level model: exact shape and coefficients") {
  const Instance inst = fixtures::two_node_line(0.5);
  const MilpModel model = assemble_model(inst, Mode::Myopic);

  CHECK(model.num_cols() == 8);   // 4 assignment + 2 slots + 2 arcs
  CHECK(model.num_rows() == 14);  // 2+2 assign, 1 fleet, 4 links, 1+1 imbalance, 2 balance, 1 station
  CHECK(model.x_count() == 4);
  CHECK(model.y_count() == 2);
  CHECK(model.w_count() == 2);
  CHECK(model.p_count() == 0);

  // Assignment objective is arrival-rate-weighted travel time.
  CHECK(model.cols()[model.x_col(0, 1, 0, 1)].objective == 0.0);
  CHECK(model.cols()[model.x_col(0, 1, 1, 1)].objective == 3.0 * 4.0);
  CHECK(model.cols()[model.x_col(1, 1, 0, 1)].objective == 5.0 * 4.0);
  CHECK(model.cols()[model.x_col(1, 1, 1, 1)].objective == 0.0);
  // Slots carry no objective; arc flows carry theta * travel.
  CHECK(model.cols()[model.y_col(0, 1, 1)].objective == 0.0);
  CHECK(model.cols()[model.w_col(0)].objective == 0.5 * 4.0);
  CHECK(model.cols()[model.w_col(1)].objective == 0.5 * 4.0);

  const auto families = family_counts(model);
  CHECK(families.at(RowFamily::Assign) == 2);
  CHECK(families.at(RowFamily::ChargeFeasibility) == 2);
  CHECK(families.count(RowFamily::ServerOrder) == 0);  // single slot
  CHECK(families.at(RowFamily::FleetSize) == 1);
  CHECK(families.at(RowFamily::AssignLink) == 4);
  CHECK(families.at(RowFamily::ImbalancePos) == 1);  // node 1 is the only non-origin
  CHECK(families.at(RowFamily::ImbalanceNeg) == 1);
  CHECK(families.at(RowFamily::FlowBalance) == 2);
  // The station row is emitted even though a single level admits no paths.
  CHECK(families.at(RowFamily::StationCapacity) == 1);
  CHECK(families.count(RowFamily::QueueCapacity) == 0);

  // Non-myopic adds one capacity row per vertex, nothing else.
  const MilpModel nonmyopic = assemble_model(inst, Mode::NonMyopic);
  CHECK(nonmyopic.num_rows() == model.num_rows() + 2);
  CHECK(family_counts(nonmyopic).at(RowFamily::QueueCapacity) == 2);
  CHECK(nonmyopic.num_cols() == model.num_cols());
}

TEST_CASE("charge ladder model: paths, station rows, integrality") {
  const Instance inst = fixtures::charge_ladder();
  const MilpModel model = assemble_model(inst, Mode::Myopic);

  // 16 assignment + 4 slots + 5 arcs (2 spatial per level + 1 charging) + 1 path.
  CHECK(model.num_cols() == 16 + 4 + 5 + 1);
  const auto families = family_counts(model);
  CHECK(families.at(RowFamily::PathLink) == 1);
  CHECK(families.at(RowFamily::StationCapacity) == 1);
  CHECK(families.at(RowFamily::SlotCapacity) == 2);  // one per node and level step

  for (const Column& c : model.cols()) {
    switch (c.kind) {
      case VarKind::Assign:
      case VarKind::Server:
        CHECK(c.integral);
        CHECK(c.lb == 0.0);
        CHECK(c.ub == 1.0);
        break;
      case VarKind::Flow:
        CHECK(c.integral);
        CHECK(c.ub == std::numeric_limits<double>::infinity());
        break;
      case VarKind::Path:
        CHECK_FALSE(c.integral);
        CHECK(c.ub == std::numeric_limits<double>::infinity());
        break;
    }
  }

  // The level-1 demands must not be served from level-1 openings at level 2
  // demands' expense: charge feasibility rows forbid serving (i,2) from h=1.
  for (const Row& r : model.rows()) {
    if (r.family != RowFamily::ChargeFeasibility) continue;
    CHECK(r.sense == RowSense::EQ);
    CHECK(r.rhs == 0.0);
  }
}

TEST_CASE("closed-form counts match assembled models") {
  for (uint64_t seed : {1u, 2u, 3u, 4u, 5u, 6u}) {
    const Instance inst = fixtures::tiny_random(seed);
    const NodeChargeGraph graph = build_graph(inst);
    for (Mode mode : {Mode::Myopic, Mode::NonMyopic}) {
      const MilpModel model = assemble_model(inst, mode);
      CHECK(model.num_cols() ==
            count_variables(inst.node_count, inst.levels, static_cast<long long>(graph.arcs().size()),
                            static_cast<int>(inst.stations.size()), inst.max_servers));
      CHECK(model.num_rows() ==
            count_constraints(inst.node_count, inst.levels, static_cast<int>(inst.stations.size()),
                              inst.max_servers, static_cast<int>(inst.origins().size()), mode));
    }
  }
}

TEST_CASE("row and column names are unique and tagged") {
  const MilpModel model = assemble_model(fixtures::charge_ladder(), Mode::NonMyopic);
  std::map<std::string, int> names;
  for (int r = 0; r < model.num_rows(); ++r) ++names[model.row_name(r)];
  for (const auto& [name, count] : names) {
    CAPTURE(name);
    CHECK(count == 1);
  }
  names.clear();
  for (int c = 0; c < model.num_cols(); ++c) ++names[model.col_name(c)];
  for (const auto& [name, count] : names) {
    CAPTURE(name);
    CHECK(count == 1);
  }
}

TEST_CASE("solution checker accepts a hand-built optimum and flags corruption") {
  const Instance inst = fixtures::two_node_line(0.5);
  const MilpModel model = assemble_model(inst, Mode::Myopic);

  // Serve both demands from node 1; reposition the vehicle 0 -> 1.
  std::vector<double> x(static_cast<size_t>(model.num_cols()), 0.0);
  x[model.x_col(0, 1, 1, 1)] = 1.0;
  x[model.x_col(1, 1, 1, 1)] = 1.0;
  x[model.y_col(1, 1, 1)] = 1.0;
  const int arc01 = model.w_col(0);  // arcs: 0->1 first, then 1->0
  x[arc01] = 1.0;
  CHECK(check_solution(model, x).ok());
  CHECK(model.objective_value(x) == doctest::Approx(3.0 * 4.0 + 0.5 * 4.0));

  std::vector<double> broken = x;
  broken[model.y_col(1, 1, 1)] = 0.0;  // assignment now links to a closed slot
  CHECK_FALSE(check_solution(model, broken).ok());

  broken = x;
  broken[model.x_col(0, 1, 1, 1)] = 0.5;  // fractional binary
  CHECK_FALSE(check_solution(model, broken).ok());

  broken = x;
  broken[arc01] = 0.0;  // balance rows now violated
  CHECK_FALSE(check_solution(model, broken).ok());
}
