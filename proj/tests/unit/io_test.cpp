#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "rebalance/bnb.hpp"
#include "rebalance/graph.hpp"
#include "rebalance/model.hpp"
#include "rebalance/render.hpp"
#include "rebalance/solution_io.hpp"
#include "rebalance/sweep.hpp"

using namespace rebalance;

namespace {

int count_occurrences(const std::string& text, const std::string& needle) {
  int count = 0;
  for (size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++count;
  return count;
}

}  // namespace

TEST_CASE("solution records survive the round trip") {
  const Instance inst = fixtures::two_node_line(0.5);
  const MilpModel model = assemble_model(inst, Mode::Myopic);
  const MilpResult res = solve_milp(model);
  REQUIRE(res.status == SolveStatus::Optimal);

  const SolutionRecord record = make_record(model, res, Mode::Myopic, "exact");
  CHECK(record.mode == "myopic");
  CHECK(record.method == "exact");
  CHECK(record.status == "optimal");
  CHECK(record.objective == doctest::Approx(14.0));
  CHECK_FALSE(record.nonzeros.empty());
  for (const auto& [name, value] : record.nonzeros) {
    CHECK_FALSE(name.empty());
    CHECK(std::abs(value) > 1e-9);
  }

  std::ostringstream out;
  write_solution(out, record);
  std::istringstream in(out.str());
  const SolutionRecord back = read_solution(in);
  CHECK(back.mode == record.mode);
  CHECK(back.method == record.method);
  CHECK(back.status == record.status);
  CHECK(back.objective == doctest::Approx(record.objective));
  CHECK(back.bound == doctest::Approx(record.bound));
  CHECK(back.nodes_explored == record.nodes_explored);
  REQUIRE(back.nonzeros.size() == record.nonzeros.size());
  for (size_t i = 0; i < record.nonzeros.size(); ++i) {
    CHECK(back.nonzeros[i].first == record.nonzeros[i].first);
    CHECK(back.nonzeros[i].second == doctest::Approx(record.nonzeros[i].second));
  }

  // A second serialization of the parsed record is byte identical.
  std::ostringstream again;
  write_solution(again, back);
  CHECK(again.str() == out.str());
}

TEST_CASE("infeasible results serialize without non-finite numbers") {
  const MilpModel model = assemble_model(fixtures::charge_ladder(1.0, 0), Mode::Myopic);
  const MilpResult res = solve_milp(model);
  REQUIRE(res.status == SolveStatus::Infeasible);
  const SolutionRecord record = make_record(model, res, Mode::Myopic, "exact");
  CHECK(record.status == "infeasible");
  std::ostringstream out;
  write_solution(out, record);
  // Non-finite doubles would serialize as null; every numeric field must come
  // back as a finite number.
  const nlohmann::json doc = nlohmann::json::parse(out.str());
  CHECK(std::isfinite(doc.at("objective").get<double>()));
  CHECK(std::isfinite(doc.at("bound").get<double>()));
  CHECK(out.str().find("null") == std::string::npos);
  CHECK(out.str().find("nan") == std::string::npos);
  std::istringstream in(out.str());
  CHECK(read_solution(in).status == "infeasible");
}

TEST_CASE("sweep CSV uses the exact header and status codes") {
  std::vector<SweepPoint> points(3);
  points[0] = {1.0, Mode::Myopic, SolveStatus::Optimal, 12.5, 0.125, 0.0};
  points[1] = {2.0, Mode::NonMyopic, SolveStatus::Infeasible, 0.0, 0.5, 0.0};
  points[2] = {3.0, Mode::Myopic, SolveStatus::Limit, 9.25, 1.0, 0.125};
  const std::string csv = sweep_csv(points);
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "param_value,mode,status,Z,wall_seconds,gap");
  REQUIRE(std::getline(lines, line));
  CHECK(line.substr(0, 2) == "1,");
  CHECK(line.find("myopic") != std::string::npos);
  CHECK(line.find("OPT") != std::string::npos);
  CHECK(line.find("12.5") != std::string::npos);
  REQUIRE(std::getline(lines, line));
  CHECK(line.find("non-myopic") != std::string::npos);
  CHECK(line.find("NF") != std::string::npos);
  REQUIRE(std::getline(lines, line));
  CHECK(line.find("LIM") != std::string::npos);
  CHECK_FALSE(std::getline(lines, line));
}

TEST_CASE("capacity sweeps solve every point in input order") {
  const Instance inst = fixtures::charge_ladder();
  SweepOptions options;
  options.kind = SweepKind::StationCapacity;
  options.values = {0.0, 1.0, 2.0};
  options.mode = Mode::Myopic;
  const std::vector<SweepPoint> points = run_sweep(inst, options);
  REQUIRE(points.size() == 3);
  CHECK(points[0].param_value == doctest::Approx(0.0));
  CHECK(points[0].status == SolveStatus::Infeasible);  // dead station blocks the climb
  CHECK(points[1].status == SolveStatus::Optimal);
  CHECK(points[1].objective == doctest::Approx(5.0));
  CHECK(points[2].status == SolveStatus::Optimal);
  CHECK(points[2].objective == doctest::Approx(5.0));

  // The same sweep on two workers returns identical points.
  SweepOptions parallel = options;
  parallel.threads = 2;
  const std::vector<SweepPoint> again = run_sweep(inst, parallel);
  REQUIRE(again.size() == points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    CHECK(again[i].param_value == points[i].param_value);
    CHECK(again[i].status == points[i].status);
    CHECK(again[i].objective == doctest::Approx(points[i].objective));
  }
}

TEST_CASE("service-rate sweeps override the rates") {
  const Instance inst = fixtures::two_node_line(0.5);
  SweepOptions options;
  options.kind = SweepKind::ServiceRate;
  options.values = {0.1, 100.0};
  options.mode = Mode::NonMyopic;
  const std::vector<SweepPoint> points = run_sweep(inst, options);
  REQUIRE(points.size() == 2);
  CHECK(points[0].status == SolveStatus::Infeasible);  // capacity below demand
  CHECK(points[1].status == SolveStatus::Optimal);
}

TEST_CASE("dot output shows the layered graph") {
  const Instance inst = fixtures::charge_ladder();
  const NodeChargeGraph graph = build_graph(inst);
  const std::string dot = render_dot(inst, graph);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("rank=same") != std::string::npos);
  // One node statement per vertex.
  for (int v = 0; v < graph.vertex_count(); ++v) {
    const NodeCharge info = graph.vertex_info(v);
    char name[32];
    std::snprintf(name, sizeof name, "v%d_%d", info.node, info.level);
    CHECK(dot.find(name) != std::string::npos);
  }
  // Stations are boxed; the bare graph shows every arc with its cost.
  CHECK(dot.find("shape=box") != std::string::npos);
  CHECK(count_occurrences(dot, " -> ") == static_cast<int>(graph.arcs().size()));
}

TEST_CASE("solved renders carry only the arcs with flow") {
  const Instance inst = fixtures::charge_ladder();
  const NodeChargeGraph graph = build_graph(inst);
  const MilpModel model = assemble_model(inst, Mode::Myopic);
  const MilpResult res = solve_milp(model);
  REQUIRE(res.status == SolveStatus::Optimal);

  int flow_arcs = 0;
  for (int a = 0; a < model.w_count(); ++a)
    if (res.x[static_cast<size_t>(model.w_col(a))] > 0.5) ++flow_arcs;
  REQUIRE(flow_arcs == 2);  // the hop and the climb

  const std::string dot = render_dot(inst, graph, &model, &res.x);
  CHECK(count_occurrences(dot, " -> ") == flow_arcs);
  CHECK(dot.find("style=filled") != std::string::npos);   // the opened server
  CHECK(dot.find("style=dashed") != std::string::npos);   // the charging step

  // A stationary optimum renders with no flow arcs at all.
  const Instance flat = fixtures::two_node_line(10.0);
  const NodeChargeGraph flat_graph = build_graph(flat);
  const MilpModel flat_model = assemble_model(flat, Mode::Myopic);
  const MilpResult flat_res = solve_milp(flat_model);
  REQUIRE(flat_res.status == SolveStatus::Optimal);
  const std::string flat_dot = render_dot(flat, flat_graph, &flat_model, &flat_res.x);
  CHECK(count_occurrences(flat_dot, " -> ") == 0);
}

TEST_CASE("file round trip for solutions") {
  const Instance inst = fixtures::two_node_line(0.5);
  const MilpModel model = assemble_model(inst, Mode::Myopic);
  const SolutionRecord record = make_record(model, solve_milp(model), Mode::Myopic, "exact");
  const std::string path = "io_test_solution.json";
  save_solution_file(path, record);
  const SolutionRecord back = load_solution_file(path);
  CHECK(back.objective == doctest::Approx(record.objective));
  CHECK(back.nonzeros.size() == record.nonzeros.size());
  std::remove(path.c_str());
}
