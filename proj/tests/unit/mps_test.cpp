#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "rebalance/generator.hpp"
#include "rebalance/lp.hpp"
#include "rebalance/model.hpp"
#include "rebalance/mps.hpp"

using namespace rebalance;

namespace {

Instance ten_node_instance() {
  GeneratorConfig cfg;
  cfg.nodes = 10;
  cfg.levels = 4;
  cfg.stations = 4;
  cfg.fleet = 5;
  cfg.seed = 7;
  return generate_instance(cfg);
}

}  // namespace

TEST_CASE("export, parse, and re-export is byte identical") {
  const Instance inst = ten_node_instance();
  for (Mode mode : {Mode::Myopic, Mode::NonMyopic}) {
    const MilpModel model = assemble_model(inst, mode);
    const std::string first = to_mps(model);
    std::istringstream in(first);
    const MpsModel parsed = parse_mps(in);
    const std::string second = to_mps(parsed);
    CHECK(first == second);
    CHECK(parsed.num_rows() == model.num_rows());
    CHECK(parsed.num_cols() == model.num_cols());
  }
}

TEST_CASE("a parsed model matches the source model semantically") {
  const Instance inst = fixtures::two_node_line(0.5);
  const MilpModel model = assemble_model(inst, Mode::Myopic);
  std::istringstream in(to_mps(model));
  const MpsModel parsed = parse_mps(in);

  REQUIRE(parsed.num_cols() == model.num_cols());
  REQUIRE(parsed.num_rows() == model.num_rows());
  for (int c = 0; c < model.num_cols(); ++c) {
    CHECK(parsed.col_names[c] == model.col_name(c));
    CHECK(parsed.objective[c] == doctest::Approx(model.cols()[c].objective));
    CHECK(parsed.col_integral[c] == model.cols()[c].integral);
  }
  for (int r = 0; r < model.num_rows(); ++r) {
    CHECK(parsed.row_names[r] == model.row_name(r));
    const char want = model.rows()[r].sense == RowSense::LE   ? 'L'
                      : model.rows()[r].sense == RowSense::GE ? 'G'
                                                              : 'E';
    CHECK(parsed.row_senses[r] == want);
  }

  std::vector<bool> integral;
  const LpProblem lp = mps_to_lp(parsed, &integral);
  REQUIRE(lp.num_cols == model.num_cols());
  REQUIRE(lp.num_rows == model.num_rows());
  for (int c = 0; c < lp.num_cols; ++c) {
    CHECK(lp.objective[c] == doctest::Approx(model.cols()[c].objective));
    CHECK(lp.col_lb[c] == doctest::Approx(model.cols()[c].lb));
    if (std::isfinite(model.cols()[c].ub)) {
      CHECK(lp.col_ub[c] == doctest::Approx(model.cols()[c].ub));
    }
    CHECK(integral[c] == model.cols()[c].integral);
  }
  // Row activities agree for a probe vector, so the matrices match.
  std::vector<double> probe(model.num_cols());
  for (int c = 0; c < model.num_cols(); ++c) probe[c] = 0.1 * (c % 7) + 0.01 * c;
  std::vector<double> want(model.num_rows(), 0.0);
  for (int r = 0; r < model.num_rows(); ++r) {
    for (int32_t k = model.rows()[r].begin; k < model.rows()[r].end; ++k) {
      want[r] += model.term_val()[k] * probe[model.term_col()[k]];
    }
  }
  std::vector<double> got(lp.num_rows, 0.0);
  for (int r = 0; r < lp.num_rows; ++r) {
    for (int32_t k = lp.row_begin[r]; k < lp.row_begin[r + 1]; ++k) {
      got[r] += lp.value[k] * probe[lp.col_index[k]];
    }
  }
  for (int r = 0; r < lp.num_rows; ++r) CHECK(got[r] == doctest::Approx(want[r]));
}

TEST_CASE("integer markers cover exactly the integral columns") {
  const Instance inst = fixtures::charge_ladder();
  const MilpModel model = assemble_model(inst, Mode::NonMyopic);
  const std::string text = to_mps(model);
  std::istringstream in(text);
  const MpsModel parsed = parse_mps(in);
  int integral = 0;
  for (int c = 0; c < parsed.num_cols(); ++c) {
    if (parsed.col_integral[c]) ++integral;
    // Path variables stay continuous; everything before them is integral.
    const bool is_path = parsed.col_names[c][0] == 'P';
    CHECK(parsed.col_integral[c] == !is_path);
  }
  CHECK(integral == model.x_count() + model.y_count() + model.w_count());
  CHECK(text.find("MARKER") != std::string::npos);
  CHECK(text.find("INTORG") != std::string::npos);
  CHECK(text.find("INTEND") != std::string::npos);
}

TEST_CASE("hand-written free-format input parses") {
  const std::string text =
      "* a comment line\n"
      "NAME          SAMPLE\n"
      "ROWS\n"
      " N  COST\n"
      " L  LIM1\n"
      " G  LIM2\n"
      " E  EQ1\n"
      "COLUMNS\n"
      "    X1  COST  1.0  LIM1  1.0\n"
      "    X1  LIM2  1.0\n"
      "    X2  COST  2.0  LIM1  1.0\n"
      "    X2  EQ1   1.0\n"
      "RHS\n"
      "    RHS  LIM1  4.0  LIM2  1.0\n"
      "    RHS  EQ1   2.0\n"
      "RANGES\n"
      "    RNG  LIM2  5.0\n"
      "BOUNDS\n"
      " UP BND  X1  10.0\n"
      " LO BND  X2  -1.0\n"
      "ENDATA\n";
  std::istringstream in(text);
  const MpsModel parsed = parse_mps(in);
  CHECK(parsed.name == "SAMPLE");
  CHECK(parsed.objective_name == "COST");
  REQUIRE(parsed.num_rows() == 3);
  REQUIRE(parsed.num_cols() == 2);
  CHECK(parsed.row_senses == std::vector<char>{'L', 'G', 'E'});
  CHECK(parsed.objective[0] == doctest::Approx(1.0));
  CHECK(parsed.objective[1] == doctest::Approx(2.0));
  REQUIRE(parsed.ranges.size() == 1);
  CHECK(parsed.ranges[0].first == 1);
  CHECK(parsed.ranges[0].second == doctest::Approx(5.0));

  const LpProblem lp = mps_to_lp(parsed);
  // G row with range 5: 1 <= activity <= 6.
  CHECK(lp.row_lb[1] == doctest::Approx(1.0));
  CHECK(lp.row_ub[1] == doctest::Approx(6.0));
  CHECK(lp.col_ub[0] == doctest::Approx(10.0));
  CHECK(lp.col_lb[1] == doctest::Approx(-1.0));

  const LpResult res = solve_lp(lp);
  REQUIRE(res.status == LpStatus::Optimal);
  // EQ1 pins x2 = 2, the ranged LIM2 pins x1 >= 1, so the optimum is 1 + 2*2.
  CHECK(res.x[1] == doctest::Approx(2.0));
  CHECK(res.objective == doctest::Approx(5.0));
}

TEST_CASE("parse errors carry the offending line number") {
  auto parse_text = [](const std::string& text) {
    std::istringstream in(text);
    return parse_mps(in);
  };
  // Unknown section.
  CHECK_THROWS_AS(parse_text("NAME X\nROWS\n N COST\nGARBAGE\nENDATA\n"), std::runtime_error);
  // Reference to an undeclared row.
  try {
    parse_text(
        "NAME X\n"
        "ROWS\n"
        " N COST\n"
        "COLUMNS\n"
        "    X1  NOSUCH  1.0\n"
        "ENDATA\n");
    FAIL("expected a parse error");
  } catch (const std::runtime_error& err) {
    CHECK(std::string(err.what()).find("line 5") != std::string::npos);
  }
  // Bad numeric field.
  CHECK_THROWS_AS(parse_text("NAME X\nROWS\n N COST\n L R1\nCOLUMNS\n  X1 R1 abc\nENDATA\n"),
                  std::runtime_error);
  // Missing ENDATA is tolerated only when the stream simply ends; truncated
  // two-token entries are not.
  CHECK_THROWS_AS(parse_text("NAME X\nROWS\n N COST\nCOLUMNS\n  X1 COST\n"), std::runtime_error);
}

TEST_CASE("bound styles survive the round trip") {
  MpsModel m;
  m.name = "BNDS";
  m.objective_name = "OBJ";
  m.row_names = {"R1"};
  m.row_senses = {'L'};
  m.col_names = {"A", "B", "C", "D"};
  m.col_integral = {false, false, false, false};
  m.objective = {1.0, 1.0, 1.0, 1.0};
  m.col_begin = {0, 1, 2, 3, 4};
  m.entry_row = {0, 0, 0, 0};
  m.entry_value = {1.0, 1.0, 1.0, 1.0};
  m.rhs = {10.0};
  m.bounds.push_back({MpsBound::Upper, 0, 4.0});
  m.bounds.push_back({MpsBound::Lower, 1, -2.0});
  m.bounds.push_back({MpsBound::Fixed, 2, 3.0});
  m.bounds.push_back({MpsBound::Free, 3, 0.0});

  const std::string text = to_mps(m);
  std::istringstream in(text);
  const MpsModel parsed = parse_mps(in);
  CHECK(to_mps(parsed) == text);

  const LpProblem lp = mps_to_lp(parsed);
  CHECK(lp.col_ub[0] == doctest::Approx(4.0));
  CHECK(lp.col_lb[1] == doctest::Approx(-2.0));
  CHECK(lp.col_lb[2] == doctest::Approx(3.0));
  CHECK(lp.col_ub[2] == doctest::Approx(3.0));
  CHECK(lp.col_lb[3] == -LpProblem::kInf);
  CHECK(lp.col_ub[3] == LpProblem::kInf);
}

TEST_CASE("model exports solve to the same optimum after reparsing") {
  const Instance inst = fixtures::two_node_line(0.5);
  const MilpModel model = assemble_model(inst, Mode::Myopic);
  std::istringstream in(to_mps(model));
  std::vector<bool> integral;
  const LpProblem lp = mps_to_lp(parse_mps(in), &integral);

  LpProblem direct;
  direct.num_cols = model.num_cols();
  for (const Column& col : model.cols()) {
    direct.objective.push_back(col.objective);
    direct.col_lb.push_back(col.lb);
    direct.col_ub.push_back(col.ub);
  }
  direct.row_begin = {0};
  for (const Row& row : model.rows()) {
    for (int32_t k = row.begin; k < row.end; ++k) {
      direct.col_index.push_back(model.term_col()[k]);
      direct.value.push_back(model.term_val()[k]);
    }
    direct.row_begin.push_back(static_cast<int32_t>(direct.col_index.size()));
    direct.row_lb.push_back(row.sense == RowSense::LE ? -LpProblem::kInf : row.rhs);
    direct.row_ub.push_back(row.sense == RowSense::GE ? LpProblem::kInf : row.rhs);
    ++direct.num_rows;
  }
  const LpResult a = solve_lp(lp);
  const LpResult b = solve_lp(direct);
  REQUIRE(a.status == LpStatus::Optimal);
  REQUIRE(b.status == LpStatus::Optimal);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
}
