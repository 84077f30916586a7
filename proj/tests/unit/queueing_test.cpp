#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "rebalance/queueing.hpp"

using namespace rebalance;

TEST_CASE("reference intensity table at 95% reliability, no queue buffer") {
  CHECK(std::fabs(solve_intensity(1, 0, 0.95) - 0.2236) < 1e-4);
  CHECK(std::fabs(solve_intensity(2, 0, 0.95) - 0.6416) < 1e-4);
  CHECK(std::fabs(solve_intensity(3, 0, 0.95) - 1.1576) < 1e-4);
}

TEST_CASE("single-server root has the closed form (1-eta)^(1/(b+2))") {
  for (double eta : {0.5, 0.8, 0.9, 0.95, 0.99})
    for (int b : {0, 1, 2, 5})
      CHECK(std::fabs(solve_intensity(1, b, eta) - std::pow(1.0 - eta, 1.0 / (b + 2))) < 1e-10);
}

TEST_CASE("reliability equation residual is tiny at the returned root") {
  for (int m : {1, 2, 3, 4, 6})
    for (int b : {0, 1, 3})
      for (double eta : {0.5, 0.8, 0.9, 0.95, 0.99}) {
        const double rho = solve_intensity(m, b, eta);
        CHECK(std::fabs(intensity_lhs(rho, m, b) - 1.0 / (1.0 - eta)) < 1e-9);
      }
}

TEST_CASE("hand check of the equation left-hand side") {
  // m=2, b=0: 4/rho^3 + 2/rho^2; equals 1/(1-0.95)=20 near rho=0.6416.
  CHECK(std::fabs(intensity_lhs(0.5, 2, 0) - (4.0 / 0.125 + 2.0 / 0.25)) < 1e-12);
  CHECK(std::fabs(intensity_lhs(0.6416, 2, 0) - 20.0) < 1e-2);
  // m=1, b=0: 1/rho^2.
  CHECK(std::fabs(intensity_lhs(0.25, 1, 0) - 16.0) < 1e-12);
}

TEST_CASE("intensity root is monotone in servers, buffer, and reliability") {
  for (int b : {0, 1, 2})
    for (double eta : {0.8, 0.9, 0.95}) {
      for (int m = 1; m < 6; ++m)
        CHECK(solve_intensity(m, b, eta) < solve_intensity(m + 1, b, eta));
      for (int m : {1, 2, 3}) {
        CHECK(solve_intensity(m, b, eta) < solve_intensity(m, b + 1, eta));
        CHECK(solve_intensity(m, b, eta) > solve_intensity(m, b, eta + 0.004));
      }
    }
}

TEST_CASE("equation rejects out-of-range arguments") {
  CHECK_THROWS_AS(intensity_lhs(0.0, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(intensity_lhs(-1.0, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(intensity_lhs(0.5, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(intensity_lhs(0.5, 1, -1), std::invalid_argument);
  CHECK_THROWS_AS(intensity_lhs(0.5, 21, 0), std::invalid_argument);
  CHECK_THROWS_AS(solve_intensity(1, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_intensity(1, 0, 1.0), std::invalid_argument);
}

TEST_CASE("table construction solves or validates") {
  QueueParams solved;
  solved.eta = 0.95;
  solved.b = 0;
  const IntensityTable table = make_intensity_table(solved, 3);
  REQUIRE(table.server_count() == 3);
  CHECK(std::fabs(table.rho[0] - 0.2236) < 1e-4);
  CHECK(std::fabs(table.rho[2] - 1.1576) < 1e-4);

  QueueParams explicit_rho;
  explicit_rho.rho = {0.2236, 0.6416, 1.1576};
  CHECK(make_intensity_table(explicit_rho, 2).server_count() == 2);

  QueueParams bad;
  bad.rho = {0.5, 0.4};
  CHECK_THROWS_AS(make_intensity_table(bad, 2), std::invalid_argument);
  QueueParams empty;
  CHECK_THROWS_AS(make_intensity_table(empty, 2), std::invalid_argument);
}

TEST_CASE("capacity increments telescope the intensity table") {
  QueueParams params;
  params.rho = {0.2236, 0.6416, 1.1576};
  const IntensityTable table = make_intensity_table(params, 3);
  const auto inc = capacity_increments(table, 50.0);
  REQUIRE(inc.size() == 3);
  CHECK(std::fabs(inc[0] - 11.18) < 1e-2);
  CHECK(std::fabs(inc[1] - 20.90) < 1e-2);
  CHECK(std::fabs(inc[2] - 25.80) < 1e-2);
  CHECK(std::fabs(inc[0] + inc[1] + inc[2] - 50.0 * 1.1576) < 1e-9);
}
