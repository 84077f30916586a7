#pragma once

#include <optional>
#include <vector>

#include "rebalance/instance.hpp"

namespace rebalance {

/// Maximum admissible demand-to-service intensity per server count,
/// for a reliability level eta and queue bound b. rho[m-1] is the
/// coefficient for m servers; strictly increasing in m.
struct IntensityTable {
  std::optional<double> eta;
  std::optional<int> b;
  std::vector<double> rho;

  int server_count() const { return static_cast<int>(rho.size()); }
};

/// Left-hand side of the reliability equation:
///   sum_{k=0}^{m-1} ((m-k) * m! * m^b / k!) * rho^-(m+b+1-k)
/// Strictly decreasing in rho. Throws on rho <= 0, m < 1, b < 0 or
/// m > 20 (integer factorial range).
double intensity_lhs(double rho, int m, int b);

/// Solves intensity_lhs(rho, m, b) = 1/(1-eta) for rho by bracketing
/// and bisection to relative tolerance 1e-15. Any rho <= the returned
/// root keeps the service reliability at least eta.
double solve_intensity(int m, int b, double eta);

/// Builds the table for server counts 1..C, either solving from
/// (eta, b) or validating an explicit rho list.
IntensityTable make_intensity_table(const QueueParams& params, int C);

/// Per-added-server service-rate increments
///   (mu*rho[1], mu*(rho[2]-rho[1]), ..., mu*(rho[C]-rho[C-1]))
/// used as the coefficients of the piecewise-linear queueing capacity.
/// Rejects non-increasing tables.
std::vector<double> capacity_increments(const IntensityTable& table, double mu);

}  // namespace rebalance
