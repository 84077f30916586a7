#include "rebalance/queueing.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rebalance {

namespace {

constexpr int kMaxServers = 20;  // integer factorials stay exact up to here

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

double intensity_lhs(double rho, int m, int b) {
  if (rho <= 0.0) throw std::invalid_argument("intensity_lhs: rho must be positive");
  if (m < 1) throw std::invalid_argument("intensity_lhs: m must be >= 1");
  if (m > kMaxServers) throw std::invalid_argument("intensity_lhs: m > 20 unsupported");
  if (b < 0) throw std::invalid_argument("intensity_lhs: b must be >= 0");

  const double m_fact = factorial(m);
  const double m_pow_b = std::pow(static_cast<double>(m), b);
  double sum = 0.0;
  double k_fact = 1.0;
  for (int k = 0; k < m; ++k) {
    if (k > 0) k_fact *= k;
    const double coef = (m - k) * m_fact * m_pow_b / k_fact;
    sum += coef * std::pow(rho, -(m + b + 1 - k));
  }
  return sum;
}

double solve_intensity(int m, int b, double eta) {
  if (m < 1 || m > kMaxServers) throw std::invalid_argument("solve_intensity: m out of range");
  if (b < 0) throw std::invalid_argument("solve_intensity: b must be >= 0");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("solve_intensity: eta must be in (0,1)");

  const double target = 1.0 / (1.0 - eta);

  // LHS decreases from +inf to 0 on (0, inf), so a bracket always exists.
  double lo = 1e-9;
  double hi = 1.0;
  while (intensity_lhs(hi, m, b) > target) hi *= 2.0;

  // Bisect essentially to machine precision; the downstream residual
  // checks are much tighter than the bracket alone would give.
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (intensity_lhs(mid, m, b) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

IntensityTable make_intensity_table(const QueueParams& params, int C) {
  if (C < 1) throw std::invalid_argument("make_intensity_table: C must be >= 1");
  IntensityTable table;
  if (params.has_explicit_rho()) {
    if (static_cast<int>(params.rho.size()) < C)
      throw std::invalid_argument("make_intensity_table: explicit rho table shorter than C");
    table.rho.assign(params.rho.begin(), params.rho.begin() + C);
    for (int m = 0; m < C; ++m) {
      if (table.rho[m] <= 0.0)
        throw std::invalid_argument("make_intensity_table: rho entries must be positive");
      if (m > 0 && table.rho[m] <= table.rho[m - 1])
        throw std::invalid_argument("make_intensity_table: rho must be strictly increasing");
    }
    return table;
  }
  if (!params.eta || !params.b)
    throw std::invalid_argument("make_intensity_table: queue_params need rho or (eta, b)");
  table.eta = params.eta;
  table.b = params.b;
  table.rho.reserve(C);
  for (int m = 1; m <= C; ++m) table.rho.push_back(solve_intensity(m, *params.b, *params.eta));
  return table;
}

std::vector<double> capacity_increments(const IntensityTable& table, double mu) {
  if (mu <= 0.0) throw std::invalid_argument("capacity_increments: mu must be positive");
  if (table.rho.empty()) throw std::invalid_argument("capacity_increments: empty table");
  std::vector<double> inc;
  inc.reserve(table.rho.size());
  double prev = 0.0;
  for (size_t m = 0; m < table.rho.size(); ++m) {
    if (table.rho[m] <= prev)
      throw std::invalid_argument("capacity_increments: rho must be strictly increasing");
    inc.push_back(mu * (table.rho[m] - prev));
    prev = table.rho[m];
  }
  return inc;
}

}  // namespace rebalance
