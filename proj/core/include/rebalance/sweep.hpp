#pragma once

#include <string>
#include <vector>

#include "rebalance/bnb.hpp"
#include "rebalance/instance.hpp"
#include "rebalance/model.hpp"

namespace rebalance {

enum class SweepKind { StationCapacity, ServiceRate };

struct SweepPoint {
  double param_value = 0.0;
  Mode mode = Mode::Myopic;
  SolveStatus status = SolveStatus::Limit;
  double objective = 0.0;
  double wall_seconds = 0.0;
  double gap = 0.0;  // |objective - bound| of the final tree
};

struct SweepOptions {
  SweepKind kind = SweepKind::StationCapacity;
  std::vector<double> values;
  Mode mode = Mode::Myopic;
  int threads = 1;
  BnbOptions bnb;
};

// Re-solve the instance once per parameter value.  StationCapacity overrides
// every station's slot count (value rounded); ServiceRate overrides the
// service rate at every vertex.  Points come back in the order of `values`.
std::vector<SweepPoint> run_sweep(const Instance& base, const SweepOptions& options);

// CSV with header: param_value,mode,status,Z,wall_seconds,gap
std::string sweep_csv(const std::vector<SweepPoint>& points);

}  // namespace rebalance
