#pragma once

#include <compare>
#include <cstdint>

namespace rebalance {

/// Zone index, 0-based.
using NodeId = int;

/// Charge level, 1-based; level h means "at least h charge intervals".
using Level = int;

/// A vertex of the node-charge graph: zone i at charge level g.
struct NodeCharge {
  NodeId node = 0;
  Level level = 1;

  auto operator<=>(const NodeCharge&) const = default;
};

struct Station {
  NodeId node = 0;
  int capacity = 0;  // chargers available, >= 0
};

}  // namespace rebalance
