#pragma once

#include <string>
#include <vector>

#include "rebalance/graph.hpp"
#include "rebalance/instance.hpp"
#include "rebalance/model.hpp"

namespace rebalance {

// Graphviz view of a solved instance: one rank per charge level, stations
// boxed, opened servers filled, and only arcs carrying repositioning flow.
// Pass an empty solution to render the bare graph.
std::string render_dot(const Instance& inst, const NodeChargeGraph& graph,
                       const MilpModel* model = nullptr,
                       const std::vector<double>* solution = nullptr);

}  // namespace rebalance
