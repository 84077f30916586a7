#include "rebalance/render.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace rebalance {

namespace {

std::string vertex_id(const NodeChargeGraph& graph, int v) {
  const NodeCharge nc = graph.vertex_info(v);
  return "v" + std::to_string(nc.node) + "_" + std::to_string(nc.level);
}

}  // namespace

std::string render_dot(const Instance& inst, const NodeChargeGraph& graph, const MilpModel* model,
                       const std::vector<double>* solution) {
  const bool solved = model != nullptr && solution != nullptr && !solution->empty();
  std::ostringstream out;
  out << "digraph rebalance {\n  rankdir=BT;\n  node [fontsize=10];\n";

  for (Level g = 1; g <= graph.level_count(); ++g) {
    out << "  { rank=same;";
    for (int i = 0; i < graph.node_count(); ++i) out << " " << vertex_id(graph, graph.vertex(i, g)) << ";";
    out << " }\n";
  }

  for (int v = 0; v < graph.vertex_count(); ++v) {
    const NodeCharge nc = graph.vertex_info(v);
    int servers = 0;
    if (solved) {
      const int slots = model->y_count() / graph.vertex_count();
      for (int m = 1; m <= slots; ++m)
        if ((*solution)[static_cast<size_t>(model->y_col(nc.node, nc.level, m))] > 0.5) ++servers;
    }
    char lambda[32];
    std::snprintf(lambda, sizeof lambda, "%.3g", inst.lambda(nc.node, nc.level));
    out << "  " << vertex_id(graph, v) << " [label=\"" << nc.node << "," << nc.level << "\\n"
        << lambda << "\"";
    if (inst.is_station(nc.node)) out << " shape=box";
    if (servers > 0) out << " style=filled fillcolor=lightblue xlabel=\"" << servers << "\"";
    out << "];\n";
  }

  for (size_t a = 0; a < graph.arcs().size(); ++a) {
    const Arc& arc = graph.arcs()[a];
    double flow = 0.0;
    if (solved) flow = (*solution)[static_cast<size_t>(model->w_col(static_cast<int>(a)))];
    if (solved && std::fabs(flow) < 0.5) continue;  // only arcs carrying flow
    out << "  " << vertex_id(graph, arc.from) << " -> " << vertex_id(graph, arc.to);
    out << " [";
    if (arc.kind == ArcKind::Charging) out << "style=dashed ";
    if (solved)
      out << "label=\"" << std::llround(flow) << "\"";
    else
      out << "label=\"" << arc.cost << "\"";
    out << "];\n";
  }

  out << "}\n";
  return out.str();
}

}  // namespace rebalance
