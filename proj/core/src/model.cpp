#include "rebalance/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rebalance {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Row emitter that keeps the CSR arrays consistent.
class Builder {
 public:
  Builder(std::vector<Row>& rows, std::vector<int32_t>& term_col, std::vector<double>& term_val)
      : rows_(rows), term_col_(term_col), term_val_(term_val) {}

  void begin(RowFamily family, RowSense sense, double rhs,
             std::array<int32_t, 4> tag = {-1, -1, -1, -1}) {
    rows_.push_back({family, sense, rhs, tag, static_cast<int32_t>(term_col_.size()),
                     static_cast<int32_t>(term_col_.size())});
  }

  void term(int col, double val) {
    if (val == 0.0) return;
    term_col_.push_back(col);
    term_val_.push_back(val);
    rows_.back().end = static_cast<int32_t>(term_col_.size());
  }

 private:
  std::vector<Row>& rows_;
  std::vector<int32_t>& term_col_;
  std::vector<double>& term_val_;
};

}  // namespace

const char* row_family_name(RowFamily family) {
  switch (family) {
    case RowFamily::Assign: return "ASG";
    case RowFamily::ChargeFeasibility: return "LOW";
    case RowFamily::ServerOrder: return "ORD";
    case RowFamily::QueueCapacity: return "QUE";
    case RowFamily::FleetSize: return "TOT";
    case RowFamily::AssignLink: return "LNK";
    case RowFamily::ImbalancePos: return "IBP";
    case RowFamily::ImbalanceNeg: return "IBN";
    case RowFamily::FlowBalance: return "BAL";
    case RowFamily::PathLink: return "PTH";
    case RowFamily::StationCapacity: return "STA";
    case RowFamily::SlotCapacity: return "ARC";
  }
  return "???";
}

int MilpModel::x_col(int i, int g, int j, int h) const {
  const int nh = nodes_ * levels_;
  return (i * levels_ + (g - 1)) * nh + (j * levels_ + (h - 1));
}

int MilpModel::y_col(int j, int h, int m) const {
  const int c = y_count_ / (nodes_ * levels_);
  return x_count_ + (j * levels_ + (h - 1)) * c + (m - 1);
}

int MilpModel::w_col(int arc) const { return x_count_ + y_count_ + arc; }

int MilpModel::p_col(int path) const { return x_count_ + y_count_ + w_count_ + path; }

double MilpModel::objective_value(const std::vector<double>& x) const {
  double z = 0.0;
  for (size_t c = 0; c < cols_.size(); ++c) z += cols_[c].objective * x[c];
  return z;
}

std::string MilpModel::row_name(int row) const {
  const Row& r = rows_[static_cast<size_t>(row)];
  std::ostringstream os;
  os << row_family_name(r.family);
  for (int32_t t : r.tag)
    if (t >= 0) os << '_' << t;
  return os.str();
}

std::string MilpModel::col_name(int col) const {
  const Column& c = cols_[static_cast<size_t>(col)];
  std::ostringstream os;
  switch (c.kind) {
    case VarKind::Assign: os << 'X'; break;
    case VarKind::Server: os << 'Y'; break;
    case VarKind::Flow: os << 'W'; break;
    case VarKind::Path: os << 'P'; break;
  }
  for (int32_t t : c.tag)
    if (t >= 0) os << '_' << t;
  return os.str();
}

long long count_variables(int nodes, int levels, long long arc_count, int stations,
                          int max_servers) {
  const long long nh = static_cast<long long>(nodes) * levels;
  const long long paths = static_cast<long long>(stations) * levels * (levels - 1) / 2;
  return nh * nh + nh * max_servers + arc_count + paths;
}

long long count_constraints(int nodes, int levels, int stations, int max_servers,
                            int origin_count, Mode mode) {
  const long long nh = static_cast<long long>(nodes) * levels;
  long long rows = 0;
  rows += nh;                                 // assignment cover
  rows += nh;                                 // charge feasibility
  rows += nh * (max_servers - 1);             // server ordering
  if (mode == Mode::NonMyopic) rows += nh;    // queue capacity
  rows += 1;                                  // fleet size
  rows += nh * nh;                            // assignment linking
  rows += 2 * (nh - origin_count);            // imbalance pair
  rows += nh;                                 // flow balance
  rows += static_cast<long long>(stations) * (levels - 1);  // path linking
  rows += stations;                           // station capacity
  rows += static_cast<long long>(nodes) * (levels - 1);     // slot capacity
  return rows;
}

MilpModel assemble_model(const Instance& inst, const NodeChargeGraph& graph,
                         const ChargingPathSet& paths, const IntensityTable& table,
                         Mode mode) {
  if (static_cast<int>(table.rho.size()) < inst.max_servers)
    throw std::invalid_argument("assemble_model: intensity table shorter than max_servers");

  const int n = inst.node_count;
  const int levels = inst.levels;
  const int nh = n * levels;
  const int c = inst.max_servers;
  const int arc_count = static_cast<int>(graph.arcs().size());
  const int path_count = paths.path_count();

  MilpModel m;
  m.mode_ = mode;
  m.nodes_ = n;
  m.levels_ = levels;
  m.x_count_ = nh * nh;
  m.y_count_ = nh * c;
  m.w_count_ = arc_count;
  m.p_count_ = path_count;

  // Columns: X block, Y block, W block, P block.
  m.cols_.reserve(static_cast<size_t>(m.x_count_) + m.y_count_ + arc_count + path_count);
  for (NodeId i = 0; i < n; ++i)
    for (Level g = 1; g <= levels; ++g)
      for (NodeId j = 0; j < n; ++j)
        for (Level h = 1; h <= levels; ++h)
          m.cols_.push_back({VarKind::Assign,
                             {i, g, j, h},
                             true,
                             0.0,
                             1.0,
                             inst.lambda(i, g) * inst.travel(i, j)});
  for (NodeId j = 0; j < n; ++j)
    for (Level h = 1; h <= levels; ++h)
      for (int slot = 1; slot <= c; ++slot)
        m.cols_.push_back({VarKind::Server, {j, h, slot, -1}, true, 0.0, 1.0, 0.0});
  for (const Arc& a : graph.arcs()) {
    const NodeCharge from = graph.vertex_info(a.from);
    const NodeCharge to = graph.vertex_info(a.to);
    m.cols_.push_back({VarKind::Flow,
                       {from.node, from.level, to.node, to.level},
                       true,
                       0.0,
                       kInf,
                       inst.theta * a.cost});
  }
  for (const ChargingPath& p : paths.paths()) {
    const NodeId j = inst.stations[static_cast<size_t>(p.station_index)].node;
    m.cols_.push_back({VarKind::Path, {j, p.from, p.to, -1}, false, 0.0, kInf, 0.0});
  }

  Builder rows(m.rows_, m.term_col_, m.term_val_);
  const long long expected_rows =
      count_constraints(n, levels, static_cast<int>(inst.stations.size()), c,
                        static_cast<int>(inst.origins().size()), mode);
  m.rows_.reserve(static_cast<size_t>(expected_rows));
  // Nonzero estimate: cover + linking dominate.
  m.term_col_.reserve(static_cast<size_t>(nh) * nh * 3 / 2 + static_cast<size_t>(nh) * nh * 2);
  m.term_val_.reserve(m.term_col_.capacity());

  // Every demand vertex is served exactly once, by a covering server.
  for (NodeId i = 0; i < n; ++i)
    for (Level g = 1; g <= levels; ++g) {
      rows.begin(RowFamily::Assign, RowSense::EQ, 1.0, {i, g, -1, -1});
      for (NodeId j = 0; j < n; ++j)
        for (Level h = g; h <= levels; ++h) rows.term(m.x_col(i, g, j, h), 1.0);
    }

  // No assignment may dip below the demanded charge level.  (Empty for
  // g = 1; the row is still emitted so the published totals hold.)
  for (NodeId i = 0; i < n; ++i)
    for (Level g = 1; g <= levels; ++g) {
      rows.begin(RowFamily::ChargeFeasibility, RowSense::EQ, 0.0, {i, g, -1, -1});
      for (NodeId j = 0; j < n; ++j)
        for (Level h = 1; h < g; ++h) rows.term(m.x_col(i, g, j, h), 1.0);
    }

  // Server slots open in order: slot m needs slot m-1.
  for (NodeId j = 0; j < n; ++j)
    for (Level h = 1; h <= levels; ++h)
      for (int slot = 2; slot <= c; ++slot) {
        rows.begin(RowFamily::ServerOrder, RowSense::LE, 0.0, {j, h, slot, -1});
        rows.term(m.y_col(j, h, slot), 1.0);
        rows.term(m.y_col(j, h, slot - 1), -1.0);
      }

  // Assigned arrival rates fit the stepwise service capacity.
  if (mode == Mode::NonMyopic) {
    for (NodeId j = 0; j < n; ++j)
      for (Level h = 1; h <= levels; ++h) {
        rows.begin(RowFamily::QueueCapacity, RowSense::LE, 0.0, {j, h, -1, -1});
        for (NodeId i = 0; i < n; ++i)
          for (Level g = 1; g <= levels; ++g)
            rows.term(m.x_col(i, g, j, h), inst.lambda(i, g));
        const double mu = inst.mu(j, h);
        rows.term(m.y_col(j, h, 1), -mu * table.rho[0]);
        for (int slot = 2; slot <= c; ++slot)
          rows.term(m.y_col(j, h, slot), -mu * (table.rho[slot - 1] - table.rho[slot - 2]));
      }
  }

  // All vehicles are placed.
  rows.begin(RowFamily::FleetSize, RowSense::EQ, inst.total_vehicles());
  for (NodeId j = 0; j < n; ++j)
    for (Level h = 1; h <= levels; ++h)
      for (int slot = 1; slot <= c; ++slot) rows.term(m.y_col(j, h, slot), 1.0);

  // Assignment requires an open first slot.
  for (NodeId i = 0; i < n; ++i)
    for (Level g = 1; g <= levels; ++g)
      for (NodeId j = 0; j < n; ++j)
        for (Level h = 1; h <= levels; ++h) {
          rows.begin(RowFamily::AssignLink, RowSense::LE, 0.0, {i, g, j, h});
          rows.term(m.x_col(i, g, j, h), 1.0);
          rows.term(m.y_col(j, h, 1), -1.0);
        }

  // Net repositioning flow may touch a vertex only if a server opens there
  // (initially stocked vertices are exempt: they may be vacated freely).
  std::vector<char> is_origin(static_cast<size_t>(nh), 0);
  for (const NodeCharge& o : inst.origins())
    is_origin[static_cast<size_t>(graph.vertex(o.node, o.level))] = 1;
  for (int sign = 0; sign < 2; ++sign)
    for (NodeId i = 0; i < n; ++i)
      for (Level g = 1; g <= levels; ++g) {
        const int v = graph.vertex(i, g);
        if (is_origin[static_cast<size_t>(v)]) continue;
        rows.begin(sign == 0 ? RowFamily::ImbalancePos : RowFamily::ImbalanceNeg,
                   RowSense::LE, 0.0, {i, g, -1, -1});
        const double in = sign == 0 ? 1.0 : -1.0;
        for (int a : graph.in_arcs(v)) rows.term(m.w_col(a), in);
        for (int a : graph.out_arcs(v)) rows.term(m.w_col(a), -in);
        rows.term(m.y_col(i, g, 1), -inst.big_m);
      }

  // Flow conservation: servers at a vertex = initial stock + net inflow.
  for (NodeId j = 0; j < n; ++j)
    for (Level h = 1; h <= levels; ++h) {
      const int v = graph.vertex(j, h);
      rows.begin(RowFamily::FlowBalance, RowSense::EQ, -inst.stock(j, h), {j, h, -1, -1});
      for (int a : graph.in_arcs(v)) rows.term(m.w_col(a), 1.0);
      for (int a : graph.out_arcs(v)) rows.term(m.w_col(a), -1.0);
      for (int slot = 1; slot <= c; ++slot) rows.term(m.y_col(j, h, slot), -1.0);
    }

  // Charging-arc flow decomposes into the station's level-span paths.
  for (int s = 0; s < static_cast<int>(inst.stations.size()); ++s) {
    const NodeId j = inst.stations[static_cast<size_t>(s)].node;
    for (Level g = 1; g < levels; ++g) {
      rows.begin(RowFamily::PathLink, RowSense::EQ, 0.0, {j, g, -1, -1});
      for (int p : paths.paths_through(s, g)) rows.term(m.p_col(p), 1.0);
      rows.term(m.w_col(graph.charging_arc(s, g)), -1.0);
    }
  }

  // Concurrent charger occupations at a station fit its slots.
  for (int s = 0; s < static_cast<int>(inst.stations.size()); ++s) {
    const NodeId j = inst.stations[static_cast<size_t>(s)].node;
    rows.begin(RowFamily::StationCapacity, RowSense::LE,
               inst.stations[static_cast<size_t>(s)].capacity, {j, -1, -1, -1});
    for (int p : paths.paths_of_station(s)) rows.term(m.p_col(p), 1.0);
  }

  // Per level-transition slot guard: a single charging step cannot exceed
  // the station's slots either.  Implied by the two families above, kept
  // for the per-node accounting; empty at non-station nodes.
  {
    std::vector<int> station_of(static_cast<size_t>(n), -1);
    for (int s = 0; s < static_cast<int>(inst.stations.size()); ++s)
      station_of[static_cast<size_t>(inst.stations[static_cast<size_t>(s)].node)] = s;
    for (NodeId i = 0; i < n; ++i)
      for (Level g = 1; g < levels; ++g) {
        const int s = station_of[static_cast<size_t>(i)];
        rows.begin(RowFamily::SlotCapacity, RowSense::LE,
                   s >= 0 ? inst.stations[static_cast<size_t>(s)].capacity : 0.0,
                   {i, g, -1, -1});
        if (s >= 0) rows.term(m.w_col(graph.charging_arc(s, g)), 1.0);
      }
  }

  if (static_cast<long long>(m.rows_.size()) != expected_rows)
    throw std::logic_error("assemble_model: row total mismatch");
  return m;
}

MilpModel assemble_model(const Instance& inst, Mode mode) {
  const NodeChargeGraph graph = build_graph(inst);
  const ChargingPathSet paths = charging_paths(inst);
  const IntensityTable table = make_intensity_table(inst.queue_params, inst.max_servers);
  return assemble_model(inst, graph, paths, table, mode);
}

ViolationReport check_solution(const MilpModel& model, const std::vector<double>& x,
                               double tol) {
  ViolationReport report;
  if (x.size() != static_cast<size_t>(model.num_cols())) {
    report.violations.push_back({-1, -1, 0.0, "solution size mismatch"});
    report.max_violation = kInf;
    return report;
  }
  auto note = [&](int row, int col, double amount, std::string what) {
    if (amount <= tol) return;
    report.violations.push_back({row, col, amount, std::move(what)});
    report.max_violation = std::max(report.max_violation, amount);
  };

  const auto& cols = model.cols();
  for (int c = 0; c < model.num_cols(); ++c) {
    note(-1, c, cols[static_cast<size_t>(c)].lb - x[static_cast<size_t>(c)],
         model.col_name(c) + " below lower bound");
    note(-1, c, x[static_cast<size_t>(c)] - cols[static_cast<size_t>(c)].ub,
         model.col_name(c) + " above upper bound");
    if (cols[static_cast<size_t>(c)].integral)
      note(-1, c, std::fabs(x[static_cast<size_t>(c)] - std::round(x[static_cast<size_t>(c)])),
           model.col_name(c) + " fractional");
  }

  const auto& rows = model.rows();
  const auto& tc = model.term_col();
  const auto& tv = model.term_val();
  for (int r = 0; r < model.num_rows(); ++r) {
    const Row& row = rows[static_cast<size_t>(r)];
    double activity = 0.0;
    for (int32_t k = row.begin; k < row.end; ++k)
      activity += tv[static_cast<size_t>(k)] * x[static_cast<size_t>(tc[static_cast<size_t>(k)])];
    double amount = 0.0;
    switch (row.sense) {
      case RowSense::LE: amount = activity - row.rhs; break;
      case RowSense::GE: amount = row.rhs - activity; break;
      case RowSense::EQ: amount = std::fabs(activity - row.rhs); break;
    }
    note(r, -1, amount, model.row_name(r) + " violated");
  }
  return report;
}

}  // namespace rebalance
