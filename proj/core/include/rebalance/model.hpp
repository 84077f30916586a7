#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rebalance/graph.hpp"
#include "rebalance/instance.hpp"
#include "rebalance/queueing.hpp"

namespace rebalance {

// Which assignment regime the model encodes.  Myopic drops the shared queue
// capacity rows and lets every demand pick its nearest covering server;
// NonMyopic keeps them so assignments respect aggregate service rates.
enum class Mode { Myopic, NonMyopic };

enum class VarKind : uint8_t {
  Assign,     // X[i,g][j,h]: demand (i,g) served from (j,h)
  Server,     // Y[j,h][m]:   m-th server slot open at (j,h)
  Flow,       // W[arc]:      repositioning flow on a graph arc
  Path,       // P[j][g,h]:   vehicles riding the station-j charging ladder g->h
};

enum class RowFamily : uint8_t {
  Assign,            // each demand assigned exactly once
  ChargeFeasibility, // no assignment to servers below the demand's level
  ServerOrder,       // server slots open in order
  QueueCapacity,     // assigned arrival rates fit the service capacity (non-myopic)
  FleetSize,         // total open slots equals the fleet
  AssignLink,        // assignment requires an open first slot
  ImbalancePos,      // inflow-outflow surplus only at opened vertices
  ImbalanceNeg,      // inflow-outflow deficit only at opened vertices
  FlowBalance,       // flow conservation with initial stock
  PathLink,          // ladder paths decompose charging-arc flow
  StationCapacity,   // total paths through a station fit its slots
  SlotCapacity,      // per-transition path load fits the station slots
};

const char* row_family_name(RowFamily family);

enum class RowSense : uint8_t { LE, GE, EQ };

struct Row {
  RowFamily family;
  RowSense sense;
  double rhs;
  std::array<int32_t, 4> tag;  // family-specific indices, unused slots -1
  int32_t begin;               // [begin,end) into term_col/term_val
  int32_t end;
};

struct Column {
  VarKind kind;
  std::array<int32_t, 4> tag;  // kind-specific indices, unused slots -1
  bool integral;
  double lb;
  double ub;  // +inf for unbounded-above
  double objective;
};

// Sparse row-major MILP: minimize c'x subject to the row senses and
// per-column bounds.  Column order is X block, Y block, W block, P block.
class MilpModel {
 public:
  Mode mode() const { return mode_; }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_cols() const { return static_cast<int>(cols_.size()); }
  int num_nonzeros() const { return static_cast<int>(term_col_.size()); }

  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<Column>& cols() const { return cols_; }
  const std::vector<int32_t>& term_col() const { return term_col_; }
  const std::vector<double>& term_val() const { return term_val_; }

  // Column offsets for each variable block.
  int x_col(int i, int g, int j, int h) const;  // levels 1-based
  int y_col(int j, int h, int m) const;         // m 1-based
  int w_col(int arc) const;
  int p_col(int path) const;

  int x_count() const { return x_count_; }
  int y_count() const { return y_count_; }
  int w_count() const { return w_count_; }
  int p_count() const { return p_count_; }

  double objective_value(const std::vector<double>& x) const;

  std::string row_name(int row) const;
  std::string col_name(int col) const;

 private:
  friend MilpModel assemble_model(const Instance&, const NodeChargeGraph&,
                                  const ChargingPathSet&, const IntensityTable&, Mode);
  Mode mode_ = Mode::Myopic;
  int nodes_ = 0;
  int levels_ = 0;
  int x_count_ = 0, y_count_ = 0, w_count_ = 0, p_count_ = 0;
  std::vector<Row> rows_;
  std::vector<Column> cols_;
  std::vector<int32_t> term_col_;
  std::vector<double> term_val_;
};

MilpModel assemble_model(const Instance& inst, const NodeChargeGraph& graph,
                         const ChargingPathSet& paths, const IntensityTable& table, Mode mode);

// Convenience: build graph/paths/table internally.
MilpModel assemble_model(const Instance& inst, Mode mode);

// Closed-form column total for a model over a graph with `arc_count` arcs
// and `stations` charging ladders: assignment block + server slots + arc
// flows + one path variable per station level span.
long long count_variables(int nodes, int levels, long long arc_count, int stations,
                          int max_servers);

// Closed-form row total matching what assemble_model emits.  The myopic
// count drops the per-vertex queue capacity rows.
long long count_constraints(int nodes, int levels, int stations, int max_servers,
                            int origin_count, Mode mode = Mode::Myopic);

struct Violation {
  int row;          // -1 for bound/integrality violations
  int col;          // -1 for row violations
  double amount;
  std::string what;
};

struct ViolationReport {
  std::vector<Violation> violations;
  double max_violation = 0.0;
  bool ok() const { return violations.empty(); }
};

ViolationReport check_solution(const MilpModel& model, const std::vector<double>& x,
                               double tol = 1e-6);

}  // namespace rebalance
