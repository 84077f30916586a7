#include "rebalance/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <vector>

namespace rebalance {

const char* solve_status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Limit: return "limit";
  }
  return "?";
}

LpProblem to_lp(const MilpModel& model) {
  LpProblem lp;
  lp.num_rows = model.num_rows();
  lp.num_cols = model.num_cols();
  lp.objective.reserve(static_cast<size_t>(lp.num_cols));
  lp.col_lb.reserve(static_cast<size_t>(lp.num_cols));
  lp.col_ub.reserve(static_cast<size_t>(lp.num_cols));
  for (const Column& c : model.cols()) {
    lp.objective.push_back(c.objective);
    lp.col_lb.push_back(c.lb);
    lp.col_ub.push_back(c.ub);
  }
  lp.row_lb.reserve(static_cast<size_t>(lp.num_rows));
  lp.row_ub.reserve(static_cast<size_t>(lp.num_rows));
  lp.row_begin.reserve(static_cast<size_t>(lp.num_rows) + 1);
  lp.row_begin.push_back(0);
  for (const Row& r : model.rows()) {
    switch (r.sense) {
      case RowSense::LE:
        lp.row_lb.push_back(-LpProblem::kInf);
        lp.row_ub.push_back(r.rhs);
        break;
      case RowSense::GE:
        lp.row_lb.push_back(r.rhs);
        lp.row_ub.push_back(LpProblem::kInf);
        break;
      case RowSense::EQ:
        lp.row_lb.push_back(r.rhs);
        lp.row_ub.push_back(r.rhs);
        break;
    }
    lp.row_begin.push_back(r.end);
  }
  lp.col_index = model.term_col();
  lp.value = model.term_val();
  return lp;
}

namespace {

struct Node {
  double bound;
  int depth;
  long long id;
  int record;  // index into the bound-change arena
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

// One bound tightening relative to the parent node.
struct BoundChange {
  int parent;
  int32_t col;
  double lb, ub;
};

struct TreeResult {
  SolveStatus status = SolveStatus::Limit;
  double objective = 0.0;
  double bound = -LpProblem::kInf;
  std::vector<double> x;
  long long nodes = 0;
  long long lp_iterations = 0;
  bool exhausted = false;  // the whole tree was explored
};

TreeResult run_tree(const MilpModel& model, const BnbOptions& options,
                    const std::vector<bool>& branchable,
                    const std::chrono::steady_clock::time_point& deadline, bool use_deadline) {
  LpProblem lp = to_lp(model);

  // Flow variables are formally unbounded; the fleet size caps any sensible
  // flow, and a finite range keeps the branching tree finite.
  double fleet = 0.0;
  for (int r = 0; r < model.num_rows(); ++r)
    if (model.rows()[static_cast<size_t>(r)].family == RowFamily::FleetSize)
      fleet = model.rows()[static_cast<size_t>(r)].rhs;
  for (int c = 0; c < model.num_cols(); ++c)
    if (model.cols()[static_cast<size_t>(c)].kind == VarKind::Flow)
      lp.col_ub[static_cast<size_t>(c)] = std::min(lp.col_ub[static_cast<size_t>(c)], fleet);

  SimplexSolver solver(lp, options.lp);

  TreeResult result;
  double incumbent_obj = LpProblem::kInf;
  std::vector<double> incumbent_x;
  if (options.incumbent) {
    const ViolationReport report = check_solution(model, *options.incumbent, 1e-6);
    if (report.ok()) {
      incumbent_obj = model.objective_value(*options.incumbent);
      incumbent_x = *options.incumbent;
      if (options.log) options.log("starting incumbent " + std::to_string(incumbent_obj));
    }
  }

  std::vector<BoundChange> arena;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  open.push({-LpProblem::kInf, 0, 0, -1});
  long long next_id = 1;
  double open_floor = LpProblem::kInf;  // best bound among unexplored nodes

  std::vector<double> node_lb, node_ub;
  result.exhausted = true;
  while (!open.empty()) {
    if (result.nodes >= options.node_limit ||
        (use_deadline && std::chrono::steady_clock::now() > deadline)) {
      open_floor = std::min(open_floor, open.top().bound);
      result.exhausted = false;
      break;
    }
    const Node node = open.top();
    open.pop();
    if (node.bound >= incumbent_obj - options.gap_tol) continue;  // fathomed by bound

    node_lb = lp.col_lb;
    node_ub = lp.col_ub;
    for (int rec = node.record; rec >= 0; rec = arena[static_cast<size_t>(rec)].parent) {
      const BoundChange& bc = arena[static_cast<size_t>(rec)];
      node_lb[static_cast<size_t>(bc.col)] = std::max(node_lb[static_cast<size_t>(bc.col)], bc.lb);
      node_ub[static_cast<size_t>(bc.col)] = std::min(node_ub[static_cast<size_t>(bc.col)], bc.ub);
    }

    ++result.nodes;
    const LpResult relax = solver.resolve_with_bounds(node_lb, node_ub);
    result.lp_iterations += relax.iterations;
    if (relax.status == LpStatus::Infeasible) continue;
    if (relax.status == LpStatus::Unbounded) {
      result.status = SolveStatus::Unbounded;
      return result;
    }
    if (relax.status == LpStatus::IterationLimit) {
      result.exhausted = false;
      open_floor = std::min(open_floor, node.bound);
      break;
    }

    const double bound = std::max(node.bound, relax.objective);
    if (bound >= incumbent_obj - options.gap_tol) continue;

    // Most fractional branchable column, ties to the lowest index.
    int branch_col = -1;
    double branch_frac = options.integrality_tol;
    for (int c = 0; c < lp.num_cols; ++c) {
      if (!branchable[static_cast<size_t>(c)]) continue;
      const double v = relax.x[static_cast<size_t>(c)];
      const double frac = std::fabs(v - std::round(v));
      if (frac > branch_frac) {
        branch_frac = frac;
        branch_col = c;
      }
    }

    if (branch_col < 0) {
      if (relax.objective < incumbent_obj - options.gap_tol) {
        incumbent_obj = relax.objective;
        incumbent_x = relax.x;
        if (options.log)
          options.log("node " + std::to_string(node.id) + ": incumbent " +
                      std::to_string(incumbent_obj));
      }
      continue;
    }

    const double v = relax.x[static_cast<size_t>(branch_col)];
    const double down = std::floor(v + options.integrality_tol);
    arena.push_back({node.record, branch_col, -LpProblem::kInf, down});
    open.push({bound, node.depth + 1, next_id++, static_cast<int>(arena.size()) - 1});
    arena.push_back({node.record, branch_col, down + 1.0, LpProblem::kInf});
    open.push({bound, node.depth + 1, next_id++, static_cast<int>(arena.size()) - 1});
  }

  while (!open.empty()) {
    open_floor = std::min(open_floor, open.top().bound);
    open.pop();
  }

  if (incumbent_obj < LpProblem::kInf) {
    result.objective = incumbent_obj;
    result.x = std::move(incumbent_x);
    if (result.exhausted) {
      result.status = SolveStatus::Optimal;
      result.bound = incumbent_obj;
    } else {
      result.status = SolveStatus::Limit;
      result.bound = std::min(open_floor, incumbent_obj);
    }
  } else {
    result.status = result.exhausted ? SolveStatus::Infeasible : SolveStatus::Limit;
  }
  return result;
}

}  // namespace

MilpResult solve_milp(const MilpModel& model, const BnbOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const bool use_deadline = options.time_limit_seconds > 0.0;
  const auto deadline =
      start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                  std::chrono::duration<double>(options.time_limit_seconds));

  // Server-slot variables may be treated as continuous when the queueing
  // rows are present; the relaxation is validated afterwards.
  const bool relax_slots = options.relax_server_slots && model.mode() == Mode::NonMyopic;
  std::vector<bool> branchable(static_cast<size_t>(model.num_cols()), false);
  for (int c = 0; c < model.num_cols(); ++c) {
    const Column& col = model.cols()[static_cast<size_t>(c)];
    branchable[static_cast<size_t>(c)] =
        col.integral && !(relax_slots && col.kind == VarKind::Server);
  }

  TreeResult tree = run_tree(model, options, branchable, deadline, use_deadline);

  if (relax_slots && tree.status == SolveStatus::Optimal) {
    bool fractional = false;
    for (int c = 0; c < model.num_cols() && !fractional; ++c)
      if (model.cols()[static_cast<size_t>(c)].kind == VarKind::Server &&
          std::fabs(tree.x[static_cast<size_t>(c)] - std::round(tree.x[static_cast<size_t>(c)])) >
              options.integrality_tol)
        fractional = true;
    if (fractional) {
      if (options.log) options.log("relaxed server slots came back fractional; re-solving integer");
      for (int c = 0; c < model.num_cols(); ++c)
        if (model.cols()[static_cast<size_t>(c)].kind == VarKind::Server)
          branchable[static_cast<size_t>(c)] = true;
      const TreeResult strict = run_tree(model, options, branchable, deadline, use_deadline);
      tree.status = strict.status;
      tree.objective = strict.objective;
      tree.bound = strict.bound;
      tree.x = strict.x;
      tree.nodes += strict.nodes;
      tree.lp_iterations += strict.lp_iterations;
    }
  }

  MilpResult res;
  res.status = tree.status;
  res.objective = tree.objective;
  res.bound = tree.bound;
  res.x = std::move(tree.x);
  res.nodes_explored = tree.nodes;
  res.lp_iterations = tree.lp_iterations;
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace rebalance
