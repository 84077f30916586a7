#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rebalance/lp.hpp"
#include "rebalance/model.hpp"

namespace rebalance {

// Generic MILP as read back from an MPS file.  Kept order-preserving so an
// export -> parse -> export round trip is byte identical.
struct MpsBound {
  enum Kind { Upper, Lower, Fixed, Free, PlusInf } kind;
  int col;
  double value;  // unused for Free/PlusInf
};

struct MpsModel {
  std::string name;
  std::string objective_name;
  std::vector<std::string> row_names;
  std::vector<char> row_senses;  // 'L', 'G', 'E'
  std::vector<std::string> col_names;
  std::vector<bool> col_integral;
  std::vector<double> objective;     // per column
  std::vector<int32_t> col_begin;    // CSC, size cols+1
  std::vector<int32_t> entry_row;
  std::vector<double> entry_value;
  std::vector<double> rhs;           // per row, 0 entries omitted on write
  std::vector<std::pair<int32_t, double>> ranges;
  std::vector<MpsBound> bounds;

  int num_rows() const { return static_cast<int>(row_names.size()); }
  int num_cols() const { return static_cast<int>(col_names.size()); }
};

void write_mps(std::ostream& out, const MilpModel& model,
               const std::string& name = "REBALANCE");
void write_mps(std::ostream& out, const MpsModel& model);

std::string to_mps(const MilpModel& model, const std::string& name = "REBALANCE");
std::string to_mps(const MpsModel& model);

// Free-format MPS parser covering the subset write_mps emits plus RANGES.
// Throws std::runtime_error with a line number on malformed input.
MpsModel parse_mps(std::istream& in);
MpsModel parse_mps_file(const std::string& path);

// Convert a parsed model into solver form.
LpProblem mps_to_lp(const MpsModel& model, std::vector<bool>* integral = nullptr);

}  // namespace rebalance
