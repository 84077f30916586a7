#include "rebalance/mps.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rebalance {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

char sense_char(RowSense sense) {
  switch (sense) {
    case RowSense::LE: return 'L';
    case RowSense::GE: return 'G';
    case RowSense::EQ: return 'E';
  }
  return '?';
}

MpsModel from_milp(const MilpModel& model, const std::string& name) {
  MpsModel out;
  out.name = name;
  out.objective_name = "OBJ";

  const int rows = model.num_rows();
  const int cols = model.num_cols();
  out.row_names.reserve(static_cast<size_t>(rows));
  out.row_senses.reserve(static_cast<size_t>(rows));
  out.rhs.reserve(static_cast<size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    out.row_names.push_back(model.row_name(r));
    out.row_senses.push_back(sense_char(model.rows()[static_cast<size_t>(r)].sense));
    out.rhs.push_back(model.rows()[static_cast<size_t>(r)].rhs);
  }

  out.col_names.reserve(static_cast<size_t>(cols));
  out.col_integral.reserve(static_cast<size_t>(cols));
  out.objective.reserve(static_cast<size_t>(cols));
  for (int c = 0; c < cols; ++c) {
    out.col_names.push_back(model.col_name(c));
    out.col_integral.push_back(model.cols()[static_cast<size_t>(c)].integral);
    out.objective.push_back(model.cols()[static_cast<size_t>(c)].objective);
  }

  // CSR -> CSC; scanning rows in order keeps each column's rows ascending.
  std::vector<int32_t> count(static_cast<size_t>(cols) + 1, 0);
  for (int32_t col : model.term_col()) ++count[static_cast<size_t>(col) + 1];
  out.col_begin.assign(static_cast<size_t>(cols) + 1, 0);
  for (int c = 0; c < cols; ++c)
    out.col_begin[static_cast<size_t>(c) + 1] =
        out.col_begin[static_cast<size_t>(c)] + count[static_cast<size_t>(c) + 1];
  out.entry_row.resize(model.term_col().size());
  out.entry_value.resize(model.term_col().size());
  std::vector<int32_t> next(out.col_begin.begin(), out.col_begin.end() - 1);
  for (int r = 0; r < rows; ++r) {
    const Row& row = model.rows()[static_cast<size_t>(r)];
    for (int32_t k = row.begin; k < row.end; ++k) {
      const int32_t c = model.term_col()[static_cast<size_t>(k)];
      const int32_t slot = next[static_cast<size_t>(c)]++;
      out.entry_row[static_cast<size_t>(slot)] = r;
      out.entry_value[static_cast<size_t>(slot)] = model.term_val()[static_cast<size_t>(k)];
    }
  }

  for (int c = 0; c < cols; ++c) {
    const Column& col = model.cols()[static_cast<size_t>(c)];
    if (col.integral && col.ub == 1.0 && col.lb == 0.0)
      out.bounds.push_back({MpsBound::Upper, c, 1.0});
    else if (col.ub == LpProblem::kInf && col.lb == 0.0)
      out.bounds.push_back({MpsBound::PlusInf, c, 0.0});
    else {
      if (col.lb != 0.0) out.bounds.push_back({MpsBound::Lower, c, col.lb});
      if (col.ub != LpProblem::kInf) out.bounds.push_back({MpsBound::Upper, c, col.ub});
    }
  }
  return out;
}

}  // namespace

void write_mps(std::ostream& out, const MpsModel& m) {
  out << "NAME          " << m.name << "\n";
  out << "ROWS\n";
  out << " N  " << m.objective_name << "\n";
  for (int r = 0; r < m.num_rows(); ++r)
    out << " " << m.row_senses[static_cast<size_t>(r)] << "  "
        << m.row_names[static_cast<size_t>(r)] << "\n";

  out << "COLUMNS\n";
  bool in_integer_block = false;
  int marker = 0;
  for (int c = 0; c < m.num_cols(); ++c) {
    const bool integral = m.col_integral[static_cast<size_t>(c)];
    if (integral != in_integer_block) {
      out << "    MARK" << std::setfill('0') << std::setw(4) << marker++ << std::setfill(' ')
          << "  'MARKER'                 " << (integral ? "'INTORG'" : "'INTEND'") << "\n";
      in_integer_block = integral;
    }
    const std::string& name = m.col_names[static_cast<size_t>(c)];
    if (m.objective[static_cast<size_t>(c)] != 0.0)
      out << "    " << std::left << std::setw(12) << name << "  " << std::setw(12)
          << m.objective_name << "  " << fmt_double(m.objective[static_cast<size_t>(c)])
          << "\n";
    for (int32_t k = m.col_begin[static_cast<size_t>(c)];
         k < m.col_begin[static_cast<size_t>(c) + 1]; ++k)
      out << "    " << std::left << std::setw(12) << name << "  " << std::setw(12)
          << m.row_names[static_cast<size_t>(m.entry_row[static_cast<size_t>(k)])] << "  "
          << fmt_double(m.entry_value[static_cast<size_t>(k)]) << "\n";
  }
  if (in_integer_block)
    out << "    MARK" << std::setfill('0') << std::setw(4) << marker++ << std::setfill(' ')
        << "  'MARKER'                 'INTEND'\n";

  out << "RHS\n";
  for (int r = 0; r < m.num_rows(); ++r)
    if (m.rhs[static_cast<size_t>(r)] != 0.0)
      out << "    RHS           " << std::left << std::setw(12)
          << m.row_names[static_cast<size_t>(r)] << "  "
          << fmt_double(m.rhs[static_cast<size_t>(r)]) << "\n";

  out << "RANGES\n";
  for (const auto& [row, value] : m.ranges)
    out << "    RNG           " << std::left << std::setw(12)
        << m.row_names[static_cast<size_t>(row)] << "  " << fmt_double(value) << "\n";

  out << "BOUNDS\n";
  for (const MpsBound& b : m.bounds) {
    const std::string& name = m.col_names[static_cast<size_t>(b.col)];
    switch (b.kind) {
      case MpsBound::Upper:
        out << " UP BND           " << std::left << std::setw(12) << name << "  "
            << fmt_double(b.value) << "\n";
        break;
      case MpsBound::Lower:
        out << " LO BND           " << std::left << std::setw(12) << name << "  "
            << fmt_double(b.value) << "\n";
        break;
      case MpsBound::Fixed:
        out << " FX BND           " << std::left << std::setw(12) << name << "  "
            << fmt_double(b.value) << "\n";
        break;
      case MpsBound::Free:
        out << " FR BND           " << name << "\n";
        break;
      case MpsBound::PlusInf:
        out << " PL BND           " << name << "\n";
        break;
    }
  }
  out << "ENDATA\n";
}

void write_mps(std::ostream& out, const MilpModel& model, const std::string& name) {
  write_mps(out, from_milp(model, name));
}

std::string to_mps(const MilpModel& model, const std::string& name) {
  std::ostringstream os;
  write_mps(os, model, name);
  return os.str();
}

std::string to_mps(const MpsModel& model) {
  std::ostringstream os;
  write_mps(os, model);
  return os.str();
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw std::runtime_error("mps: line " + std::to_string(line) + ": " + what);
}

double parse_num(const std::string& tok, int line) {
  try {
    size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) parse_fail(line, "trailing characters in number '" + tok + "'");
    return v;
  } catch (const std::logic_error&) {
    parse_fail(line, "expected a number, got '" + tok + "'");
  }
}

}  // namespace

MpsModel parse_mps(std::istream& in) {
  MpsModel m;
  enum Section { None, Rows, Columns, Rhs, Ranges, Bounds, Done } section = None;
  std::map<std::string, int> row_of;
  std::map<std::string, int> col_of;
  // Per-column COLUMNS entries, appended in file order.
  struct ColData {
    bool integral = false;
    double objective = 0.0;
    std::vector<std::pair<int32_t, double>> entries;
  };
  std::vector<ColData> cols;
  bool integral_mode = false;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '*') continue;

    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (!std::isspace(static_cast<unsigned char>(line[0]))) {
      const std::string& kw = tok[0];
      if (kw == "NAME") {
        m.name = tok.size() > 1 ? tok[1] : "";
      } else if (kw == "ROWS") {
        section = Rows;
      } else if (kw == "COLUMNS") {
        section = Columns;
      } else if (kw == "RHS") {
        section = Rhs;
        m.rhs.assign(m.row_names.size(), 0.0);
      } else if (kw == "RANGES") {
        section = Ranges;
      } else if (kw == "BOUNDS") {
        section = Bounds;
      } else if (kw == "ENDATA") {
        section = Done;
        break;
      } else if (kw == "OBJSENSE" || kw == "OBJSENSE:") {
        section = None;  // next data line carries MIN/MAX; MIN assumed
      } else {
        parse_fail(lineno, "unknown section '" + kw + "'");
      }
      continue;
    }

    switch (section) {
      case Rows: {
        if (tok.size() != 2) parse_fail(lineno, "ROWS entries need a type and a name");
        const char type = static_cast<char>(std::toupper(static_cast<unsigned char>(tok[0][0])));
        if (tok[0].size() != 1 || (type != 'N' && type != 'L' && type != 'G' && type != 'E'))
          parse_fail(lineno, "unknown row type '" + tok[0] + "'");
        if (type == 'N') {
          if (m.objective_name.empty()) m.objective_name = tok[1];
          break;  // extra free rows are ignored
        }
        if (!row_of.emplace(tok[1], static_cast<int>(m.row_names.size())).second)
          parse_fail(lineno, "duplicate row '" + tok[1] + "'");
        m.row_names.push_back(tok[1]);
        m.row_senses.push_back(type);
        break;
      }
      case Columns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          const std::string& kind = tok.back();
          if (kind == "'INTORG'")
            integral_mode = true;
          else if (kind == "'INTEND'")
            integral_mode = false;
          else
            parse_fail(lineno, "unknown marker '" + kind + "'");
          break;
        }
        if (tok.size() < 3 || tok.size() % 2 == 0)
          parse_fail(lineno, "COLUMNS entries are name row value [row value]");
        auto [it, fresh] = col_of.emplace(tok[0], static_cast<int>(cols.size()));
        if (fresh) {
          m.col_names.push_back(tok[0]);
          cols.emplace_back();
          cols.back().integral = integral_mode;
        }
        ColData& col = cols[static_cast<size_t>(it->second)];
        for (size_t k = 1; k + 1 < tok.size(); k += 2) {
          const double value = parse_num(tok[k + 1], lineno);
          if (tok[k] == m.objective_name) {
            col.objective = value;
            continue;
          }
          const auto row = row_of.find(tok[k]);
          if (row == row_of.end()) parse_fail(lineno, "unknown row '" + tok[k] + "'");
          col.entries.emplace_back(row->second, value);
        }
        break;
      }
      case Rhs: {
        if (tok.size() < 3 || tok.size() % 2 == 0)
          parse_fail(lineno, "RHS entries are set row value [row value]");
        for (size_t k = 1; k + 1 < tok.size(); k += 2) {
          const auto row = row_of.find(tok[k]);
          if (row == row_of.end()) {
            if (tok[k] == m.objective_name) continue;  // objective offset ignored
            parse_fail(lineno, "unknown row '" + tok[k] + "'");
          }
          m.rhs[static_cast<size_t>(row->second)] = parse_num(tok[k + 1], lineno);
        }
        break;
      }
      case Ranges: {
        if (tok.size() < 3 || tok.size() % 2 == 0)
          parse_fail(lineno, "RANGES entries are set row value [row value]");
        for (size_t k = 1; k + 1 < tok.size(); k += 2) {
          const auto row = row_of.find(tok[k]);
          if (row == row_of.end()) parse_fail(lineno, "unknown row '" + tok[k] + "'");
          m.ranges.emplace_back(row->second, parse_num(tok[k + 1], lineno));
        }
        break;
      }
      case Bounds: {
        if (tok.size() < 3) parse_fail(lineno, "BOUNDS entries are type set column [value]");
        const std::string& kind = tok[0];
        const auto col = col_of.find(tok[2]);
        if (col == col_of.end()) parse_fail(lineno, "unknown column '" + tok[2] + "'");
        if (kind == "UP" || kind == "UI")
          m.bounds.push_back({MpsBound::Upper, col->second, parse_num(tok.at(3), lineno)});
        else if (kind == "LO" || kind == "LI")
          m.bounds.push_back({MpsBound::Lower, col->second, parse_num(tok.at(3), lineno)});
        else if (kind == "FX")
          m.bounds.push_back({MpsBound::Fixed, col->second, parse_num(tok.at(3), lineno)});
        else if (kind == "FR")
          m.bounds.push_back({MpsBound::Free, col->second, 0.0});
        else if (kind == "PL")
          m.bounds.push_back({MpsBound::PlusInf, col->second, 0.0});
        else if (kind == "BV")
          m.bounds.push_back({MpsBound::Upper, col->second, 1.0});
        else if (kind == "MI")
          parse_fail(lineno, "MI bounds are not supported");
        else
          parse_fail(lineno, "unknown bound type '" + kind + "'");
        break;
      }
      case None:
        break;  // OBJSENSE payload
      case Done:
        break;
      default:
        parse_fail(lineno, "data before any section");
    }
  }
  if (section != Done) parse_fail(lineno, "missing ENDATA");
  if (m.objective_name.empty()) parse_fail(lineno, "no objective row");
  if (m.rhs.size() != m.row_names.size()) m.rhs.assign(m.row_names.size(), 0.0);

  m.col_integral.resize(cols.size());
  m.objective.resize(cols.size());
  m.col_begin.assign(cols.size() + 1, 0);
  size_t nnz = 0;
  for (size_t c = 0; c < cols.size(); ++c) nnz += cols[c].entries.size();
  m.entry_row.reserve(nnz);
  m.entry_value.reserve(nnz);
  for (size_t c = 0; c < cols.size(); ++c) {
    m.col_integral[c] = cols[c].integral;
    m.objective[c] = cols[c].objective;
    for (const auto& [row, value] : cols[c].entries) {
      m.entry_row.push_back(row);
      m.entry_value.push_back(value);
    }
    m.col_begin[c + 1] = static_cast<int32_t>(m.entry_row.size());
  }
  return m;
}

MpsModel parse_mps_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("mps: cannot open " + path);
  return parse_mps(in);
}

LpProblem mps_to_lp(const MpsModel& m, std::vector<bool>* integral) {
  LpProblem lp;
  lp.num_rows = m.num_rows();
  lp.num_cols = m.num_cols();
  lp.objective = m.objective;
  lp.col_lb.assign(static_cast<size_t>(lp.num_cols), 0.0);
  lp.col_ub.assign(static_cast<size_t>(lp.num_cols), LpProblem::kInf);
  lp.row_lb.resize(static_cast<size_t>(lp.num_rows));
  lp.row_ub.resize(static_cast<size_t>(lp.num_rows));
  for (int r = 0; r < lp.num_rows; ++r) {
    const double rhs = m.rhs[static_cast<size_t>(r)];
    switch (m.row_senses[static_cast<size_t>(r)]) {
      case 'L':
        lp.row_lb[static_cast<size_t>(r)] = -LpProblem::kInf;
        lp.row_ub[static_cast<size_t>(r)] = rhs;
        break;
      case 'G':
        lp.row_lb[static_cast<size_t>(r)] = rhs;
        lp.row_ub[static_cast<size_t>(r)] = LpProblem::kInf;
        break;
      default:
        lp.row_lb[static_cast<size_t>(r)] = rhs;
        lp.row_ub[static_cast<size_t>(r)] = rhs;
        break;
    }
  }
  for (const auto& [row, value] : m.ranges) {
    const double rhs = m.rhs[static_cast<size_t>(row)];
    switch (m.row_senses[static_cast<size_t>(row)]) {
      case 'L': lp.row_lb[static_cast<size_t>(row)] = rhs - std::abs(value); break;
      case 'G': lp.row_ub[static_cast<size_t>(row)] = rhs + std::abs(value); break;
      default:
        if (value >= 0.0)
          lp.row_ub[static_cast<size_t>(row)] = rhs + value;
        else
          lp.row_lb[static_cast<size_t>(row)] = rhs + value;
        break;
    }
  }
  for (const MpsBound& b : m.bounds) {
    const size_t c = static_cast<size_t>(b.col);
    switch (b.kind) {
      case MpsBound::Upper: lp.col_ub[c] = b.value; break;
      case MpsBound::Lower: lp.col_lb[c] = b.value; break;
      case MpsBound::Fixed: lp.col_lb[c] = lp.col_ub[c] = b.value; break;
      case MpsBound::Free:
        lp.col_lb[c] = -LpProblem::kInf;
        lp.col_ub[c] = LpProblem::kInf;
        break;
      case MpsBound::PlusInf: lp.col_ub[c] = LpProblem::kInf; break;
    }
  }

  // CSC -> CSR.
  std::vector<int32_t> count(static_cast<size_t>(lp.num_rows) + 1, 0);
  for (int32_t r : m.entry_row) ++count[static_cast<size_t>(r) + 1];
  lp.row_begin.assign(static_cast<size_t>(lp.num_rows) + 1, 0);
  for (int r = 0; r < lp.num_rows; ++r)
    lp.row_begin[static_cast<size_t>(r) + 1] =
        lp.row_begin[static_cast<size_t>(r)] + count[static_cast<size_t>(r) + 1];
  lp.col_index.resize(m.entry_row.size());
  lp.value.resize(m.entry_row.size());
  std::vector<int32_t> next(lp.row_begin.begin(), lp.row_begin.end() - 1);
  for (int c = 0; c < lp.num_cols; ++c)
    for (int32_t k = m.col_begin[static_cast<size_t>(c)];
         k < m.col_begin[static_cast<size_t>(c) + 1]; ++k) {
      const int32_t r = m.entry_row[static_cast<size_t>(k)];
      const int32_t slot = next[static_cast<size_t>(r)]++;
      lp.col_index[static_cast<size_t>(slot)] = c;
      lp.value[static_cast<size_t>(slot)] = m.entry_value[static_cast<size_t>(k)];
    }

  if (integral) integral->assign(m.col_integral.begin(), m.col_integral.end());
  return lp;
}

}  // namespace rebalance
