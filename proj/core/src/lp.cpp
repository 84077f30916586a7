#include "rebalance/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

namespace rebalance {

const char* lp_status_name(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "?";
}

namespace {

constexpr double kInf = LpProblem::kInf;
constexpr double kPivotTol = 1e-8;   // smallest usable pivot magnitude
constexpr double kSingularTol = 1e-10;
constexpr double kDegenStep = 1e-12;
constexpr double kEtaDropTol = 1e-13;

// One elementary column transform of the basis inverse (product form).
struct Eta {
  int32_t pivot;
  // Sparse transformed column, pre-inverted: value 1/a_p at the pivot row,
  // -a_i/a_p elsewhere.
  std::vector<std::pair<int32_t, double>> entries;
};

// The working state of one solve: scaled matrix, extended bounds over
// structural + slack columns, and the eta-file basis factorization.
class Worker {
 public:
  Worker(const LpProblem& p, const LpOptions& opt, const std::vector<double>& col_lb,
         const std::vector<double>& col_ub)
      : p_(p), opt_(opt), m_(p.num_rows), n_(p.num_cols), total_(m_ + n_) {
    row_scale_.assign(static_cast<size_t>(m_), 1.0);
    if (opt_.scale) {
      for (int r = 0; r < m_; ++r) {
        double mx = 0.0;
        for (int32_t k = p_.row_begin[static_cast<size_t>(r)];
             k < p_.row_begin[static_cast<size_t>(r) + 1]; ++k)
          mx = std::max(mx, std::fabs(p_.value[static_cast<size_t>(k)]));
        // Powers of two keep the scaling exact.
        if (mx > 0.0) row_scale_[static_cast<size_t>(r)] = std::exp2(-std::ilogb(mx));
      }
    }

    // Column-wise copy of the scaled matrix.
    col_begin_.assign(static_cast<size_t>(n_) + 1, 0);
    std::vector<int32_t> count(static_cast<size_t>(n_) + 1, 0);
    for (int32_t c : p_.col_index) ++count[static_cast<size_t>(c) + 1];
    for (int c = 0; c < n_; ++c)
      col_begin_[static_cast<size_t>(c) + 1] =
          col_begin_[static_cast<size_t>(c)] + count[static_cast<size_t>(c) + 1];
    row_idx_.resize(p_.col_index.size());
    val_.resize(p_.col_index.size());
    std::vector<int32_t> next(col_begin_.begin(), col_begin_.end() - 1);
    for (int r = 0; r < m_; ++r)
      for (int32_t k = p_.row_begin[static_cast<size_t>(r)];
           k < p_.row_begin[static_cast<size_t>(r) + 1]; ++k) {
        const int32_t c = p_.col_index[static_cast<size_t>(k)];
        const int32_t slot = next[static_cast<size_t>(c)]++;
        row_idx_[static_cast<size_t>(slot)] = r;
        val_[static_cast<size_t>(slot)] =
            p_.value[static_cast<size_t>(k)] * row_scale_[static_cast<size_t>(r)];
      }

    lb_.resize(static_cast<size_t>(total_));
    ub_.resize(static_cast<size_t>(total_));
    cost_.assign(static_cast<size_t>(total_), 0.0);
    for (int j = 0; j < n_; ++j) {
      lb_[static_cast<size_t>(j)] = col_lb[static_cast<size_t>(j)];
      ub_[static_cast<size_t>(j)] = col_ub[static_cast<size_t>(j)];
      cost_[static_cast<size_t>(j)] = p_.objective[static_cast<size_t>(j)];
    }
    for (int i = 0; i < m_; ++i) {
      const double s = row_scale_[static_cast<size_t>(i)];
      lb_[static_cast<size_t>(n_ + i)] =
          p_.row_lb[static_cast<size_t>(i)] == -kInf ? -kInf : p_.row_lb[static_cast<size_t>(i)] * s;
      ub_[static_cast<size_t>(i) + n_] =
          p_.row_ub[static_cast<size_t>(i)] == kInf ? kInf : p_.row_ub[static_cast<size_t>(i)] * s;
    }

    pos_in_basis_.assign(static_cast<size_t>(total_), -1);
    at_upper_.assign(static_cast<size_t>(total_), 0);
    basis_.resize(static_cast<size_t>(m_));
    xb_.assign(static_cast<size_t>(m_), 0.0);
    base_diag_.assign(static_cast<size_t>(m_), 1.0);
    work_.assign(static_cast<size_t>(m_), 0.0);
    y_.assign(static_cast<size_t>(m_), 0.0);
    cb_.assign(static_cast<size_t>(m_), 0.0);
    mark_.assign(static_cast<size_t>(m_), 0);
  }

  LpResult solve(std::vector<int>& basis_io, std::vector<uint8_t>& upper_io, bool warm);

 private:
  const LpProblem& p_;
  const LpOptions& opt_;
  int m_, n_, total_;

  std::vector<double> row_scale_;
  std::vector<int32_t> col_begin_, row_idx_;
  std::vector<double> val_;
  std::vector<double> lb_, ub_, cost_;

  std::vector<int> basis_;          // column basic at row position r
  std::vector<int> pos_in_basis_;   // inverse map, -1 when nonbasic
  std::vector<uint8_t> at_upper_;   // nonbasic rest side
  std::vector<double> xb_;          // basic values (row-position order)
  std::vector<double> base_diag_;   // diagonal start of the factorization
  std::vector<Eta> letas_;          // refactorization, lower part (forward)
  std::vector<Eta> uetas_;          // refactorization, upper part (backward)
  std::vector<Eta> etas_;           // pivot updates since the last refactor
  int update_etas_ = 0;

  std::vector<double> work_, y_, cb_;
  std::vector<char> mark_;    // scratch row flags for pattern tracking
  std::vector<double> rvals_; // elimination scratch, lazily sized
  std::vector<char> rmark_;

  // Last-refactorization fill statistics, reported through LpOptions::log.
  int stat_peeled_ = 0, stat_kernel_ = 0, stat_dropped_ = 0;
  size_t stat_entries_ = 0;

  void log_state(long long iter, bool phase1, double measure) const {
    if (!opt_.log) return;
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "iter=%lld phase=%d %s=%.8g peeled=%d kernel=%d dropped=%d "
                  "eta_entries=%zu file=%zu",
                  iter, phase1 ? 1 : 2, phase1 ? "infeas" : "obj", measure, stat_peeled_,
                  stat_kernel_, stat_dropped_, stat_entries_, etas_.size());
    opt_.log(buf);
  }

  double ftol() const { return opt_.feasibility_tol; }
  double dtol() const { return opt_.optimality_tol; }

  bool is_slack(int j) const { return j >= n_; }

  double nonbasic_value(int j) const {
    const double l = lb_[static_cast<size_t>(j)], u = ub_[static_cast<size_t>(j)];
    if (at_upper_[static_cast<size_t>(j)]) return u < kInf ? u : (l > -kInf ? l : 0.0);
    return l > -kInf ? l : (u < kInf ? u : 0.0);
  }

  static void apply_eta(const Eta& e, std::vector<double>& x) {
    const double t = x[static_cast<size_t>(e.pivot)];
    if (t == 0.0) return;
    x[static_cast<size_t>(e.pivot)] = 0.0;
    for (const auto& [row, v] : e.entries) x[static_cast<size_t>(row)] += v * t;
  }

  static void apply_eta_transposed(const Eta& e, std::vector<double>& y) {
    double t = 0.0;
    for (const auto& [row, v] : e.entries) t += v * y[static_cast<size_t>(row)];
    y[static_cast<size_t>(e.pivot)] = t;
  }

  // x <- B^{-1} x, where x arrives dense.  The factorization applies as
  // start diagonal, then the lower file forward, the upper file backward,
  // and finally the update etas accumulated since the last refactor.
  void ftran(std::vector<double>& x) const {
    for (int r = 0; r < m_; ++r)
      if (x[static_cast<size_t>(r)] != 0.0) x[static_cast<size_t>(r)] /= base_diag_[static_cast<size_t>(r)];
    for (const Eta& e : letas_) apply_eta(e, x);
    for (auto it = uetas_.rbegin(); it != uetas_.rend(); ++it) apply_eta(*it, x);
    for (const Eta& e : etas_) apply_eta(e, x);
  }

  // ftran keeping track of the touched rows, so the ratio test, the basic
  // update, and the new eta walk only the column's actual support instead
  // of every row.  `pat` comes back duplicate-free (mark_ is scratch).
  void ftran_tracked(std::vector<double>& x, std::vector<int32_t>& pat) {
    for (const int32_t r : pat) x[static_cast<size_t>(r)] /= base_diag_[static_cast<size_t>(r)];
    auto apply = [&](const Eta& e) {
      const double t = x[static_cast<size_t>(e.pivot)];
      if (t == 0.0) return;
      x[static_cast<size_t>(e.pivot)] = 0.0;
      for (const auto& [row, v] : e.entries) {
        if (!mark_[static_cast<size_t>(row)]) {
          mark_[static_cast<size_t>(row)] = 1;
          pat.push_back(row);
        }
        x[static_cast<size_t>(row)] += v * t;
      }
    };
    for (const Eta& e : letas_) apply(e);
    for (auto it = uetas_.rbegin(); it != uetas_.rend(); ++it) apply(*it);
    for (const Eta& e : etas_) apply(e);
  }

  // Sparse load of extended column j into the scratch column; resets the
  // previous pattern first.
  void load_column_tracked(int j, std::vector<double>& x, std::vector<int32_t>& pat) {
    for (const int32_t r : pat) {
      x[static_cast<size_t>(r)] = 0.0;
      mark_[static_cast<size_t>(r)] = 0;
    }
    pat.clear();
    if (is_slack(j)) {
      const int32_t r = j - n_;
      x[static_cast<size_t>(r)] = -1.0;
      mark_[static_cast<size_t>(r)] = 1;
      pat.push_back(r);
      return;
    }
    for (int32_t k = col_begin_[static_cast<size_t>(j)]; k < col_begin_[static_cast<size_t>(j) + 1];
         ++k) {
      const int32_t r = row_idx_[static_cast<size_t>(k)];
      x[static_cast<size_t>(r)] = val_[static_cast<size_t>(k)];
      mark_[static_cast<size_t>(r)] = 1;
      pat.push_back(r);
    }
  }

  // y <- B^{-T} y: the ftran sequence transposed and reversed.
  void btran(std::vector<double>& y) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) apply_eta_transposed(*it, y);
    for (const Eta& e : uetas_) apply_eta_transposed(e, y);
    for (auto it = letas_.rbegin(); it != letas_.rend(); ++it) apply_eta_transposed(*it, y);
    for (int r = 0; r < m_; ++r) y[static_cast<size_t>(r)] /= base_diag_[static_cast<size_t>(r)];
  }

  // Dense copy of extended column j (scaled space).
  void load_column(int j, std::vector<double>& x) const {
    std::fill(x.begin(), x.end(), 0.0);
    if (is_slack(j)) {
      x[static_cast<size_t>(j - n_)] = -1.0;
      return;
    }
    for (int32_t k = col_begin_[static_cast<size_t>(j)]; k < col_begin_[static_cast<size_t>(j) + 1]; ++k)
      x[static_cast<size_t>(row_idx_[static_cast<size_t>(k)])] = val_[static_cast<size_t>(k)];
  }

  double column_dot(int j, const std::vector<double>& y) const {
    if (is_slack(j)) return -y[static_cast<size_t>(j - n_)];
    double s = 0.0;
    for (int32_t k = col_begin_[static_cast<size_t>(j)]; k < col_begin_[static_cast<size_t>(j) + 1]; ++k)
      s += val_[static_cast<size_t>(k)] * y[static_cast<size_t>(row_idx_[static_cast<size_t>(k)])];
    return s;
  }

  void push_eta(int pivot_row, const std::vector<double>& alpha) {
    Eta e;
    e.pivot = pivot_row;
    const double ap = alpha[static_cast<size_t>(pivot_row)];
    e.entries.reserve(8);
    e.entries.emplace_back(pivot_row, 1.0 / ap);
    for (int r = 0; r < m_; ++r) {
      if (r == pivot_row) continue;
      const double a = alpha[static_cast<size_t>(r)];
      if (std::fabs(a) > kEtaDropTol) e.entries.emplace_back(r, -a / ap);
    }
    etas_.push_back(std::move(e));
  }

  void push_eta(int pivot_row, const std::vector<double>& alpha,
                const std::vector<int32_t>& pat) {
    Eta e;
    e.pivot = pivot_row;
    const double ap = alpha[static_cast<size_t>(pivot_row)];
    e.entries.reserve(pat.size());
    e.entries.emplace_back(pivot_row, 1.0 / ap);
    for (const int32_t r : pat) {
      if (r == pivot_row) continue;
      const double a = alpha[static_cast<size_t>(r)];
      if (std::fabs(a) > kEtaDropTol) e.entries.emplace_back(r, -a / ap);
    }
    etas_.push_back(std::move(e));
  }

  // Eta straight from basis column `j` pivoting on `pivot_row`, valid only
  // when the column's pattern avoids every earlier eta pivot row: then the
  // transformed column equals the raw column over the start diagonal, and
  // the product form picks up no fill at all.
  void push_peeled_eta(int pivot_row, int j) {
    const int32_t kb = col_begin_[static_cast<size_t>(j)];
    const int32_t ke = col_begin_[static_cast<size_t>(j) + 1];
    double ap = 0.0;
    for (int32_t k = kb; k < ke; ++k)
      if (row_idx_[static_cast<size_t>(k)] == pivot_row) {
        ap = val_[static_cast<size_t>(k)];  // an unpivoted row keeps diagonal 1
        break;
      }
    Eta e;
    e.pivot = pivot_row;
    e.entries.reserve(static_cast<size_t>(ke - kb));
    e.entries.emplace_back(pivot_row, 1.0 / ap);
    for (int32_t k = kb; k < ke; ++k) {
      const int32_t i = row_idx_[static_cast<size_t>(k)];
      if (i == pivot_row) continue;
      const double a = val_[static_cast<size_t>(k)] / base_diag_[static_cast<size_t>(i)];
      if (std::fabs(a) > kEtaDropTol) e.entries.emplace_back(i, -a / ap);
    }
    letas_.push_back(std::move(e));
  }

  // Rebuild the factorization from the current basic set.  Slack columns
  // pivot on their own row for free.  Structural columns go through row-
  // singleton peeling first: repeatedly pivoting a row covered by exactly
  // one remaining column yields an order in which every peeled column's
  // pattern avoids all earlier pivot rows, so its eta is the raw column and
  // the file stays as sparse as the basis itself (network-like bases peel
  // completely).  Whatever is left forms a kernel that is eliminated
  // explicitly with Markowitz-style fill control, emitting separate lower
  // and upper files; columns that turn out dependent are swapped out for
  // the leftover rows' slacks.
  void refactor() {
    letas_.clear();
    uetas_.clear();
    etas_.clear();
    update_etas_ = 0;
    base_diag_.assign(static_cast<size_t>(m_), 1.0);
    std::vector<char> pivoted(static_cast<size_t>(m_), 0);
    std::vector<int> structural;
    structural.reserve(static_cast<size_t>(m_));
    std::vector<int> new_basis(static_cast<size_t>(m_), -1);
    for (int r = 0; r < m_; ++r) {
      const int j = basis_[static_cast<size_t>(r)];
      if (is_slack(j)) {
        const int row = j - n_;
        base_diag_[static_cast<size_t>(row)] = -1.0;
        pivoted[static_cast<size_t>(row)] = 1;
        new_basis[static_cast<size_t>(row)] = j;
      } else {
        structural.push_back(j);
      }
    }

    // Row incidence of the structural basic columns.
    std::vector<int32_t> row_off(static_cast<size_t>(m_) + 1, 0);
    for (int j : structural)
      for (int32_t k = col_begin_[static_cast<size_t>(j)];
           k < col_begin_[static_cast<size_t>(j) + 1]; ++k)
        ++row_off[static_cast<size_t>(row_idx_[static_cast<size_t>(k)]) + 1];
    for (int r = 0; r < m_; ++r)
      row_off[static_cast<size_t>(r) + 1] += row_off[static_cast<size_t>(r)];
    std::vector<int32_t> inc_col(static_cast<size_t>(row_off[static_cast<size_t>(m_)]));
    std::vector<double> inc_val(inc_col.size());
    {
      std::vector<int32_t> cursor(row_off.begin(), row_off.end() - 1);
      for (int j : structural)
        for (int32_t k = col_begin_[static_cast<size_t>(j)];
             k < col_begin_[static_cast<size_t>(j) + 1]; ++k) {
          const int32_t slot = cursor[static_cast<size_t>(row_idx_[static_cast<size_t>(k)])]++;
          inc_col[static_cast<size_t>(slot)] = j;
          inc_val[static_cast<size_t>(slot)] = val_[static_cast<size_t>(k)];
        }
    }

    std::vector<int32_t> remaining(static_cast<size_t>(m_), 0);
    for (int j : structural)
      for (int32_t k = col_begin_[static_cast<size_t>(j)];
           k < col_begin_[static_cast<size_t>(j) + 1]; ++k) {
        const int32_t r = row_idx_[static_cast<size_t>(k)];
        if (!pivoted[static_cast<size_t>(r)]) ++remaining[static_cast<size_t>(r)];
      }
    std::vector<char> live(static_cast<size_t>(n_), 0);
    for (int j : structural) live[static_cast<size_t>(j)] = 1;

    std::vector<int32_t> singletons;
    for (int r = 0; r < m_; ++r)
      if (!pivoted[static_cast<size_t>(r)] && remaining[static_cast<size_t>(r)] == 1)
        singletons.push_back(r);
    while (!singletons.empty()) {
      const int32_t r = singletons.back();
      singletons.pop_back();
      if (pivoted[static_cast<size_t>(r)] || remaining[static_cast<size_t>(r)] != 1) continue;
      int j = -1;
      double a_rj = 0.0;
      for (int32_t k = row_off[static_cast<size_t>(r)]; k < row_off[static_cast<size_t>(r) + 1];
           ++k)
        if (live[static_cast<size_t>(inc_col[static_cast<size_t>(k)])]) {
          j = inc_col[static_cast<size_t>(k)];
          a_rj = inc_val[static_cast<size_t>(k)];
          break;
        }
      if (j < 0) continue;
      if (std::fabs(a_rj) <= kSingularTol) {
        remaining[static_cast<size_t>(r)] = 0;  // too small to pivot; leave j to pass 2
        continue;
      }
      push_peeled_eta(r, j);
      pivoted[static_cast<size_t>(r)] = 1;
      live[static_cast<size_t>(j)] = 0;
      new_basis[static_cast<size_t>(r)] = j;
      for (int32_t k = col_begin_[static_cast<size_t>(j)];
           k < col_begin_[static_cast<size_t>(j) + 1]; ++k) {
        const int32_t i = row_idx_[static_cast<size_t>(k)];
        if (pivoted[static_cast<size_t>(i)]) continue;
        if (--remaining[static_cast<size_t>(i)] == 1) singletons.push_back(i);
      }
    }

    std::vector<int> kernel;
    for (int j : structural)
      if (live[static_cast<size_t>(j)]) kernel.push_back(j);
    stat_peeled_ = static_cast<int>(structural.size() - kernel.size());
    stat_kernel_ = static_cast<int>(kernel.size());

    const std::vector<int> dropped = eliminate_kernel(kernel, pivoted, new_basis);

    stat_dropped_ = static_cast<int>(dropped.size());
    stat_entries_ = 0;
    for (const Eta& e : letas_) stat_entries_ += e.entries.size();
    for (const Eta& e : uetas_) stat_entries_ += e.entries.size();
    for (int j : dropped) {
      pos_in_basis_[static_cast<size_t>(j)] = -1;
      at_upper_[static_cast<size_t>(j)] =
          lb_[static_cast<size_t>(j)] > -kInf ? 0 : (ub_[static_cast<size_t>(j)] < kInf ? 1 : 0);
    }
    // Rows left without a pivot take their slack.  The lower file already
    // carries entries at these rows computed against a unit diagonal, so the
    // slack's -1 becomes an explicit trailing eta instead of a diagonal flip.
    for (int r = 0; r < m_; ++r)
      if (new_basis[static_cast<size_t>(r)] < 0) {
        new_basis[static_cast<size_t>(r)] = n_ + r;
        letas_.push_back(Eta{r, {{r, -1.0}}});
      }
    basis_ = std::move(new_basis);
    std::fill(pos_in_basis_.begin(), pos_in_basis_.end(), -1);
    for (int r = 0; r < m_; ++r) pos_in_basis_[static_cast<size_t>(basis_[static_cast<size_t>(r)])] = r;
  }

  // Explicit sparse elimination of the kernel columns left after peeling.
  // Pivots chosen Markowitz-style (fewest active entries first, thresholded
  // on magnitude) keep the fanned-out fill near the kernel's own sparsity.
  // Every pivot emits its lower eta from the column's current values; the
  // multipliers a column absorbed along the way become its upper eta when
  // the column itself is pivoted.  Returns the columns found dependent.
  std::vector<int> eliminate_kernel(const std::vector<int>& kernel, std::vector<char>& pivoted,
                                    std::vector<int>& new_basis) {
    std::vector<int> dropped;
    if (kernel.empty()) return dropped;
    const int K = static_cast<int>(kernel.size());
    if (rvals_.empty()) {
      rvals_.assign(static_cast<size_t>(m_), 0.0);
      rmark_.assign(static_cast<size_t>(m_), 0);
    }

    // Column values over the start diagonal; by the peeling invariant the
    // patterns avoid every peeled pivot row, so the remaining support is
    // active rows plus slack-pivoted ones.
    std::vector<std::vector<std::pair<int32_t, double>>> colv(static_cast<size_t>(K));
    std::vector<std::vector<std::pair<int32_t, double>>> ucol(static_cast<size_t>(K));
    std::vector<int> ccount(static_cast<size_t>(K), 0);
    std::vector<char> done(static_cast<size_t>(K), 0);
    std::vector<std::vector<int32_t>> rowlist(static_cast<size_t>(m_));
    for (int c = 0; c < K; ++c) {
      const int j = kernel[static_cast<size_t>(c)];
      auto& col = colv[static_cast<size_t>(c)];
      for (int32_t k = col_begin_[static_cast<size_t>(j)];
           k < col_begin_[static_cast<size_t>(j) + 1]; ++k) {
        const int32_t r = row_idx_[static_cast<size_t>(k)];
        col.emplace_back(r, val_[static_cast<size_t>(k)] / base_diag_[static_cast<size_t>(r)]);
        if (!pivoted[static_cast<size_t>(r)]) {
          ++ccount[static_cast<size_t>(c)];
          rowlist[static_cast<size_t>(r)].push_back(c);
        }
      }
    }

    std::set<std::pair<int, int>> pending;  // (active count, column)
    for (int c = 0; c < K; ++c) pending.insert({ccount[static_cast<size_t>(c)], c});

    std::vector<int32_t> added;
    while (!pending.empty()) {
      // Candidate scan: a few columns with the fewest active entries; each
      // proposes its best admissible row (largest-pivot threshold, then
      // shortest row).  Dependent columns surface here with no usable entry.
      int best_c = -1, best_r = -1;
      double best_ap = 0.0;
      long long best_score = 0;
      std::vector<int> inspected;
      for (auto it = pending.begin(); it != pending.end() && inspected.size() < 8; ++it)
        inspected.push_back(it->second);
      auto row_degree = [&](int32_t r) {
        // Drop references to finished columns so the degree stays honest.
        auto& list = rowlist[static_cast<size_t>(r)];
        list.erase(std::remove_if(list.begin(), list.end(),
                                  [&](int32_t c) { return done[static_cast<size_t>(c)]; }),
                   list.end());
        return static_cast<long long>(list.size());
      };
      for (const int c : inspected) {
        double colmax = 0.0;
        for (const auto& [r, v] : colv[static_cast<size_t>(c)])
          if (!pivoted[static_cast<size_t>(r)]) colmax = std::max(colmax, std::fabs(v));
        if (colmax <= kSingularTol) {
          pending.erase({ccount[static_cast<size_t>(c)], c});
          done[static_cast<size_t>(c)] = 1;
          dropped.push_back(kernel[static_cast<size_t>(c)]);
          continue;
        }
        for (const auto& [r, v] : colv[static_cast<size_t>(c)]) {
          if (pivoted[static_cast<size_t>(r)] || std::fabs(v) < 0.1 * colmax) continue;
          const long long score =
              static_cast<long long>(ccount[static_cast<size_t>(c)] - 1) * (row_degree(r) - 1);
          if (best_c < 0 || score < best_score) {
            best_score = score;
            best_c = c;
            best_r = r;
            best_ap = v;
          }
        }
        if (best_c >= 0 && best_score == 0) break;
      }
      if (best_c < 0) continue;  // inspected columns were all dependent

      const int c = best_c;
      const int32_t r = best_r;
      const double ap = best_ap;
      Eta low;
      low.pivot = r;
      low.entries.reserve(colv[static_cast<size_t>(c)].size());
      low.entries.emplace_back(r, 1.0 / ap);
      for (const auto& [i, v] : colv[static_cast<size_t>(c)])
        if (i != r && std::fabs(v) > kEtaDropTol) low.entries.emplace_back(i, -v / ap);
      letas_.push_back(std::move(low));
      if (!ucol[static_cast<size_t>(c)].empty()) {
        Eta up;
        up.pivot = r;
        up.entries.reserve(ucol[static_cast<size_t>(c)].size() + 1);
        up.entries.emplace_back(r, 1.0);
        for (const auto& [i, f] : ucol[static_cast<size_t>(c)]) up.entries.emplace_back(i, -f);
        uetas_.push_back(std::move(up));
      }
      pending.erase({ccount[static_cast<size_t>(c)], c});
      done[static_cast<size_t>(c)] = 1;
      pivoted[static_cast<size_t>(r)] = 1;
      new_basis[static_cast<size_t>(r)] = kernel[static_cast<size_t>(c)];

      // Schur update of every pending column with an entry at the pivot row.
      const std::vector<int32_t> touched = std::move(rowlist[static_cast<size_t>(r)]);
      rowlist[static_cast<size_t>(r)].clear();
      for (const int32_t tc : touched) {
        if (done[static_cast<size_t>(tc)]) continue;
        auto& col = colv[static_cast<size_t>(tc)];
        double at = 0.0;
        bool found = false;
        for (const auto& [i, v] : col)
          if (i == r) {
            at = v;
            found = true;
            break;
          }
        if (!found) continue;  // stale reference from an earlier cancellation
        const double f = at / ap;
        added.clear();
        for (const auto& [i, v] : col) {
          rvals_[static_cast<size_t>(i)] = v;
          rmark_[static_cast<size_t>(i)] = 1;
        }
        for (const auto& [i, v] : colv[static_cast<size_t>(c)]) {
          if (i == r) continue;
          if (!rmark_[static_cast<size_t>(i)]) {
            rmark_[static_cast<size_t>(i)] = 1;
            rvals_[static_cast<size_t>(i)] = 0.0;
            added.push_back(i);
          }
          rvals_[static_cast<size_t>(i)] -= f * v;
        }
        std::vector<std::pair<int32_t, double>> next;
        next.reserve(col.size() + added.size());
        int active = 0;
        auto keep = [&](int32_t i) {
          const double v = rvals_[static_cast<size_t>(i)];
          if (i == r || std::fabs(v) <= kEtaDropTol) return;
          next.emplace_back(i, v);
          if (!pivoted[static_cast<size_t>(i)]) ++active;
        };
        for (const auto& [i, v] : col) {
          keep(i);
          rmark_[static_cast<size_t>(i)] = 0;
        }
        for (const int32_t i : added) {
          keep(i);
          rmark_[static_cast<size_t>(i)] = 0;
          if (!pivoted[static_cast<size_t>(i)] &&
              std::fabs(rvals_[static_cast<size_t>(i)]) > kEtaDropTol)
            rowlist[static_cast<size_t>(i)].push_back(tc);
        }
        col = std::move(next);
        ucol[static_cast<size_t>(tc)].emplace_back(r, f);
        pending.erase({ccount[static_cast<size_t>(tc)], tc});
        ccount[static_cast<size_t>(tc)] = active;
        pending.insert({active, tc});
      }
    }
    return dropped;
  }

  // xb from scratch: B xb = -N x_N.
  void compute_xb() {
    std::fill(work_.begin(), work_.end(), 0.0);
    for (int j = 0; j < total_; ++j) {
      if (pos_in_basis_[static_cast<size_t>(j)] >= 0) continue;
      const double v = nonbasic_value(j);
      if (v == 0.0) continue;
      if (is_slack(j)) {
        work_[static_cast<size_t>(j - n_)] += v;
      } else {
        for (int32_t k = col_begin_[static_cast<size_t>(j)]; k < col_begin_[static_cast<size_t>(j) + 1]; ++k)
          work_[static_cast<size_t>(row_idx_[static_cast<size_t>(k)])] -=
              val_[static_cast<size_t>(k)] * v;
      }
    }
    ftran(work_);
    xb_ = work_;
  }

  double infeasibility(int r) const {
    const int j = basis_[static_cast<size_t>(r)];
    const double v = xb_[static_cast<size_t>(r)];
    if (v > ub_[static_cast<size_t>(j)]) return v - ub_[static_cast<size_t>(j)];
    if (v < lb_[static_cast<size_t>(j)]) return lb_[static_cast<size_t>(j)] - v;
    return 0.0;
  }

  void init_basis(const std::vector<int>& basis_io, const std::vector<uint8_t>& upper_io,
                  bool warm) {
    bool use_warm = warm && static_cast<int>(basis_io.size()) == m_ &&
                    static_cast<int>(upper_io.size()) == total_;
    if (use_warm) {
      std::vector<char> seen(static_cast<size_t>(total_), 0);
      for (int j : basis_io)
        if (j < 0 || j >= total_ || seen[static_cast<size_t>(j)]++) {
          use_warm = false;
          break;
        }
    }
    if (use_warm) {
      basis_ = basis_io;
      at_upper_ = upper_io;
      std::fill(pos_in_basis_.begin(), pos_in_basis_.end(), -1);
      for (int r = 0; r < m_; ++r) pos_in_basis_[static_cast<size_t>(basis_[static_cast<size_t>(r)])] = r;
      for (int j = 0; j < total_; ++j) {
        if (pos_in_basis_[static_cast<size_t>(j)] >= 0) continue;
        // A stored rest side may have become unavailable after a bound change.
        if (at_upper_[static_cast<size_t>(j)] && ub_[static_cast<size_t>(j)] == kInf)
          at_upper_[static_cast<size_t>(j)] = 0;
        if (!at_upper_[static_cast<size_t>(j)] && lb_[static_cast<size_t>(j)] == -kInf &&
            ub_[static_cast<size_t>(j)] < kInf)
          at_upper_[static_cast<size_t>(j)] = 1;
      }
    } else {
      for (int r = 0; r < m_; ++r) basis_[static_cast<size_t>(r)] = n_ + r;
      std::fill(pos_in_basis_.begin(), pos_in_basis_.end(), -1);
      for (int r = 0; r < m_; ++r) pos_in_basis_[static_cast<size_t>(n_ + r)] = r;
      for (int j = 0; j < total_; ++j)
        at_upper_[static_cast<size_t>(j)] =
            lb_[static_cast<size_t>(j)] > -kInf ? 0 : (ub_[static_cast<size_t>(j)] < kInf ? 1 : 0);
    }
  }

  LpResult finalize(LpStatus status, long long iterations);
};

LpResult Worker::solve(std::vector<int>& basis_io, std::vector<uint8_t>& upper_io, bool warm) {
  init_basis(basis_io, upper_io, warm);
  refactor();
  compute_xb();

  long long iter = 0;
  int stalled = 0;
  LpStatus status = LpStatus::IterationLimit;
  std::vector<double> alpha(static_cast<size_t>(m_), 0.0);
  std::vector<int32_t> alpha_pat;
  alpha_pat.reserve(static_cast<size_t>(m_));

  while (iter < opt_.iteration_limit) {
    ++iter;

    double infeas = 0.0;
    for (int r = 0; r < m_; ++r) {
      const double v = infeasibility(r);
      if (v > ftol()) infeas += v;
    }
    const bool phase1 = infeas > 0.0;

    // Dual vector of the current phase costs.
    for (int r = 0; r < m_; ++r) {
      if (phase1) {
        const int j = basis_[static_cast<size_t>(r)];
        const double v = xb_[static_cast<size_t>(r)];
        cb_[static_cast<size_t>(r)] =
            v > ub_[static_cast<size_t>(j)] + ftol() ? 1.0
            : (v < lb_[static_cast<size_t>(j)] - ftol() ? -1.0 : 0.0);
      } else {
        cb_[static_cast<size_t>(r)] = cost_[static_cast<size_t>(basis_[static_cast<size_t>(r)])];
      }
    }
    y_ = cb_;
    btran(y_);

    // Pricing: Dantzig by default, Bland when stalled.
    const bool bland = stalled >= opt_.stall_threshold;
    int enter = -1;
    int dir = 0;
    double best = dtol();
    for (int j = 0; j < total_; ++j) {
      if (pos_in_basis_[static_cast<size_t>(j)] >= 0) continue;
      if (lb_[static_cast<size_t>(j)] == ub_[static_cast<size_t>(j)]) continue;  // fixed
      const double d = (phase1 ? 0.0 : cost_[static_cast<size_t>(j)]) - column_dot(j, y_);
      int cand_dir = 0;
      if (at_upper_[static_cast<size_t>(j)]) {
        if (d > dtol()) cand_dir = -1;
      } else if (lb_[static_cast<size_t>(j)] == -kInf && ub_[static_cast<size_t>(j)] == kInf) {
        if (d < -dtol()) cand_dir = 1;
        else if (d > dtol()) cand_dir = -1;
      } else {
        if (d < -dtol()) cand_dir = 1;
      }
      if (cand_dir == 0) continue;
      if (bland) {
        enter = j;
        dir = cand_dir;
        break;
      }
      if (std::fabs(d) > best) {
        best = std::fabs(d);
        enter = j;
        dir = cand_dir;
      }
    }

    if (enter < 0) {
      status = phase1 ? LpStatus::Infeasible : LpStatus::Optimal;
      break;
    }

    load_column_tracked(enter, alpha, alpha_pat);
    ftran_tracked(alpha, alpha_pat);

    // Ratio test, pass 1: smallest blocking step with a feasibility cushion.
    const double cushion = bland ? 0.0 : ftol();
    double tmax = kInf;
    const double span = ub_[static_cast<size_t>(enter)] - lb_[static_cast<size_t>(enter)];
    if (span < kInf) tmax = span;
    for (const int32_t r : alpha_pat) {
      const double a = alpha[static_cast<size_t>(r)];
      if (std::fabs(a) <= kPivotTol) continue;
      const int j = basis_[static_cast<size_t>(r)];
      const double delta = -dir * a;
      const double v = xb_[static_cast<size_t>(r)];
      const double l = lb_[static_cast<size_t>(j)], u = ub_[static_cast<size_t>(j)];
      double cand = kInf;
      if (phase1 && v > u + ftol()) {
        if (delta < 0.0) cand = (v - u + cushion) / -delta;
      } else if (phase1 && v < l - ftol()) {
        if (delta > 0.0) cand = (l - v + cushion) / delta;
      } else if (delta > 0.0) {
        if (u < kInf) cand = (u - v + cushion) / delta;
      } else {
        if (l > -kInf) cand = (v - l + cushion) / -delta;
      }
      tmax = std::min(tmax, std::max(cand, 0.0));
    }

    if (tmax == kInf) {
      // A phase-1 descent direction always hits a slope change, so this
      // can only mean an unbounded relaxation.
      status = phase1 ? LpStatus::Infeasible : LpStatus::Unbounded;
      break;
    }

    // Pass 2: among blockers within the cushioned step, prefer the largest
    // pivot (lowest variable index under Bland's rule).
    int leave_pos = -1;
    double leave_pivot = 0.0;
    bool leave_to_upper = false;
    double t = tmax;
    for (const int32_t r : alpha_pat) {
      const double a = alpha[static_cast<size_t>(r)];
      if (std::fabs(a) <= kPivotTol) continue;
      const int j = basis_[static_cast<size_t>(r)];
      const double delta = -dir * a;
      const double v = xb_[static_cast<size_t>(r)];
      const double l = lb_[static_cast<size_t>(j)], u = ub_[static_cast<size_t>(j)];
      double cand = kInf;
      bool to_upper = false;
      if (phase1 && v > u + ftol()) {
        if (delta < 0.0) {
          cand = (v - u) / -delta;
          to_upper = true;
        }
      } else if (phase1 && v < l - ftol()) {
        if (delta > 0.0) cand = (l - v) / delta;
      } else if (delta > 0.0) {
        if (u < kInf) {
          cand = (u - v) / delta;
          to_upper = true;
        }
      } else {
        if (l > -kInf) cand = (v - l) / -delta;
      }
      if (cand > tmax) continue;
      if (bland) {
        if (leave_pos < 0 || j < basis_[static_cast<size_t>(leave_pos)]) {
          leave_pos = r;
          leave_pivot = a;
          leave_to_upper = to_upper;
          t = std::max(cand, 0.0);
        }
      } else if (std::fabs(a) > std::fabs(leave_pivot)) {
        leave_pos = r;
        leave_pivot = a;
        leave_to_upper = to_upper;
        t = std::max(cand, 0.0);
      }
    }

    if (leave_pos < 0) {
      // Bound flip: the entering variable crosses to its other bound.
      for (const int32_t r : alpha_pat) {
        const double a = alpha[static_cast<size_t>(r)];
        if (a != 0.0) xb_[static_cast<size_t>(r)] -= dir * span * a;
      }
      at_upper_[static_cast<size_t>(enter)] ^= 1;
      stalled = 0;
      continue;
    }

    // Pivot: entering moves by t, blockers shift, leaving rests at a bound.
    const double enter_value = nonbasic_value(enter) + dir * t;
    if (t != 0.0)
      for (const int32_t r : alpha_pat) {
        const double a = alpha[static_cast<size_t>(r)];
        if (a != 0.0) xb_[static_cast<size_t>(r)] -= dir * t * a;
      }
    const int leave = basis_[static_cast<size_t>(leave_pos)];
    at_upper_[static_cast<size_t>(leave)] = leave_to_upper ? 1 : 0;
    pos_in_basis_[static_cast<size_t>(leave)] = -1;
    basis_[static_cast<size_t>(leave_pos)] = enter;
    pos_in_basis_[static_cast<size_t>(enter)] = leave_pos;
    xb_[static_cast<size_t>(leave_pos)] = enter_value;
    push_eta(leave_pos, alpha, alpha_pat);
    ++update_etas_;

    stalled = t <= kDegenStep ? stalled + 1 : 0;

    if (update_etas_ >= opt_.refactor_interval) {
      refactor();
      compute_xb();
      if (opt_.log) {
        double measure = 0.0;
        if (phase1) {
          for (int r = 0; r < m_; ++r) measure += infeasibility(r);
        } else {
          for (int r = 0; r < m_; ++r)
            measure += cost_[static_cast<size_t>(basis_[static_cast<size_t>(r)])] *
                       xb_[static_cast<size_t>(r)];
          for (int j = 0; j < total_; ++j)
            if (pos_in_basis_[static_cast<size_t>(j)] < 0)
              measure += cost_[static_cast<size_t>(j)] * nonbasic_value(j);
        }
        log_state(iter, phase1, measure);
      }
    }
  }

  // Freshen the state so the reported point is as accurate as the basis.
  if (status == LpStatus::Optimal) {
    refactor();
    compute_xb();
  }
  LpResult res = finalize(status, iter);
  basis_io = basis_;
  upper_io = at_upper_;
  return res;
}

LpResult Worker::finalize(LpStatus status, long long iterations) {
  LpResult res;
  res.status = status;
  res.iterations = iterations;
  res.x.assign(static_cast<size_t>(n_), 0.0);
  for (int j = 0; j < n_; ++j)
    res.x[static_cast<size_t>(j)] =
        pos_in_basis_[static_cast<size_t>(j)] >= 0
            ? xb_[static_cast<size_t>(pos_in_basis_[static_cast<size_t>(j)])]
            : nonbasic_value(j);

  res.row_activity.assign(static_cast<size_t>(m_), 0.0);
  for (int r = 0; r < m_; ++r) {
    double s = 0.0;
    for (int32_t k = p_.row_begin[static_cast<size_t>(r)]; k < p_.row_begin[static_cast<size_t>(r) + 1]; ++k)
      s += p_.value[static_cast<size_t>(k)] * res.x[static_cast<size_t>(p_.col_index[static_cast<size_t>(k)])];
    res.row_activity[static_cast<size_t>(r)] = s;
  }

  res.objective = 0.0;
  for (int j = 0; j < n_; ++j)
    res.objective += p_.objective[static_cast<size_t>(j)] * res.x[static_cast<size_t>(j)];

  // Duals of the final basis (phase-2 costs; they are meaningful only for
  // an optimal status but cheap to report always).
  for (int r = 0; r < m_; ++r)
    cb_[static_cast<size_t>(r)] = cost_[static_cast<size_t>(basis_[static_cast<size_t>(r)])];
  y_ = cb_;
  btran(y_);
  res.dual.assign(static_cast<size_t>(m_), 0.0);
  for (int r = 0; r < m_; ++r)
    res.dual[static_cast<size_t>(r)] = y_[static_cast<size_t>(r)] * row_scale_[static_cast<size_t>(r)];
  res.reduced_cost.assign(static_cast<size_t>(n_), 0.0);
  for (int j = 0; j < n_; ++j)
    res.reduced_cost[static_cast<size_t>(j)] = cost_[static_cast<size_t>(j)] - column_dot(j, y_);
  return res;
}

}  // namespace

SimplexSolver::SimplexSolver(LpProblem problem, LpOptions options)
    : problem_(std::move(problem)), options_(options) {}

LpResult SimplexSolver::run(const std::vector<double>& col_lb, const std::vector<double>& col_ub,
                            bool warm) {
  Worker worker(problem_, options_, col_lb, col_ub);
  LpResult res = worker.solve(basis_, nonbasic_at_upper_, warm && have_basis_);
  have_basis_ = res.status == LpStatus::Optimal || res.status == LpStatus::Infeasible;
  return res;
}

LpResult SimplexSolver::solve() { return run(problem_.col_lb, problem_.col_ub, have_basis_); }

LpResult SimplexSolver::resolve_with_bounds(const std::vector<double>& col_lb,
                                            const std::vector<double>& col_ub) {
  return run(col_lb, col_ub, true);
}

LpResult solve_lp(const LpProblem& problem, LpOptions options) {
  SimplexSolver solver(problem, options);
  return solver.solve();
}

}  // namespace rebalance
