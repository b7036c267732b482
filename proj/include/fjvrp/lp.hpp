#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fjvrp/errors.hpp"

namespace fjvrp {

inline constexpr double kFeasTol = 1e-9;  // feasibility tolerance
inline constexpr double kOptTol = 1e-9;   // reduced-cost tolerance

// One linear row: a . x (= or <=) b.
struct LinearRow {
  std::vector<double> a;
  double b = 0.0;
};

// A cut is an extra <= row over the structural variables.
using CutRow = LinearRow;

// min c.x subject to eq_rows (A x = b), le_rows (C x <= d), x in [0,1]^n.
struct LpProblem {
  int var_count = 0;
  std::vector<double> objective;
  std::vector<LinearRow> eq_rows;
  std::vector<LinearRow> le_rows;
};

// What a tableau column means in terms of the structural variables.
// structural j: the variable x_j itself
// upper_bound_slack j: t_j = 1 - x_j        (row x_j + t_j = 1)
// le_slack r: s_r = d_r - C_r . x           (row C_r . x + s_r = d_r)
enum class ColKind { structural, upper_bound_slack, le_slack };

struct ColDef {
  ColKind kind = ColKind::structural;
  int ref = 0;  // variable index or le-row index
};

// Final simplex tableau. Basic columns form an exact identity submatrix:
// column basis[i] is 1 in row i and 0 elsewhere.
struct SimplexTableau {
  std::vector<std::vector<double>> rows;  // t_ij per constraint
  std::vector<double> rhs;                // x_Bi, >= -kFeasTol
  std::vector<int> basis;                 // basic column of each row
  std::vector<ColDef> cols;
  // col_integral[j]: column j takes an integer value at every point whose
  // structural coordinates are binary. True for variables and their bound
  // slacks; true for a <=-row slack only when the row's data is integral.
  std::vector<char> col_integral;
  double objective_value = 0.0;
  int var_count = 0;

  int col_count() const { return static_cast<int>(cols.size()); }
  int row_count() const { return static_cast<int>(rows.size()); }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> values;  // structural variables, in [0,1]
  double objective = 0.0;
  SimplexTableau tableau;
  LpProblem problem;  // the problem actually solved, appended cuts included
};

inline bool row_is_integral(const LinearRow& row) {
  for (double v : row.a)
    if (std::floor(v) != v) return false;
  return std::floor(row.b) == row.b;
}

namespace detail {

// Dense tableau simplex over the all-nonnegative standard form
//   x_j + t_j = 1           (one row per variable)
//   A x      = b            (artificials in phase one)
//   C x + s  = d            (artificial when d < 0)
// Every nonbasic variable sits at zero, which keeps the cut algebra of the
// integer stage in the textbook setting.
class Simplex {
 public:
  explicit Simplex(const LpProblem& p) : problem_(p) { build(); }

  // Restores solver state from a previously returned solution so a cut can
  // be appended and reoptimized with the dual simplex.
  explicit Simplex(const LpSolution& sol)
      : problem_(sol.problem),
        tab_(sol.tableau.rows),
        rhs_(sol.tableau.rhs),
        basis_(sol.tableau.basis),
        cols_(sol.tableau.cols) {}

  LpStatus solve() {
    if (first_artificial_ >= 0) {
      std::vector<double> phase1(col_limit(), 0.0);
      for (int j = first_artificial_; j < col_limit(); ++j) phase1[j] = 1.0;
      reduce_costs(phase1);
      if (primal_loop() == LpStatus::unbounded)
        throw Error("simplex: phase one unbounded");
      if (obj_ > 1e-7) return LpStatus::infeasible;
      drop_artificials();
    }
    reduce_costs(structural_costs());
    return primal_loop();
  }

  LpStatus add_cut_and_reoptimize(const CutRow& cut) {
    problem_.le_rows.push_back(cut);
    const int slack = col_limit();
    for (auto& row : tab_) row.push_back(0.0);
    cols_.push_back({ColKind::le_slack,
                     static_cast<int>(problem_.le_rows.size()) - 1});

    // Express the new row in terms of the current basis.
    std::vector<double> row(col_limit(), 0.0);
    for (int j = 0; j < problem_.var_count; ++j) row[j] = cut.a[j];
    row[slack] = 1.0;
    double b = cut.b;
    for (int r = 0; r < row_count(); ++r) {
      double alpha = row[basis_[r]];
      if (alpha == 0.0) continue;
      for (int j = 0; j < col_limit(); ++j) row[j] -= alpha * tab_[r][j];
      b -= alpha * rhs_[r];
      row[basis_[r]] = 0.0;
    }
    row[slack] = 1.0;
    tab_.push_back(std::move(row));
    rhs_.push_back(b);
    basis_.push_back(slack);

    reduce_costs(structural_costs());
    return dual_loop();
  }

  LpSolution extract(LpStatus status) const {
    LpSolution sol;
    sol.status = status;
    sol.problem = problem_;
    if (status != LpStatus::optimal) {
      sol.objective = std::numeric_limits<double>::infinity();
      return sol;
    }
    sol.values.assign(problem_.var_count, 0.0);
    for (int r = 0; r < row_count(); ++r)
      if (basis_[r] < problem_.var_count)
        sol.values[basis_[r]] = std::clamp(rhs_[r], 0.0, 1.0);
    sol.objective = 0.0;
    for (int j = 0; j < problem_.var_count; ++j)
      sol.objective += problem_.objective[j] * sol.values[j];
    sol.tableau.rows = tab_;
    sol.tableau.rhs = rhs_;
    sol.tableau.basis = basis_;
    sol.tableau.cols = cols_;
    sol.tableau.objective_value = sol.objective;
    sol.tableau.var_count = problem_.var_count;
    sol.tableau.col_integral.reserve(cols_.size());
    for (const ColDef& def : cols_)
      sol.tableau.col_integral.push_back(
          def.kind == ColKind::le_slack
              ? row_is_integral(problem_.le_rows[def.ref])
              : 1);
    return sol;
  }

 private:
  LpProblem problem_;
  std::vector<std::vector<double>> tab_;
  std::vector<double> rhs_;
  std::vector<int> basis_;
  std::vector<ColDef> cols_;
  std::vector<double> cost_;  // reduced costs for the current basis
  double obj_ = 0.0;
  int first_artificial_ = -1;  // -1 once artificials are gone
  long degenerate_ = 0;
  bool bland_ = false;

  int row_count() const { return static_cast<int>(tab_.size()); }
  // Real columns; artificials live in [first_artificial_, tab row size).
  int col_limit() const { return static_cast<int>(tab_.empty() ? cols_.size() : tab_[0].size()); }

  void build() {
    const int n = problem_.var_count;
    if (n <= 0) throw Error("LpProblem: var_count must be positive");
    if (static_cast<int>(problem_.objective.size()) != n)
      throw Error("LpProblem: objective length mismatch");
    for (const auto& row : problem_.eq_rows)
      if (static_cast<int>(row.a.size()) != n || !std::isfinite(row.b))
        throw Error("LpProblem: malformed equality row");
    for (const auto& row : problem_.le_rows)
      if (static_cast<int>(row.a.size()) != n || !std::isfinite(row.b))
        throw Error("LpProblem: malformed inequality row");

    const int n_eq = static_cast<int>(problem_.eq_rows.size());
    const int n_le = static_cast<int>(problem_.le_rows.size());
    const int n_real = 2 * n + n_le;

    cols_.reserve(n_real);
    for (int j = 0; j < n; ++j) cols_.push_back({ColKind::structural, j});
    for (int j = 0; j < n; ++j) cols_.push_back({ColKind::upper_bound_slack, j});
    for (int r = 0; r < n_le; ++r) cols_.push_back({ColKind::le_slack, r});

    int artificials = n_eq;
    for (const auto& row : problem_.le_rows)
      if (row.b < 0.0) ++artificials;
    const int width = n_real + artificials;
    if (artificials > 0) first_artificial_ = n_real;

    int next_artificial = n_real;
    auto add_row = [&](std::vector<double> row, double b, int basic) {
      tab_.push_back(std::move(row));
      rhs_.push_back(b);
      basis_.push_back(basic);
    };

    for (int j = 0; j < n; ++j) {  // x_j + t_j = 1
      std::vector<double> row(width, 0.0);
      row[j] = 1.0;
      row[n + j] = 1.0;
      add_row(std::move(row), 1.0, n + j);
    }
    for (int e = 0; e < n_eq; ++e) {
      const auto& src = problem_.eq_rows[e];
      double sign = src.b < 0.0 ? -1.0 : 1.0;
      std::vector<double> row(width, 0.0);
      for (int j = 0; j < n; ++j) row[j] = sign * src.a[j];
      row[next_artificial] = 1.0;
      add_row(std::move(row), sign * src.b, next_artificial);
      ++next_artificial;
    }
    for (int r = 0; r < n_le; ++r) {
      const auto& src = problem_.le_rows[r];
      double sign = src.b < 0.0 ? -1.0 : 1.0;
      std::vector<double> row(width, 0.0);
      for (int j = 0; j < n; ++j) row[j] = sign * src.a[j];
      row[2 * n + r] = sign;
      if (sign < 0.0) {
        row[next_artificial] = 1.0;
        add_row(std::move(row), -src.b, next_artificial);
        ++next_artificial;
      } else {
        add_row(std::move(row), src.b, 2 * n + r);
      }
    }
  }

  std::vector<double> structural_costs() const {
    std::vector<double> c(col_limit(), 0.0);
    for (int j = 0; j < problem_.var_count; ++j) c[j] = problem_.objective[j];
    return c;
  }

  // cost_[j] = c_j - c_B . T[:,j]; obj_ = c_B . rhs
  void reduce_costs(const std::vector<double>& c) {
    cost_ = c;
    obj_ = 0.0;
    for (int r = 0; r < row_count(); ++r) {
      double cb = c[basis_[r]];
      if (cb == 0.0) continue;
      obj_ += cb * rhs_[r];
      for (int j = 0; j < col_limit(); ++j) cost_[j] -= cb * tab_[r][j];
    }
    for (int r = 0; r < row_count(); ++r) cost_[basis_[r]] = 0.0;
  }

  void pivot(int r, int c) {
    auto& row = tab_[r];
    const double piv = row[c];
    for (double& v : row) v /= piv;
    rhs_[r] /= piv;
    row[c] = 1.0;
    for (int k = 0; k < row_count(); ++k) {
      if (k == r) continue;
      double alpha = tab_[k][c];
      if (alpha == 0.0) continue;
      auto& other = tab_[k];
      for (int j = 0; j < col_limit(); ++j) other[j] -= alpha * row[j];
      rhs_[k] -= alpha * rhs_[r];
      other[c] = 0.0;
    }
    double cc = cost_[c];
    if (cc != 0.0) {
      for (int j = 0; j < col_limit(); ++j) cost_[j] -= cc * row[j];
      obj_ += cc * rhs_[r];
      cost_[c] = 0.0;
    }
    basis_[r] = c;
  }

  long pivot_budget() const {
    return 50000 + 200L * (row_count() + col_limit());
  }

  int choose_entering() const {
    int best = -1;
    double best_cost = -kOptTol;
    for (int j = 0; j < col_limit(); ++j) {
      if (first_artificial_ >= 0 && j >= first_artificial_) break;
      if (cost_[j] < best_cost) {
        best = j;
        best_cost = cost_[j];
        if (bland_) break;  // first eligible column
      }
    }
    return best;
  }

  // Lowest ratio; ties go to the smallest basic variable index, which makes
  // the leaving rule Bland-compatible.
  int ratio_test(int c) const {
    int best = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < row_count(); ++r) {
      double denom = tab_[r][c];
      if (denom <= kFeasTol) continue;
      double ratio = rhs_[r] / denom;
      if (best < 0 || ratio < best_ratio - kFeasTol ||
          (ratio < best_ratio + kFeasTol && basis_[r] < basis_[best])) {
        best = r;
        best_ratio = ratio;
      }
    }
    return best;
  }

  LpStatus primal_loop() {
    const long budget = pivot_budget();
    const long bland_after = 3L * std::max(1, problem_.var_count);
    for (long it = 0; it < budget; ++it) {
      int c = choose_entering();
      if (c < 0) return LpStatus::optimal;
      int r = ratio_test(c);
      if (r < 0) return LpStatus::unbounded;
      if (rhs_[r] <= kFeasTol && ++degenerate_ > bland_after) bland_ = true;
      pivot(r, c);
    }
    throw Error("simplex: pivot budget exhausted");
  }

  LpStatus dual_loop() {
    const long budget = pivot_budget();
    for (long it = 0; it < budget; ++it) {
      int r = -1;
      for (int k = 0; k < row_count(); ++k)
        if (rhs_[k] < -kFeasTol && (r < 0 || rhs_[k] < rhs_[r])) r = k;
      if (r < 0) return LpStatus::optimal;
      int c = -1;
      double best_ratio = 0.0;
      for (int j = 0; j < col_limit(); ++j) {
        double denom = tab_[r][j];
        if (denom >= -kFeasTol) continue;
        double ratio = cost_[j] / -denom;
        if (c < 0 || ratio < best_ratio - kFeasTol) {
          c = j;
          best_ratio = ratio;
        }
      }
      if (c < 0) return LpStatus::infeasible;  // the cut empties the region
      pivot(r, c);
    }
    throw Error("simplex: dual pivot budget exhausted");
  }

  // Phase one done: pivot artificials out of the basis or drop the rows
  // they prove redundant, then cut the artificial columns off.
  void drop_artificials() {
    for (int r = 0; r < row_count(); ++r) {
      if (basis_[r] < first_artificial_) continue;
      int c = -1;
      double best = 1e-7;
      for (int j = 0; j < first_artificial_; ++j)
        if (std::abs(tab_[r][j]) > best) {
          best = std::abs(tab_[r][j]);
          c = j;
        }
      if (c >= 0) pivot(r, c);
    }
    for (int r = row_count(); r-- > 0;) {
      if (basis_[r] < first_artificial_) continue;
      tab_.erase(tab_.begin() + r);  // all-zero row: redundant constraint
      rhs_.erase(rhs_.begin() + r);
      basis_.erase(basis_.begin() + r);
    }
    for (auto& row : tab_) row.resize(first_artificial_);
    first_artificial_ = -1;
  }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

// Deterministic: fixed entering/leaving tie rules mean the same problem
// always lands on the same basis.
inline LpSolution solve_lp(const LpProblem& p) {
  detail::Simplex s(p);
  return s.extract(s.solve());
}

// Warm restart: append one violated cut to an optimal solution and
// reoptimize with the dual simplex. Equivalent to solving problem+cut from
// scratch, only cheaper.
inline LpSolution resolve_with_cut(const LpSolution& sol, const CutRow& cut) {
  if (sol.status != LpStatus::optimal)
    throw Error("resolve_with_cut: starting solution must be optimal");
  if (static_cast<int>(cut.a.size()) != sol.problem.var_count)
    throw Error("resolve_with_cut: cut width mismatch");
  if (detail::dot(cut.a, sol.values) <= cut.b + kFeasTol)
    throw CutNotViolated();
  detail::Simplex s(sol);
  return s.extract(s.add_cut_and_reoptimize(cut));
}

}  // namespace fjvrp
