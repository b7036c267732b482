#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <utility>
#include <vector>

#include "fjvrp/errors.hpp"
#include "fjvrp/lp.hpp"

namespace fjvrp {

// Deviation from an integer that still counts as integral.
inline constexpr double kIntTol = 1e-5;

// min c.x over x in {0,1}^var_count subject to the wrapped rows. The offset
// carries objective contributions of variables substituted out by fixings.
struct BipProblem {
  LpProblem lp;
  double objective_offset = 0.0;
};

enum class BipStatus { optimal, infeasible };

// Range of a <=-row's left side over the binary box: l_min sums the negative
// coefficients (set B-), l_max the positive ones (set B+).
struct RowBounds {
  double l_min = 0.0;
  double l_max = 0.0;
};

inline RowBounds row_bounds(const LinearRow& row) {
  RowBounds b;
  for (double a : row.a) {
    if (a < 0.0)
      b.l_min += a;
    else
      b.l_max += a;
  }
  return b;
}

inline bool is_integral(double v) {
  double f = v - std::floor(v);
  return f <= kIntTol || f >= 1.0 - kIntTol;
}

inline bool all_integral(const std::vector<double>& values) {
  for (double v : values)
    if (!is_integral(v)) return false;
  return true;
}

struct PreprocessResult {
  BipProblem problem;          // tightened rows; fixed columns zeroed out
  std::map<int, int> fixings;  // variable -> forced value
  BipStatus status = BipStatus::optimal;
};

// Bound-based reduction of the <=-rows, applied per row in the order
// infeasibility, redundancy, variable fixing, coefficient improvement, and
// looped to a fixpoint. Fixed variables are substituted into every row and
// the objective, so the binary feasible set is preserved exactly.
inline PreprocessResult preprocess(const BipProblem& p) {
  constexpr double eps = 1e-9;
  PreprocessResult res;
  res.problem = p;
  LpProblem& lp = res.problem.lp;

  std::vector<char> drop(lp.le_rows.size(), 0);
  auto fix_var = [&](int k, int v) {
    res.fixings[k] = v;
    res.problem.objective_offset += lp.objective[k] * v;
    lp.objective[k] = 0.0;
    for (auto& row : lp.eq_rows) {
      row.b -= row.a[k] * v;
      row.a[k] = 0.0;
    }
    for (auto& row : lp.le_rows) {
      row.b -= row.a[k] * v;
      row.a[k] = 0.0;
    }
  };

  bool changed = true;
  for (int pass = 0; changed; ++pass) {
    if (pass > 10000) throw Error("preprocess: no fixpoint");
    changed = false;
    for (std::size_t r = 0; r < lp.le_rows.size(); ++r) {
      if (drop[r]) continue;
      LinearRow& row = lp.le_rows[r];
      RowBounds b = row_bounds(row);

      if (b.l_min > row.b + eps) {  // even the laxest point violates the row
        res.status = BipStatus::infeasible;
        return res;
      }
      if (b.l_max <= row.b + eps) {  // even the tightest point satisfies it
        drop[r] = 1;
        changed = true;
        continue;
      }

      bool fixed = true;
      while (fixed) {
        fixed = false;
        for (int k = 0; k < lp.var_count; ++k) {
          double a = row.a[k];
          if (a > 0.0 && b.l_min + a > row.b + eps) {
            fix_var(k, 0);  // x_k = 1 would overflow the row
          } else if (a < 0.0 && b.l_min - a > row.b + eps) {
            fix_var(k, 1);  // x_k = 0 would overflow the row
          } else {
            continue;
          }
          changed = fixed = true;
          b = row_bounds(row);
          if (b.l_max <= row.b + eps) break;
        }
        if (b.l_max <= row.b + eps) {
          drop[r] = 1;
          break;
        }
      }
      if (drop[r]) continue;

      for (int k = 0; k < lp.var_count; ++k) {
        double a = row.a[k];
        if (a > 0.0 && a > b.l_max - row.b + eps) {
          // x_k = 0 leaves the row slack; shrinking a_k and b keeps the
          // x_k = 1 case identical and makes the relaxation tighter
          double delta = a - (b.l_max - row.b);
          row.a[k] -= delta;
          row.b -= delta;
          b = row_bounds(row);
          changed = true;
        } else if (a < 0.0 && a < row.b - b.l_max - eps) {
          row.a[k] = row.b - b.l_max;
          b = row_bounds(row);
          changed = true;
        }
      }
    }
  }

  std::vector<LinearRow> kept;
  for (std::size_t r = 0; r < lp.le_rows.size(); ++r)
    if (!drop[r]) kept.push_back(std::move(lp.le_rows[r]));
  lp.le_rows = std::move(kept);
  return res;
}

// Fractional cut in tableau-column space, derived from a source row by
// splitting every coefficient t_ij into floor + g_ij and the basic value
// into floor + f_i:  sum_j -g_ij x_j + u_i = -f_i.
struct GomoryCut {
  std::vector<double> neg_g;  // -g_ij per tableau column
  double neg_f = 0.0;         // -f_i; the slack u_i starts here, negative
  int source_row = -1;
};

namespace detail {

inline double snap_floor(double v) {
  double f = std::floor(v);
  if (v - f >= 1.0 - 1e-9) f += 1.0;  // v is numerically the next integer
  return f;
}

// The floor-and-round argument behind the cut needs every column whose
// floored coefficient is nonzero to be integer-valued at binary-feasible
// points; columns with t_ij in [0,1) only add a nonnegative g_ij term and
// may be continuous.
inline bool row_eligible_for_cut(const SimplexTableau& tab, int r) {
  for (int j = 0; j < tab.col_count(); ++j) {
    if (snap_floor(tab.rows[r][j]) != 0.0 && !tab.col_integral[j])
      return false;
  }
  return true;
}

}  // namespace detail

// Picks the eligible row whose basic value has the largest fractional part
// (ties to the lowest row index) and derives the cut from it.
inline GomoryCut gomory_cut_from(const SimplexTableau& tab) {
  int source = -1;
  double best_f = 0.0;
  for (int r = 0; r < tab.row_count(); ++r) {
    double f = tab.rhs[r] - std::floor(tab.rhs[r]);
    if (f <= kIntTol || f >= 1.0 - kIntTol) continue;
    if (f > best_f + 1e-12 && detail::row_eligible_for_cut(tab, r)) {
      source = r;
      best_f = f;
    }
  }
  if (source < 0) throw NoFractionalRow();

  GomoryCut cut;
  cut.source_row = source;
  cut.neg_f = -(tab.rhs[source] - std::floor(tab.rhs[source]));
  cut.neg_g.assign(tab.col_count(), 0.0);
  for (int j = 0; j < tab.col_count(); ++j) {
    double t = tab.rows[source][j];
    double g = t - detail::snap_floor(t);
    if (g < 0.0) g = 0.0;  // snapped across the integer
    cut.neg_g[j] = -g;
  }
  return cut;
}

// Rewrites a tableau-space cut over the structural variables by substituting
// each column's definition (t_j = 1 - x_j, s_r = d_r - C_r.x), yielding an
// ordinary <= row that can be appended to the problem.
inline CutRow densify_cut(const LpProblem& p, const SimplexTableau& tab,
                          const GomoryCut& cut) {
  CutRow out;
  out.a.assign(p.var_count, 0.0);
  out.b = cut.neg_f;
  for (int j = 0; j < tab.col_count(); ++j) {
    double g = -cut.neg_g[j];
    if (g == 0.0) continue;
    const ColDef& def = tab.cols[j];
    switch (def.kind) {
      case ColKind::structural:
        out.a[def.ref] -= g;
        break;
      case ColKind::upper_bound_slack:
        out.a[def.ref] += g;
        out.b += g;
        break;
      case ColKind::le_slack: {
        const LinearRow& src = p.le_rows[def.ref];
        for (int v = 0; v < p.var_count; ++v) out.a[v] += g * src.a[v];
        out.b += g * src.b;
        break;
      }
    }
  }
  return out;
}

struct BipParams {
  int max_cut_rounds = 10;
  double cut_improvement_tol = 1e-9;
  long rins_node_budget = 500;
  bool enable_rins = true;
  long node_limit = 2000000;       // safety valve; exceeding it throws
  std::ostream* trace = nullptr;   // one line per node when set
};

struct BipSolution {
  BipStatus status = BipStatus::infeasible;
  std::vector<int> values;
  double objective = std::numeric_limits<double>::infinity();
  long node_count = 0;  // branch-and-bound nodes popped
  long cut_count = 0;   // Gomory cuts appended at the root
};

std::vector<int> rins(const BipProblem& p, const std::vector<int>& incumbent,
                      const LpSolution& relaxation, long node_budget);

namespace detail {

struct SearchOutcome {
  bool proven = false;
  BipSolution sol;
};

inline double binary_objective(const BipProblem& p,
                               const std::vector<int>& x) {
  double obj = p.objective_offset;
  for (int j = 0; j < p.lp.var_count; ++j) obj += p.lp.objective[j] * x[j];
  return obj;
}

inline bool binary_feasible(const LpProblem& lp, const std::vector<int>& x) {
  constexpr double tol = 1e-7;
  for (const auto& row : lp.eq_rows) {
    double lhs = 0.0;
    for (int j = 0; j < lp.var_count; ++j) lhs += row.a[j] * x[j];
    if (std::abs(lhs - row.b) > tol * (1.0 + std::abs(row.b))) return false;
  }
  for (const auto& row : lp.le_rows) {
    double lhs = 0.0;
    for (int j = 0; j < lp.var_count; ++j) lhs += row.a[j] * x[j];
    if (lhs > row.b + tol * (1.0 + std::abs(row.b))) return false;
  }
  return true;
}

inline LpProblem apply_fixings(LpProblem lp,
                               const std::map<int, int>& fixings,
                               double* offset) {
  for (auto [k, v] : fixings) {
    *offset += lp.objective[k] * v;
    lp.objective[k] = 0.0;
    for (auto& row : lp.eq_rows) {
      row.b -= row.a[k] * v;
      row.a[k] = 0.0;
    }
    for (auto& row : lp.le_rows) {
      row.b -= row.a[k] * v;
      row.a[k] = 0.0;
    }
  }
  return lp;
}

SearchOutcome solve_bip_impl(const BipProblem& input, const BipParams& params);

}  // namespace detail

// Exact solve: preprocess, root relaxation, Gomory cut rounds, RINS at the
// first incumbent, best-bound branch-and-bound. Completely deterministic.
inline BipSolution solve_bip(const BipProblem& p, const BipParams& params = {}) {
  detail::SearchOutcome out = detail::solve_bip_impl(p, params);
  if (!out.proven)
    throw Error("solve_bip: node limit reached before optimality was proven");
  return out.sol;
}

namespace detail {

inline SearchOutcome solve_bip_impl(const BipProblem& input,
                                    const BipParams& params) {
  SearchOutcome out;
  PreprocessResult pre = preprocess(input);
  if (pre.status == BipStatus::infeasible) {
    out.proven = true;
    return out;
  }
  const BipProblem& base = pre.problem;

  LpSolution root = solve_lp(base.lp);
  if (root.status == LpStatus::unbounded)
    throw Error("solve_bip: relaxation unbounded over the unit box");
  if (root.status == LpStatus::infeasible) {
    out.proven = true;
    return out;
  }

  long cut_count = 0;
  for (int round = 0;
       round < params.max_cut_rounds && !all_integral(root.values); ++round) {
    GomoryCut cut;
    try {
      cut = gomory_cut_from(root.tableau);
    } catch (const NoFractionalRow&) {
      break;  // nothing eligible; branching takes over
    }
    LpSolution next;
    try {
      next = resolve_with_cut(root, densify_cut(root.problem, root.tableau, cut));
    } catch (const CutNotViolated&) {
      break;  // numerically too shallow to separate
    }
    if (next.status == LpStatus::infeasible) {
      // a valid cut emptied the region, so no binary point existed
      out.proven = true;
      return out;
    }
    double gain = next.objective - root.objective;
    root = std::move(next);
    ++cut_count;
    if (gain < params.cut_improvement_tol) break;
  }

  auto assemble = [&](const std::map<int, int>& node_fixings,
                      const std::vector<double>& values) {
    std::vector<int> full(input.lp.var_count, 0);
    for (int j = 0; j < input.lp.var_count; ++j)
      full[j] = static_cast<int>(std::lround(values[j]));
    for (auto [k, v] : pre.fixings) full[k] = v;
    for (auto [k, v] : node_fixings) full[k] = v;
    return full;
  };

  auto finish = [&](std::vector<int> values, long node_count) {
    out.sol.status = BipStatus::optimal;
    out.sol.values = std::move(values);
    out.sol.objective = binary_objective(input, out.sol.values);
    out.sol.node_count = node_count;
    out.sol.cut_count = cut_count;
    if (!binary_feasible(input.lp, out.sol.values))
      throw Error("solve_bip: produced an infeasible point");
    if (root.objective + base.objective_offset >
        out.sol.objective + 1e-6 * (1.0 + std::abs(out.sol.objective)))
      throw Error("solve_bip: relaxation bound exceeds the binary optimum");
    return out;
  };

  if (all_integral(root.values)) {
    out.proven = true;
    return finish(assemble({}, root.values), 0);
  }

  // best-bound node queue, FIFO among equal bounds
  struct Node {
    double bound = 0.0;
    long seq = 0;
    int depth = 0;
    std::map<int, int> fixings;
    std::vector<double> lp_values;
  };
  struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Node, std::vector<Node>, NodeOrder> queue;
  long seq = 0;

  bool have_incumbent = false;
  bool rins_done = false;
  std::vector<int> incumbent;
  double incumbent_obj = std::numeric_limits<double>::infinity();
  long node_count = 0;

  auto push_children = [&](const Node& parent) {
    int branch_var = -1;
    double best_dist = 2.0;
    for (int j = 0; j < base.lp.var_count; ++j) {
      double v = parent.lp_values[j];
      if (is_integral(v)) continue;
      double dist = std::abs(v - 0.5);
      if (dist < best_dist - 1e-12) {
        best_dist = dist;
        branch_var = j;
      }
    }
    if (branch_var < 0)
      throw Error("solve_bip: branching requested on an integral point");
    for (int v = 0; v <= 1; ++v) {
      Node child;
      child.depth = parent.depth + 1;
      child.fixings = parent.fixings;
      child.fixings[branch_var] = v;
      double offset = base.objective_offset;
      LpProblem sub = apply_fixings(root.problem, child.fixings, &offset);
      LpSolution lp = solve_lp(sub);
      if (lp.status != LpStatus::optimal) continue;  // child region empty
      child.bound = lp.objective + offset;
      child.seq = seq++;
      child.lp_values = std::move(lp.values);
      if (params.trace)
        *params.trace << "push depth=" << child.depth << " var=" << branch_var
                      << '=' << v << " bound=" << child.bound << '\n';
      queue.push(std::move(child));
    }
  };

  auto offer_incumbent = [&](const std::vector<int>& full) {
    double obj = binary_objective(input, full);
    if (!have_incumbent || obj < incumbent_obj) {
      incumbent = full;
      incumbent_obj = obj;
      have_incumbent = true;
    }
  };

  Node root_node;
  root_node.bound = root.objective + base.objective_offset;
  root_node.lp_values = root.values;
  push_children(root_node);

  while (!queue.empty()) {
    if (node_count >= params.node_limit) {  // give up on the proof
      if (have_incumbent) {
        out.sol.status = BipStatus::optimal;
        out.sol.values = incumbent;
        out.sol.objective = incumbent_obj;
        out.sol.node_count = node_count;
        out.sol.cut_count = cut_count;
      }
      return out;
    }
    Node node = queue.top();
    queue.pop();
    ++node_count;

    if (have_incumbent && node.bound >= incumbent_obj - 1e-9) {
      if (params.trace)
        *params.trace << "node " << node_count << " depth=" << node.depth
                      << " bound=" << node.bound << " pruned\n";
      continue;
    }

    if (all_integral(node.lp_values)) {
      offer_incumbent(assemble(node.fixings, node.lp_values));
      if (params.trace)
        *params.trace << "node " << node_count << " depth=" << node.depth
                      << " bound=" << node.bound << " incumbent "
                      << incumbent_obj << '\n';
      if (params.enable_rins && !rins_done) {
        rins_done = true;
        // relaxation values in the full variable space
        LpSolution relax = root;
        relax.values.assign(input.lp.var_count, 0.0);
        for (int j = 0; j < input.lp.var_count; ++j)
          relax.values[j] = root.values[j];
        for (auto [k, v] : pre.fixings) relax.values[k] = v;
        offer_incumbent(
            rins(input, incumbent, relax, params.rins_node_budget));
      }
      continue;
    }

    if (params.trace)
      *params.trace << "node " << node_count << " depth=" << node.depth
                    << " bound=" << node.bound << " branch\n";
    push_children(node);
  }

  out.proven = true;
  if (have_incumbent) {
    out.sol.status = BipStatus::optimal;
    out.sol.values = incumbent;
    out.sol.objective = incumbent_obj;
    out.sol.node_count = node_count;
    out.sol.cut_count = cut_count;
    if (!binary_feasible(input.lp, out.sol.values))
      throw Error("solve_bip: produced an infeasible point");
  }
  return out;  // no incumbent anywhere: infeasible
}

}  // namespace detail

// Relaxation-induced neighborhood search: fix every variable on which the
// incumbent and the relaxation agree, add an objective cutoff, and give the
// much smaller residual problem to a node-capped exact solve. Falls back to
// the incumbent whenever that fails to produce something strictly better.
inline std::vector<int> rins(const BipProblem& p,
                             const std::vector<int>& incumbent,
                             const LpSolution& relaxation, long node_budget) {
  if (node_budget <= 0) return incumbent;

  std::map<int, int> agree;
  for (int j = 0; j < p.lp.var_count; ++j)
    if (std::abs(relaxation.values[j] - incumbent[j]) <= kIntTol)
      agree[j] = incumbent[j];

  BipProblem sub = p;
  sub.lp = detail::apply_fixings(sub.lp, agree, &sub.objective_offset);

  double incumbent_obj = detail::binary_objective(p, incumbent);
  CutRow cutoff;
  cutoff.a = sub.lp.objective;
  cutoff.b = incumbent_obj - sub.objective_offset -
             1e-9 * (1.0 + std::abs(incumbent_obj));
  sub.lp.le_rows.push_back(std::move(cutoff));

  BipParams sub_params;
  sub_params.enable_rins = false;  // one level deep only
  sub_params.node_limit = node_budget;
  detail::SearchOutcome got = detail::solve_bip_impl(sub, sub_params);
  if (got.sol.status != BipStatus::optimal) return incumbent;

  std::vector<int> merged = got.sol.values;
  for (auto [k, v] : agree) merged[k] = v;
  if (!detail::binary_feasible(p.lp, merged)) return incumbent;
  if (detail::binary_objective(p, merged) >= incumbent_obj) return incumbent;
  return merged;
}

}  // namespace fjvrp
