// SPDX-License-Identifier: Apache-2.0
//
// Best-bound branch and bound on binary variables. Nodes carry only bound
// overrides, so the model is never copied; children are solved lazily with
// the parent relaxation value as their inherited bound.

#include <algorithm>
#include <ctime>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

#include "mtlplan/solver.hpp"

namespace mtlplan::solver {

namespace {

struct Node {
  double bound;  // parent LP value (inherited lower bound)
  long id;
  BoundOverrides fixes;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;
  }
};

BoundOverrides with_fix(const BoundOverrides& base, int var, double val) {
  BoundOverrides out = base;
  for (auto& [v, bds] : out)
    if (v == var) {
      bds = {val, val};
      return out;
    }
  out.push_back({var, {val, val}});
  return out;
}

}  // namespace

MilpSolution solve_milp(const milp::MilpModel& model, const MilpOptions& opts) {
  // Budget against process CPU time: the search is single-threaded, and on a
  // shared machine wall clock can run several times faster than the solver
  // actually computes, which would make the budget depend on external load.
  const std::clock_t t0 = std::clock();
  auto elapsed = [&] {
    return static_cast<double>(std::clock() - t0) / CLOCKS_PER_SEC;
  };

  const auto& vars = model.vars();
  std::vector<int> binaries;
  for (int j = 0; j < model.num_vars(); ++j)
    if (vars[j].kind == milp::VarKind::Binary) binaries.push_back(j);

  MilpSolution out;
  double incumbent_obj = std::numeric_limits<double>::infinity();
  std::vector<double> incumbent_x;
  bool have_incumbent = false;
  double best_open_bound = -std::numeric_limits<double>::infinity();
  bool hit_budget = false;

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  open.push({-std::numeric_limits<double>::infinity(), next_id++, {}});

  auto cutoff = [&] {
    return incumbent_obj - opts.gap * std::max(1.0, std::abs(incumbent_obj));
  };

  // Diving heuristic: from a fractional relaxation, repeatedly fix the most
  // fractional binary to its nearest integer and re-solve. Lands on an early
  // incumbent for large feasibility-style models, which lets best-bound
  // search prune instead of exhausting the budget without a solution.
  auto dive = [&](BoundOverrides fixes, LpSolution lp) {
    SimplexOptions fast = opts.lp;
    fast.refine = false;
    for (size_t depth = 0; depth <= binaries.size(); ++depth) {
      if (elapsed() > opts.time_budget_sec) return;
      int v = -1;
      for (int j : binaries) {
        double val = lp.x[j];
        if (std::min(std::abs(val), std::abs(1.0 - val)) > 1e-7) {
          v = j;
          break;
        }
      }
      if (v < 0) {  // integral leaf
        if (opts.lp.refine) {
          LpSolution refined = solve_lp(model, opts.lp, fixes);
          if (refined.status == LpStatus::Optimal) lp = std::move(refined);
        }
        if (lp.objective < incumbent_obj - 1e-12) {
          incumbent_obj = lp.objective;
          incumbent_x = lp.x;
          for (int j : binaries) incumbent_x[j] = std::round(incumbent_x[j]);
          have_incumbent = true;
        }
        return;
      }
      const double nearest = std::round(lp.x[v]);
      // Bulk step first: freeze every binary that is already integral in
      // the current relaxation along with the rounded target. When that
      // works the dive converges in a handful of solves instead of one
      // solve per binary.
      {
        BoundOverrides bulk = fixes;
        for (int j : binaries) {
          double val = lp.x[j];
          double r = std::round(val);
          if (std::abs(val - r) <= 1e-7) bulk = with_fix(bulk, j, r);
        }
        bulk = with_fix(bulk, v, nearest);
        LpSolution bulk_lp = solve_lp(model, fast, bulk);
        if (bulk_lp.status == LpStatus::Optimal) {
          fixes = std::move(bulk);
          lp = std::move(bulk_lp);
          if (have_incumbent &&
              lp.objective >=
                  incumbent_obj - opts.gap * std::max(1.0, std::abs(incumbent_obj)))
            return;
          continue;
        }
      }
      BoundOverrides tried = with_fix(fixes, v, nearest);
      lp = solve_lp(model, fast, tried);
      if (lp.status != LpStatus::Optimal) {
        // Backtrack one level: try the opposite value before giving up.
        tried = with_fix(fixes, v, 1.0 - nearest);
        lp = solve_lp(model, fast, tried);
        if (lp.status != LpStatus::Optimal) return;  // dead end, give up
      }
      fixes = std::move(tried);
      if (have_incumbent &&
          lp.objective >= incumbent_obj - opts.gap * std::max(1.0, std::abs(incumbent_obj)))
        return;
    }
  };

  while (!open.empty()) {
    if (elapsed() > opts.time_budget_sec || out.nodes >= opts.node_limit) {
      hit_budget = true;
      best_open_bound = open.top().bound;
      break;
    }
    Node node = open.top();
    open.pop();
    if (have_incumbent && node.bound >= cutoff()) {
      // Best-bound order: every remaining node is at least as bad.
      best_open_bound = node.bound;
      open = {};
      break;
    }

    ++out.nodes;
    SimplexOptions fast = opts.lp;
    fast.refine = false;  // interior nodes only need the bound
    LpSolution lp = solve_lp(model, fast, node.fixes);
    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status == LpStatus::Unbounded)
      throw std::runtime_error("unbounded relaxation in branch and bound");
    if (lp.status == LpStatus::IterationLimit)
      throw std::runtime_error("simplex pivot limit inside branch and bound");

    if (std::isfinite(node.bound) && lp.objective < node.bound - 1e-6)
      ++out.bound_violations;

    if (have_incumbent && lp.objective >= cutoff()) continue;

    // First fractional binary in variable order. Variables are created in
    // time order, so this resolves the earliest undecided discrete choice
    // first -- on trajectory models the early choices determine the rest.
    int branch_var = -1;
    for (int j : binaries) {
      double v = lp.x[j];
      if (std::min(std::abs(v), std::abs(1.0 - v)) > 1e-7) {
        branch_var = j;
        break;
      }
    }
    if (branch_var < 0) {
      // Integral: candidate incumbent. Re-solve with basis refinement so the
      // stored solution is clean.
      if (opts.lp.refine) {
        LpSolution refined = solve_lp(model, opts.lp, node.fixes);
        if (refined.status == LpStatus::Optimal) lp = std::move(refined);
      }
      if (lp.objective < incumbent_obj - 1e-12) {
        incumbent_obj = lp.objective;
        incumbent_x = lp.x;
        for (int j : binaries) incumbent_x[j] = std::round(incumbent_x[j]);
        have_incumbent = true;
      }
      continue;
    }

    // Hunt for an incumbent at the root and, while none exists, at a fixed
    // node cadence (keeps runs deterministic).
    if (out.nodes == 1 || (!have_incumbent && out.nodes % 50 == 0))
      dive(node.fixes, lp);

    open.push({lp.objective, next_id++, with_fix(node.fixes, branch_var, 0.0)});
    open.push({lp.objective, next_id++, with_fix(node.fixes, branch_var, 1.0)});
  }

  out.cpu_sec = elapsed();
  if (!hit_budget) {
    if (have_incumbent) {
      out.status = MilpStatus::Optimal;
      out.objective = incumbent_obj;
      out.bound = incumbent_obj;
      out.x = std::move(incumbent_x);
    } else {
      out.status = MilpStatus::Infeasible;
    }
  } else {
    out.bound = std::max(best_open_bound,
                         -std::numeric_limits<double>::infinity());
    if (have_incumbent) {
      out.status = MilpStatus::BudgetFeasible;
      out.objective = incumbent_obj;
      out.x = std::move(incumbent_x);
    } else {
      out.status = MilpStatus::BudgetNoIncumbent;
    }
  }
  return out;
}

}  // namespace mtlplan::solver
