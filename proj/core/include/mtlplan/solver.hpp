// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mtlplan/milp.hpp"

namespace mtlplan::solver {

struct SimplexOptions {
  int pivot_limit = 50000;
  /// Pivots with zero step before switching to Bland's rule.
  int bland_threshold = 1000;
  double tol = 1e-9;
  /// Recompute the basic solution from a fresh LU factorization of the final
  /// basis (removes tableau drift). On by default; branch-and-bound disables
  /// it for interior nodes.
  bool refine = true;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  int iterations = 0;
  /// Human-readable optimality / infeasibility / unboundedness note.
  std::string certificate;
};

/// Per-variable bound tightenings applied on top of the model (used by
/// branch-and-bound without copying the model).
using BoundOverrides = std::vector<std::pair<int, std::pair<double, double>>>;

/// Two-phase primal simplex over the LP relaxation (integrality ignored).
/// Deterministic: Dantzig pricing with lowest-index tie-breaks, Bland's rule
/// after `bland_threshold` degenerate pivots.
LpSolution solve_lp(const milp::MilpModel& model, const SimplexOptions& opts = {},
                    const BoundOverrides& overrides = {});

enum class MilpStatus {
  Optimal,
  Infeasible,
  /// Budget exhausted with an incumbent in hand.
  BudgetFeasible,
  /// Budget exhausted before any incumbent was found.
  BudgetNoIncumbent,
};

struct MilpOptions {
  double gap = 1e-6;
  /// Process CPU-time budget; the search is single-threaded so this is the
  /// actual compute spent regardless of machine load.
  double time_budget_sec = 60.0;
  long node_limit = 1000000;
  SimplexOptions lp;
};

struct MilpSolution {
  MilpStatus status = MilpStatus::Infeasible;
  double objective = 0.0;
  /// Best proven lower bound (== objective at Optimal).
  double bound = 0.0;
  std::vector<double> x;
  long nodes = 0;
  /// Weak-duality violations observed during search; always 0 for a sound run.
  int bound_violations = 0;
  /// Process CPU time consumed by the search.
  double cpu_sec = 0.0;
};

/// Best-bound branch-and-bound branching on the first fractional binary in
/// variable order. Deterministic node counts.
MilpSolution solve_milp(const milp::MilpModel& model,
                        const MilpOptions& opts = {});

}  // namespace mtlplan::solver
