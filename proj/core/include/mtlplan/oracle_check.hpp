// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace mtlplan::oracle {

struct PropertyStats {
  int cases = 0;
  int satisfied = 0;   // oracle-true cases (MILP feasible)
  int falsified = 0;   // oracle-false cases (MILP infeasible)
  std::vector<std::string> failures;  // mismatches, empty on success

  bool ok() const { return failures.empty() && cases > 0; }
};

/// Randomized equivalence check between the big-M MILP encoding and the
/// direct trace semantics: random traces over a 1-D workspace with fixed
/// positions and random formulas (depth <= 3); the encoding's root
/// constraint must be feasible exactly when the oracle satisfies the
/// formula. Deterministic in `seed`.
PropertyStats run_equivalence_suite(int cases, unsigned seed);

}  // namespace mtlplan::oracle
