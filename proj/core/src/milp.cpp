// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "mtlplan/milp.hpp"

namespace mtlplan::milp {

double MilpModel::feasibility_residual(const std::vector<double>& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_vars(); ++j) {
    worst = std::max(worst, vars_[j].lb - x[j]);
    worst = std::max(worst, x[j] - vars_[j].ub);
    if (vars_[j].kind == VarKind::Binary)
      worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
  }
  for (const auto& c : cons_) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * x[t.var];
    switch (c.sense) {
      case Sense::LE:
        worst = std::max(worst, lhs - c.rhs);
        break;
      case Sense::GE:
        worst = std::max(worst, c.rhs - lhs);
        break;
      case Sense::EQ:
        worst = std::max(worst, std::abs(lhs - c.rhs));
        break;
    }
  }
  return worst;
}

}  // namespace mtlplan::milp
