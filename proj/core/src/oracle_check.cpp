// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <sstream>

#include "mtlplan/encode.hpp"
#include "mtlplan/mtl.hpp"
#include "mtlplan/oracle_check.hpp"
#include "mtlplan/solver.hpp"
#include "mtlplan/workspace.hpp"

namespace mtlplan::oracle {

namespace {

// 1-D arena on [0, 4]: P = [0,1], Q = [2,3], R = their union (exercises
// multi-part atoms). Sample positions keep a wide margin from every region
// boundary so the epsilon-robust encoding and the exact semantics agree.
ws::Workspace make_arena() {
  Eigen::VectorXd lo(1), hi(1);
  lo << 0.0;
  hi << 4.0;
  ws::Workspace w(lo, hi);
  auto seg = [](double a, double b) {
    ws::ConvexPolytope p;
    Eigen::VectorXd plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    p.faces.push_back({plus, b});
    p.faces.push_back({minus, -a});
    return p;
  };
  ws::Region P;
  P.name = "P";
  P.parts.push_back(seg(0.0, 1.0));
  w.add_region(std::move(P));
  ws::Region Q;
  Q.name = "Q";
  Q.parts.push_back(seg(2.0, 3.0));
  w.add_region(std::move(Q));
  ws::Region R;
  R.name = "R";
  R.parts.push_back(seg(0.0, 1.0));
  R.parts.push_back(seg(2.0, 3.0));
  w.add_region(std::move(R));
  return w;
}

const std::vector<double> kSafePositions = {0.3, 0.7, 1.5, 2.3, 2.8, 3.6};

struct Gen {
  std::mt19937 rng;
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  mtl::Formula atom() {
    static const char* names[] = {"P", "Q", "R"};
    return mtl::Formula::atom(names[pick(3)]);
  }

  mtl::Interval interval(int max_hi) {
    int lo = pick(std::min(3, max_hi) + 1);
    int hi = lo + pick(std::max(1, max_hi - lo + 1));
    return {lo, std::min(hi, max_hi)};
  }

  // `allow_unbounded`: untimed always/eventually, resolved by bind_horizon.
  mtl::Formula formula(int depth, int budget, bool under_negation) {
    if (depth == 0 || budget <= 0) {
      mtl::Formula a = atom();
      return pick(3) == 0 ? mtl::Formula::negation(a) : a;
    }
    switch (pick(under_negation ? 6 : 8)) {
      case 0:
      case 1: {
        std::vector<mtl::Formula> ks;
        int n = 2 + pick(2);
        for (int i = 0; i < n; ++i)
          ks.push_back(formula(depth - 1, budget, under_negation));
        return pick(2) == 0 ? mtl::Formula::conjunction(std::move(ks))
                            : mtl::Formula::disjunction(std::move(ks));
      }
      case 2: {
        mtl::Interval i = interval(budget);
        return mtl::Formula::eventually(
            i, formula(depth - 1, budget - *i.hi, under_negation));
      }
      case 3: {
        mtl::Interval i = interval(budget);
        if (pick(4) == 0) i.hi.reset();  // untimed
        int spent = i.bounded() ? *i.hi : i.lo;
        return mtl::Formula::always(
            i, formula(depth - 1, budget - spent, under_negation));
      }
      case 4:
        return mtl::Formula::next(
            formula(depth - 1, budget - 1, under_negation));
      case 5: {
        // Negation over an until-free subformula; to_nnf pushes it down.
        return mtl::Formula::negation(formula(depth - 1, budget, true));
      }
      default: {
        mtl::Interval i = interval(budget);
        return mtl::Formula::until(i, formula(depth - 1, budget, false),
                                   formula(depth - 1, budget - *i.hi, false));
      }
    }
  }
};

}  // namespace

PropertyStats run_equivalence_suite(int cases, unsigned seed) {
  PropertyStats stats;
  ws::Workspace arena = make_arena();
  Gen gen{std::mt19937(seed)};

  while (stats.cases < cases) {
    const int len = 3 + gen.pick(8);  // states 0..len-1
    std::vector<double> pos;
    for (int t = 0; t < len; ++t)
      pos.push_back(kSafePositions[gen.pick(
          static_cast<int>(kSafePositions.size()))]);

    mtl::Formula raw = gen.formula(3, len - 1, false);
    mtl::Formula bound;
    try {
      bound = mtl::bind_horizon(mtl::to_nnf(raw), len - 1);
    } catch (const mtl::HorizonError&) {
      continue;  // generator overshot the trace; draw again
    }

    // Oracle: direct semantics on the labeled trace.
    mtl::Trace trace;
    for (double p : pos) {
      Eigen::VectorXd x(1);
      x << p;
      mtl::LabelSet L;
      for (const auto& name : arena.label_point(x)) L.insert(name);
      trace.labels.push_back(std::move(L));
    }
    const bool truth = mtl::evaluate_at(bound, trace, 0);

    // Encoding: fixed positions, free indicators, root pinned to 1.
    milp::MilpModel model;
    std::vector<int> xvars;
    for (int t = 0; t < len; ++t)
      xvars.push_back(model.add_continuous(pos[t], pos[t],
                                           "x_t" + std::to_string(t)));
    encode::FormulaEncoder fe(
        model, arena, [&xvars](int t) { return std::vector<int>{xvars[t]}; },
        len - 1);
    int k = fe.encode_at(bound, 0);
    model.add_ge({{k, 1.0}}, 1.0);
    auto sol = solver::solve_milp(model);
    const bool encoded =
        sol.status == solver::MilpStatus::Optimal;
    if (sol.status == solver::MilpStatus::BudgetFeasible ||
        sol.status == solver::MilpStatus::BudgetNoIncumbent) {
      stats.failures.push_back("solver budget exhausted on a property case");
      break;
    }

    ++stats.cases;
    (truth ? stats.satisfied : stats.falsified)++;
    if (truth != encoded) {
      std::ostringstream os;
      os << "mismatch (oracle " << (truth ? "sat" : "unsat") << ", encoding "
         << (encoded ? "sat" : "unsat") << ") formula " << bound.to_string()
         << " trace";
      for (double p : pos) os << " " << p;
      stats.failures.push_back(os.str());
      if (stats.failures.size() >= 10) break;
    }
  }
  return stats;
}

}  // namespace mtlplan::oracle
