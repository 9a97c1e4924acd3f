// Simplex and branch-and-bound against hand-derived optima, brute-force
// enumeration over binary fixings, and determinism checks.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mtlplan/lp_format.hpp"
#include "mtlplan/solver.hpp"

using namespace mtlplan;
using milp::kInf;
using milp::MilpModel;
using solver::LpStatus;
using solver::MilpStatus;

namespace {

constexpr double kTol = 1e-6;

bool close(double a, double b) {
  return std::abs(a - b) <= kTol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Exhaustive oracle: enumerate every 0/1 assignment of the binaries, solve
// the continuous rest as an LP, keep the best.
struct BruteResult {
  bool feasible = false;
  double objective = 0.0;
};

BruteResult brute_force(const MilpModel& m) {
  std::vector<int> bins;
  for (int v = 0; v < m.num_vars(); ++v)
    if (m.vars()[v].kind == milp::VarKind::Binary) bins.push_back(v);
  REQUIRE(bins.size() <= 12);
  BruteResult best;
  for (unsigned long mask = 0; mask < (1ul << bins.size()); ++mask) {
    solver::BoundOverrides fix;
    for (size_t i = 0; i < bins.size(); ++i) {
      double v = (mask >> i) & 1 ? 1.0 : 0.0;
      fix.push_back({bins[i], {v, v}});
    }
    auto sol = solver::solve_lp(m, {}, fix);
    if (sol.status != LpStatus::Optimal) continue;
    if (!best.feasible || sol.objective < best.objective - 1e-12) {
      best.feasible = true;
      best.objective = sol.objective;
    }
  }
  return best;
}

void check_against_brute(const MilpModel& m) {
  auto brute = brute_force(m);
  auto sol = solver::solve_milp(m);
  if (brute.feasible) {
    REQUIRE(sol.status == MilpStatus::Optimal);
    CHECK(close(sol.objective, brute.objective));
    CHECK(m.feasibility_residual(sol.x) < 1e-6);
  } else {
    CHECK(sol.status == MilpStatus::Infeasible);
  }
  CHECK(sol.bound_violations == 0);
}

// Deterministic random MILP generator for the brute-force sweep.
MilpModel random_milp(std::mt19937& rng) {
  std::uniform_int_distribution<int> nbin(1, 6), ncont(0, 3), nrow(2, 8);
  std::uniform_real_distribution<double> coef(-4.0, 4.0);
  std::uniform_int_distribution<int> sense(0, 2);
  MilpModel m;
  int nb = nbin(rng), nc = ncont(rng);
  for (int i = 0; i < nb; ++i) m.add_binary("b" + std::to_string(i));
  for (int i = 0; i < nc; ++i)
    m.add_continuous(-2.0, 3.0, "c" + std::to_string(i));
  for (int v = 0; v < m.num_vars(); ++v) m.obj_coef(v, coef(rng));
  int rows = nrow(rng);
  for (int r = 0; r < rows; ++r) {
    std::vector<milp::LinTerm> terms;
    for (int v = 0; v < m.num_vars(); ++v) {
      double c = coef(rng);
      if (std::abs(c) > 1.0) terms.push_back({v, c});
    }
    if (terms.empty()) terms.push_back({0, 1.0});
    double rhs = coef(rng);
    switch (sense(rng)) {
      case 0: m.add_le(std::move(terms), rhs); break;
      case 1: m.add_ge(std::move(terms), rhs); break;
      default: m.add_le(std::move(terms), rhs + 2.0); break;
    }
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------- pure LPs

TEST_CASE("lp 1: two-variable production optimum at a vertex") {
  // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), z = 36.
  MilpModel m;
  int x = m.add_continuous(0, kInf, "x"), y = m.add_continuous(0, kInf, "y");
  m.add_le({{x, 1}}, 4);
  m.add_le({{y, 2}}, 12);
  m.add_le({{x, 3}, {y, 2}}, 18);
  m.obj_coef(x, -3);
  m.obj_coef(y, -5);
  auto s = solver::solve_lp(m);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(close(s.objective, -36.0));
  CHECK(close(s.x[x], 2.0));
  CHECK(close(s.x[y], 6.0));
}

TEST_CASE("lp 2: degenerate vertex still solves") {
  // Three constraints meet at (0, 4): min -y.
  MilpModel m;
  int x = m.add_continuous(0, kInf, "x"), y = m.add_continuous(0, kInf, "y");
  m.add_le({{x, 1}, {y, 1}}, 4);
  m.add_le({{x, -1}, {y, 1}}, 4);
  m.add_le({{y, 1}}, 4);
  m.obj_coef(y, -1);
  auto s = solver::solve_lp(m);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(close(s.objective, -4.0));
}

TEST_CASE("lp 3: equality rows") {
  // x + y = 3, x - y = 1 -> unique point (2, 1); min x + 2y = 4.
  MilpModel m;
  int x = m.add_continuous(-kInf, kInf, "x"), y = m.add_continuous(-kInf, kInf, "y");
  m.add_eq({{x, 1}, {y, 1}}, 3);
  m.add_eq({{x, 1}, {y, -1}}, 1);
  m.obj_coef(x, 1);
  m.obj_coef(y, 2);
  auto s = solver::solve_lp(m);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(close(s.objective, 4.0));
  CHECK(close(s.x[x], 2.0));
  CHECK(close(s.x[y], 1.0));
}

TEST_CASE("lp 4: free variable") {
  // min x s.t. x >= y - 5, y = 2  ->  x = -3.
  MilpModel m;
  int x = m.add_continuous(-kInf, kInf, "x"), y = m.add_continuous(-kInf, kInf, "y");
  m.add_ge({{x, 1}, {y, -1}}, -5);
  m.add_eq({{y, 1}}, 2);
  m.obj_coef(x, 1);
  auto s = solver::solve_lp(m);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(close(s.objective, -3.0));
}

TEST_CASE("lp 5: infeasible system") {
  MilpModel m;
  int x = m.add_continuous(0, kInf, "x");
  m.add_le({{x, 1}}, 1);
  m.add_ge({{x, 1}}, 2);
  auto s = solver::solve_lp(m);
  CHECK(s.status == LpStatus::Infeasible);
  CHECK_FALSE(s.certificate.empty());
}

TEST_CASE("lp 6: unbounded ray") {
  MilpModel m;
  int x = m.add_continuous(0, kInf, "x"), y = m.add_continuous(0, kInf, "y");
  m.add_ge({{x, 1}, {y, -1}}, 0);
  m.obj_coef(x, -1);
  auto s = solver::solve_lp(m);
  CHECK(s.status == LpStatus::Unbounded);
}

TEST_CASE("lp 7: optimum pinned by variable bounds only") {
  MilpModel m;
  int x = m.add_continuous(-1.5, 2.5, "x");
  int y = m.add_continuous(0.5, 4.0, "y");
  m.add_le({{x, 1}, {y, 1}}, 100);  // slack row, never active
  m.obj_coef(x, 1);
  m.obj_coef(y, -1);
  auto s = solver::solve_lp(m);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(close(s.objective, -5.5));  // x at lb, y at ub
}

TEST_CASE("lp 8: negative lower bounds and GE rows") {
  // min x + y s.t. x + 2y >= 2, x >= -1, y >= -1  ->  x = -1, y = 1.5.
  MilpModel m;
  int x = m.add_continuous(-1, kInf, "x"), y = m.add_continuous(-1, kInf, "y");
  m.add_ge({{x, 1}, {y, 2}}, 2);
  m.obj_coef(x, 1);
  m.obj_coef(y, 1);
  auto s = solver::solve_lp(m);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(close(s.objective, 0.5));
}

TEST_CASE("lp 9: redundant constraints do not disturb the optimum") {
  MilpModel m;
  int x = m.add_continuous(0, 10, "x");
  for (int k = 0; k < 20; ++k) m.add_le({{x, 1}}, 5.0 + k);
  m.obj_coef(x, -1);
  auto s = solver::solve_lp(m);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(close(s.objective, -5.0));
}

TEST_CASE("lp 10: bound overrides tighten without touching the model") {
  MilpModel m;
  int x = m.add_continuous(0, 10, "x");
  m.add_le({{x, 1}}, 8);
  m.obj_coef(x, -1);
  auto s1 = solver::solve_lp(m);
  REQUIRE(s1.status == LpStatus::Optimal);
  CHECK(close(s1.objective, -8.0));
  auto s2 = solver::solve_lp(m, {}, {{x, {0.0, 3.0}}});
  REQUIRE(s2.status == LpStatus::Optimal);
  CHECK(close(s2.objective, -3.0));
  // Contradictory override is infeasible, not a crash.
  auto s3 = solver::solve_lp(m, {}, {{x, {5.0, 3.0}}});
  CHECK(s3.status == LpStatus::Infeasible);
  // The model itself is untouched.
  CHECK(close(solver::solve_lp(m).objective, -8.0));
}

TEST_CASE("lp 11: larger dense system with known optimum") {
  // min sum x_i s.t. x_i + x_{i+1} >= 1 on a 6-cycle -> 3 (alternating 1s
  // relax to x_i = 0.5 each, objective 3).
  MilpModel m;
  std::vector<int> xs;
  for (int i = 0; i < 6; ++i) xs.push_back(m.add_continuous(0, 1, "x"));
  for (int i = 0; i < 6; ++i) m.add_ge({{xs[i], 1}, {xs[(i + 1) % 6], 1}}, 1);
  for (int v : xs) m.obj_coef(v, 1);
  auto s = solver::solve_lp(m);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(close(s.objective, 3.0));
}

TEST_CASE("lp 12: duplicate objective entries accumulate") {
  MilpModel m;
  int x = m.add_continuous(0, 4, "x");
  m.add_le({{x, 1}}, 4);
  m.obj_coef(x, -1);
  m.obj_coef(x, -1);  // total coefficient -2
  auto s = solver::solve_lp(m);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(close(s.objective, -8.0));
}

// --------------------------------------------------------------- MILPs

TEST_CASE("milp 1: 0/1 knapsack") {
  // values 10,13,7,11; weights 5,6,4,5; cap 10 -> best {13,11} = 24.
  MilpModel m;
  int a = m.add_binary("a"), b = m.add_binary("b"), c = m.add_binary("c"),
      d = m.add_binary("d");
  m.add_le({{a, 5}, {b, 6}, {c, 4}, {d, 5}}, 10);
  m.obj_coef(a, -10);
  m.obj_coef(b, -13);
  m.obj_coef(c, -7);
  m.obj_coef(d, -11);
  auto s = solver::solve_milp(m);
  REQUIRE(s.status == MilpStatus::Optimal);
  CHECK(close(s.objective, -24.0));
  check_against_brute(m);
}

TEST_CASE("milp 2: set cover") {
  // Elements {1,2,3}; sets A={1,2}, B={2,3}, C={3}, D={1,3}; unit costs.
  // Optimal cover uses two sets.
  MilpModel m;
  int A = m.add_binary("A"), B = m.add_binary("B"), C = m.add_binary("C"),
      D = m.add_binary("D");
  m.add_ge({{A, 1}, {D, 1}}, 1);
  m.add_ge({{A, 1}, {B, 1}}, 1);
  m.add_ge({{B, 1}, {C, 1}, {D, 1}}, 1);
  for (int v : {A, B, C, D}) m.obj_coef(v, 1);
  auto s = solver::solve_milp(m);
  REQUIRE(s.status == MilpStatus::Optimal);
  CHECK(close(s.objective, 2.0));
  check_against_brute(m);
}

TEST_CASE("milp 3: integrality gap forces branching") {
  // max x1 + x2 s.t. 2x1 + 2x2 <= 3 over binaries: LP gives 1.5, MILP 1.
  MilpModel m;
  int x1 = m.add_binary("x1"), x2 = m.add_binary("x2");
  m.add_le({{x1, 2}, {x2, 2}}, 3);
  m.obj_coef(x1, -1);
  m.obj_coef(x2, -1);
  auto rel = solver::solve_lp(m);
  CHECK(close(rel.objective, -1.5));
  auto s = solver::solve_milp(m);
  REQUIRE(s.status == MilpStatus::Optimal);
  CHECK(close(s.objective, -1.0));
  CHECK(s.nodes > 1);  // root relaxation is fractional
  check_against_brute(m);
}

TEST_CASE("milp 4: infeasible integer system with feasible relaxation") {
  // x1 + x2 = 1 and x1 - x2 = 0 has the fractional solution (0.5, 0.5) only.
  MilpModel m;
  int x1 = m.add_binary("x1"), x2 = m.add_binary("x2");
  m.add_eq({{x1, 1}, {x2, 1}}, 1);
  m.add_eq({{x1, 1}, {x2, -1}}, 0);
  auto rel = solver::solve_lp(m);
  CHECK(rel.status == LpStatus::Optimal);
  auto s = solver::solve_milp(m);
  CHECK(s.status == MilpStatus::Infeasible);
  check_against_brute(m);
}

TEST_CASE("milp 5: mixed binaries and continuous variables") {
  // Fixed-charge: min 3y + x s.t. x >= 2 - 10y, x >= 0. y=0 forces x>=2
  // (cost 2); y=1 allows x=0 (cost 3). Optimum 2.
  MilpModel m;
  int y = m.add_binary("y");
  int x = m.add_continuous(0, kInf, "x");
  m.add_ge({{x, 1}, {y, 10}}, 2);
  m.obj_coef(y, 3);
  m.obj_coef(x, 1);
  auto s = solver::solve_milp(m);
  REQUIRE(s.status == MilpStatus::Optimal);
  CHECK(close(s.objective, 2.0));
  check_against_brute(m);
}

TEST_CASE("milp 6: big-M indicator pair") {
  // b = 1 must force x <= 1, b = 0 must force x >= 3; min x + 0.5 b.
  MilpModel m;
  int b = m.add_binary("b");
  int x = m.add_continuous(0, 10, "x");
  m.add_le({{x, 1}, {b, 9}}, 10);   // b=1 -> x <= 1
  m.add_ge({{x, 1}, {b, 3}}, 3);    // b=0 -> x >= 3
  m.obj_coef(x, 1);
  m.obj_coef(b, 0.5);
  auto s = solver::solve_milp(m);
  REQUIRE(s.status == MilpStatus::Optimal);
  CHECK(close(s.objective, 0.5));  // b = 1, x = 0
  check_against_brute(m);
}

TEST_CASE("milp 7: assignment with a blocked diagonal") {
  // 3x3 assignment, cost 1 everywhere except forbidden (i == j) entries.
  MilpModel m;
  std::vector<std::vector<int>> a(3, std::vector<int>(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] = m.add_binary("a");
  for (int i = 0; i < 3; ++i) {
    m.add_eq({{a[i][0], 1}, {a[i][1], 1}, {a[i][2], 1}}, 1);
    m.add_eq({{a[0][i], 1}, {a[1][i], 1}, {a[2][i], 1}}, 1);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.obj_coef(a[i][j], i == j ? 100.0 : 1.0);
  auto s = solver::solve_milp(m);
  REQUIRE(s.status == MilpStatus::Optimal);
  CHECK(close(s.objective, 3.0));  // a derangement avoids every diagonal
  check_against_brute(m);
}

TEST_CASE("milp 8: equality-heavy model (parity selection)") {
  // Pick exactly 2 of 5 items maximizing value {4, 1, 6, 3, 5} -> 11.
  MilpModel m;
  std::vector<int> xs;
  double vals[] = {4, 1, 6, 3, 5};
  std::vector<milp::LinTerm> sum;
  for (int i = 0; i < 5; ++i) {
    xs.push_back(m.add_binary("x"));
    sum.push_back({xs[i], 1.0});
    m.obj_coef(xs[i], -vals[i]);
  }
  m.add_eq(std::move(sum), 2);
  auto s = solver::solve_milp(m);
  REQUIRE(s.status == MilpStatus::Optimal);
  CHECK(close(s.objective, -11.0));
  check_against_brute(m);
}

TEST_CASE("milp 9: brute-force sweep over random models") {
  std::mt19937 rng(20240817);
  for (int k = 0; k < 25; ++k) {
    auto m = random_milp(rng);
    CAPTURE(k);
    check_against_brute(m);
  }
}

TEST_CASE("milp 10: node counts and solutions are deterministic") {
  std::mt19937 rng(515151);
  for (int k = 0; k < 5; ++k) {
    auto m = random_milp(rng);
    auto s1 = solver::solve_milp(m);
    auto s2 = solver::solve_milp(m);
    CHECK(s1.status == s2.status);
    CHECK(s1.nodes == s2.nodes);
    if (s1.status == MilpStatus::Optimal) {
      CHECK(s1.objective == s2.objective);
      CHECK(s1.x == s2.x);
    }
  }
}

TEST_CASE("milp 11: optimal solutions satisfy integrality exactly") {
  std::mt19937 rng(99);
  for (int k = 0; k < 10; ++k) {
    auto m = random_milp(rng);
    auto s = solver::solve_milp(m);
    if (s.status != MilpStatus::Optimal) continue;
    for (int v = 0; v < m.num_vars(); ++v)
      if (m.vars()[v].kind == milp::VarKind::Binary)
        CHECK(std::abs(s.x[v] - std::round(s.x[v])) < 1e-7);
  }
}

// ------------------------------------------------------------ LP format

TEST_CASE("lp file round-trip preserves the optimum") {
  MilpModel m;
  int b = m.add_binary("pick");
  int x = m.add_continuous(-2.5, 7.0, "flow");
  int f = m.add_continuous(-kInf, kInf, "free");
  m.add_le({{x, 2}, {b, -3}}, 4.5);
  m.add_ge({{f, 1}, {x, 1}}, -1);
  m.add_eq({{f, 1}, {b, 2}}, 1);
  m.obj_coef(x, 1.25);
  m.obj_coef(b, -0.5);
  m.obj_coef(f, 0.75);

  auto text = lp_format::export_lp_text(m, "roundtrip");
  auto m2 = lp_format::parse_lp_text(text);
  auto s1 = solver::solve_milp(m);
  auto s2 = solver::solve_milp(m2);
  REQUIRE(s1.status == MilpStatus::Optimal);
  REQUIRE(s2.status == MilpStatus::Optimal);
  CHECK(close(s1.objective, s2.objective));

  // Export is deterministic.
  CHECK(text == lp_format::export_lp_text(m, "roundtrip"));
}

TEST_CASE("lp file round-trip on random MILPs") {
  std::mt19937 rng(7000);
  for (int k = 0; k < 10; ++k) {
    auto m = random_milp(rng);
    auto m2 = lp_format::parse_lp_text(lp_format::export_lp_text(m));
    auto s1 = solver::solve_milp(m);
    auto s2 = solver::solve_milp(m2);
    CHECK(s1.status == s2.status);
    if (s1.status == MilpStatus::Optimal) CHECK(close(s1.objective, s2.objective));
  }
}

TEST_CASE("maximize sense parses with flipped sign") {
  const char* text =
      "Maximize\n obj: 2 x + 3 y\nSubject To\n c0: x + y <= 4\n"
      "Bounds\n 0 <= x <= 10\n 0 <= y <= 10\nEnd\n";
  auto m = lp_format::parse_lp_text(text);
  auto s = solver::solve_lp(m);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(close(s.objective, -12.0));  // internal minimization convention
}
