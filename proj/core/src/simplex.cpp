// SPDX-License-Identifier: Apache-2.0
//
// Two-phase primal simplex over a dense tableau with bounded variables.
// Slacks turn every row into an equality; infeasible rows get a phase-1
// artificial. Nonbasic variables sit at a finite bound (or at zero when
// free), so model bounds never become rows.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "mtlplan/solver.hpp"

namespace mtlplan::solver {

namespace {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ColStatus : unsigned char { AtLB, AtUB, FreeZero, Basic };

struct Tableau {
  int m = 0;           // rows
  int n_struct = 0;    // structural variables
  int n_total = 0;     // structural + slack + artificial
  MatrixXd tab;        // B^{-1} * A over all columns
  RowVectorXd d;       // reduced costs for the active phase
  VectorXd beta;       // values of basic variables, by row
  std::vector<double> lb, ub;
  std::vector<ColStatus> status;
  std::vector<int> basis;  // column basic in each row
  std::vector<std::vector<std::pair<int, double>>> orig_cols;
  VectorXd b;

  double nb_value(int j) const {
    switch (status[j]) {
      case ColStatus::AtLB:
        return lb[j];
      case ColStatus::AtUB:
        return ub[j];
      default:
        return 0.0;
    }
  }
};

struct PivotState {
  int iterations = 0;
  int degenerate_run = 0;
  bool bland = false;
};

enum class StepResult { Optimal, Unbounded, Step };

// One priced pivot (or bound flip) against the maintained cost row.
StepResult simplex_step(Tableau& T, PivotState& ps, const SimplexOptions& opts) {
  const double tol = opts.tol;

  // Pricing.
  int enter = -1;
  double best = tol;
  int dir = 0;
  for (int j = 0; j < T.n_total; ++j) {
    if (T.status[j] == ColStatus::Basic) continue;
    if (T.lb[j] == T.ub[j]) continue;  // fixed
    double dj = T.d(j);
    double viol = 0.0;
    int dj_dir = 0;
    switch (T.status[j]) {
      case ColStatus::AtLB:
        viol = -dj;
        dj_dir = +1;
        break;
      case ColStatus::AtUB:
        viol = dj;
        dj_dir = -1;
        break;
      case ColStatus::FreeZero:
        viol = std::abs(dj);
        dj_dir = dj < 0 ? +1 : -1;
        break;
      default:
        break;
    }
    if (viol > (ps.bland ? tol : best)) {
      enter = j;
      best = viol;
      dir = dj_dir;
      if (ps.bland) break;
    }
  }
  if (enter < 0) return StepResult::Optimal;

  // Ratio test. The entering variable moves by theta >= 0 in direction dir;
  // basic variable i changes at rate -dir * tab(i, enter).
  double theta_own = (std::isfinite(T.lb[enter]) && std::isfinite(T.ub[enter]))
                         ? T.ub[enter] - T.lb[enter]
                         : kInf;
  double theta = theta_own;
  int leave_row = -1;
  bool leave_to_ub = false;
  double leave_pivot = 0.0;
  for (int i = 0; i < T.m; ++i) {
    double a = T.tab(i, enter);
    if (std::abs(a) <= 1e-11) continue;
    double rate = -dir * a;
    double t_i;
    bool to_ub;
    int bi = T.basis[i];
    if (rate > 0) {
      if (!std::isfinite(T.ub[bi])) continue;
      t_i = (T.ub[bi] - T.beta(i)) / rate;
      to_ub = true;
    } else {
      if (!std::isfinite(T.lb[bi])) continue;
      t_i = (T.beta(i) - T.lb[bi]) / (-rate);
      to_ub = false;
    }
    if (t_i < 0) t_i = 0;
    bool better = t_i < theta - 1e-10;
    bool tie = std::abs(t_i - theta) <= 1e-10 && leave_row >= 0;
    if (better ||
        (tie && (std::abs(a) > std::abs(leave_pivot) + 1e-12 ||
                 (std::abs(std::abs(a) - std::abs(leave_pivot)) <= 1e-12 &&
                  bi < T.basis[leave_row])))) {
      theta = t_i;
      leave_row = i;
      leave_to_ub = to_ub;
      leave_pivot = a;
    }
  }

  if (!std::isfinite(theta)) return StepResult::Unbounded;

  if (theta <= tol)
    ++ps.degenerate_run;
  else
    ps.degenerate_run = 0;
  if (ps.degenerate_run > opts.bland_threshold) ps.bland = true;

  if (leave_row < 0) {
    // Bound flip: entering runs to its opposite bound, basis unchanged.
    T.beta.noalias() -= (dir * theta) * T.tab.col(enter);
    T.status[enter] =
        T.status[enter] == ColStatus::AtLB ? ColStatus::AtUB : ColStatus::AtLB;
    return StepResult::Step;
  }

  // Pivot.
  double enter_val = T.nb_value(enter) + dir * theta;
  T.beta.noalias() -= (dir * theta) * T.tab.col(enter);
  T.beta(leave_row) = enter_val;
  T.status[T.basis[leave_row]] =
      leave_to_ub ? ColStatus::AtUB : ColStatus::AtLB;
  T.status[enter] = ColStatus::Basic;
  T.basis[leave_row] = enter;

  double piv = T.tab(leave_row, enter);
  T.tab.row(leave_row) /= piv;
  VectorXd col = T.tab.col(enter);
  col(leave_row) = 0.0;
  T.tab.noalias() -= col * T.tab.row(leave_row);
  T.d.noalias() -= T.d(enter) * T.tab.row(leave_row);
  return StepResult::Step;
}

// Reconstructs basic values from an LU factorization of the current basis,
// using the untouched original columns.
void refine_beta(Tableau& T) {
  MatrixXd B = MatrixXd::Zero(T.m, T.m);
  for (int i = 0; i < T.m; ++i)
    for (auto [r, v] : T.orig_cols[T.basis[i]]) B(r, i) = v;
  VectorXd rhs = T.b;
  for (int j = 0; j < T.n_total; ++j) {
    if (T.status[j] == ColStatus::Basic) continue;
    double v = T.nb_value(j);
    if (v == 0.0) continue;
    for (auto [r, a] : T.orig_cols[j]) rhs(r) -= a * v;
  }
  T.beta = B.partialPivLu().solve(rhs);
}

}  // namespace

LpSolution solve_lp(const milp::MilpModel& model, const SimplexOptions& opts,
                    const BoundOverrides& overrides) {
  const auto& vars = model.vars();
  const auto& cons = model.constraints();
  const int n = model.num_vars();
  const int m = static_cast<int>(cons.size());

  Tableau T;
  T.m = m;
  T.n_struct = n;

  // Bounds: structural, then slack, artificials appended later.
  T.lb.assign(n + m, 0.0);
  T.ub.assign(n + m, 0.0);
  for (int j = 0; j < n; ++j) {
    T.lb[j] = vars[j].lb;
    T.ub[j] = vars[j].ub;
  }
  for (const auto& [v, bds] : overrides) {
    T.lb[v] = std::max(T.lb[v], bds.first);
    T.ub[v] = std::min(T.ub[v], bds.second);
    if (T.lb[v] > T.ub[v] + 1e-12) {
      LpSolution s;
      s.status = LpStatus::Infeasible;
      s.certificate = "contradictory bounds on " + vars[v].name;
      return s;
    }
  }
  for (int i = 0; i < m; ++i) {
    switch (cons[i].sense) {
      case milp::Sense::LE:
        T.lb[n + i] = 0.0;
        T.ub[n + i] = kInf;
        break;
      case milp::Sense::GE:
        T.lb[n + i] = -kInf;
        T.ub[n + i] = 0.0;
        break;
      case milp::Sense::EQ:
        T.lb[n + i] = 0.0;
        T.ub[n + i] = 0.0;
        break;
    }
  }

  // Original sparse columns (structural accumulate duplicate terms).
  T.orig_cols.assign(n + m, {});
  T.b = VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    T.b(i) = cons[i].rhs;
    T.orig_cols[n + i].push_back({i, 1.0});
  }
  {
    std::vector<double> rowacc;
    for (int j = 0; j < n; ++j) T.orig_cols[j].reserve(4);
  }
  for (int i = 0; i < m; ++i)
    for (const auto& t : cons[i].terms) T.orig_cols[t.var].push_back({i, t.coef});

  // Initial statuses and residuals.
  T.status.assign(n + m, ColStatus::AtLB);
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(T.lb[j]))
      T.status[j] = ColStatus::AtLB;
    else if (std::isfinite(T.ub[j]))
      T.status[j] = ColStatus::AtUB;
    else
      T.status[j] = ColStatus::FreeZero;
  }

  VectorXd resid = T.b;
  for (int j = 0; j < n; ++j) {
    double v = T.nb_value(j);
    if (v == 0.0) continue;
    for (auto [r, a] : T.orig_cols[j]) resid(r) -= a * v;
  }

  // Rows whose slack cannot absorb the residual get an artificial.
  std::vector<int> art_rows;
  std::vector<double> art_sign;
  for (int i = 0; i < m; ++i) {
    double r = resid(i);
    if (r >= T.lb[n + i] - 1e-12 && r <= T.ub[n + i] + 1e-12) continue;
    art_rows.push_back(i);
    art_sign.push_back(r > 0 ? 1.0 : -1.0);
  }
  const int n_art = static_cast<int>(art_rows.size());
  T.n_total = n + m + n_art;
  T.lb.resize(T.n_total, 0.0);
  T.ub.resize(T.n_total, kInf);
  T.status.resize(T.n_total, ColStatus::AtLB);
  T.orig_cols.resize(T.n_total);
  for (int k = 0; k < n_art; ++k)
    T.orig_cols[n + m + k].push_back({art_rows[k], art_sign[k]});

  // Dense tableau; artificial-basic rows are scaled so the basis is identity.
  T.tab = MatrixXd::Zero(m, T.n_total);
  for (int j = 0; j < T.n_total; ++j)
    for (auto [r, a] : T.orig_cols[j]) T.tab(r, j) += a;

  T.basis.assign(m, -1);
  T.beta = VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    T.basis[i] = n + i;  // slack
    T.beta(i) = resid(i);
    T.status[n + i] = ColStatus::Basic;
  }
  for (int k = 0; k < n_art; ++k) {
    int i = art_rows[k];
    int aj = n + m + k;
    T.status[n + i] = ColStatus::AtLB;
    if (!std::isfinite(T.lb[n + i])) T.status[n + i] = ColStatus::AtUB;
    T.basis[i] = aj;
    T.beta(i) = std::abs(resid(i));
    T.status[aj] = ColStatus::Basic;
    if (art_sign[k] < 0) T.tab.row(i) *= -1.0;
  }

  LpSolution sol;
  PivotState ps;

  auto run_phase = [&](const std::vector<double>& cost) -> StepResult {
    // Reduced costs d = c - c_B^T tab.
    T.d = RowVectorXd::Zero(T.n_total);
    for (int j = 0; j < T.n_total; ++j) T.d(j) = cost[j];
    for (int i = 0; i < m; ++i) {
      double cb = cost[T.basis[i]];
      if (cb != 0.0) T.d.noalias() -= cb * T.tab.row(i);
    }
    ps.degenerate_run = 0;
    ps.bland = false;
    while (true) {
      if (ps.iterations >= opts.pivot_limit) return StepResult::Step;  // limit
      StepResult r = simplex_step(T, ps, opts);
      if (r != StepResult::Step) return r;
      ++ps.iterations;
    }
  };

  // Phase 1.
  if (n_art > 0) {
    std::vector<double> c1(T.n_total, 0.0);
    for (int k = 0; k < n_art; ++k) c1[n + m + k] = 1.0;
    StepResult r = run_phase(c1);
    if (ps.iterations >= opts.pivot_limit) {
      sol.status = LpStatus::IterationLimit;
      sol.iterations = ps.iterations;
      sol.certificate = "pivot limit in phase 1";
      return sol;
    }
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (T.basis[i] >= n + m) infeas += T.beta(i);
    for (int k = 0; k < n_art; ++k)
      if (T.status[n + m + k] == ColStatus::AtUB) infeas += T.ub[n + m + k];
    if (r == StepResult::Unbounded || infeas > 1e-7) {
      sol.status = LpStatus::Infeasible;
      sol.iterations = ps.iterations;
      sol.certificate =
          "phase-1 infeasibility " + std::to_string(infeas) + " > 0";
      return sol;
    }
    // Lock artificials out of the problem.
    for (int k = 0; k < n_art; ++k) {
      T.lb[n + m + k] = 0.0;
      T.ub[n + m + k] = 0.0;
    }
  }

  // Phase 2.
  std::vector<double> c2(T.n_total, 0.0);
  for (const auto& t : model.objective()) c2[t.var] += t.coef;
  StepResult r2 = run_phase(c2);
  sol.iterations = ps.iterations;
  if (ps.iterations >= opts.pivot_limit) {
    sol.status = LpStatus::IterationLimit;
    sol.certificate = "pivot limit reached";
    return sol;
  }
  if (r2 == StepResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    sol.certificate = "improving ray with no blocking bound";
    return sol;
  }

  if (opts.refine && m > 0) refine_beta(T);

  sol.status = LpStatus::Optimal;
  sol.x.assign(n, 0.0);
  for (int j = 0; j < n; ++j)
    if (T.status[j] != ColStatus::Basic) sol.x[j] = T.nb_value(j);
  for (int i = 0; i < m; ++i)
    if (T.basis[i] < n) sol.x[T.basis[i]] = T.beta(i);
  sol.objective = 0.0;
  for (const auto& t : model.objective()) sol.objective += t.coef * sol.x[t.var];
  sol.certificate = "optimal basic solution";
  return sol;
}

}  // namespace mtlplan::solver
