// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mtlplan/plan.hpp"

namespace mtlplan::plan {

namespace {

// Proposition alphabet of a workspace: region names plus the primed variants
// of regions that define an altitude threshold.
std::set<std::string> alphabet(const ws::Workspace& w) {
  std::set<std::string> pi;
  for (const auto& [name, r] : w.regions()) {
    pi.insert(name);
    if (r.has_z_prime()) pi.insert(name + "_prime");
  }
  return pi;
}

// Clamps every bounded interval endpoint to the remaining horizon, so a
// formula written for the full sub-task slot stays meaningful after hold
// steps consumed part of it.
mtl::Formula clamp_intervals(const mtl::Formula& f, int rem) {
  using mtl::Formula;
  auto clamp = [&](mtl::Interval i) {
    i.lo = std::min(i.lo, rem);
    if (i.bounded()) i.hi = std::min(*i.hi, rem);
    return i;
  };
  switch (f.op()) {
    case mtl::Op::True:
    case mtl::Op::Atom:
      return f;
    case mtl::Op::Not:
      return Formula::negation(clamp_intervals(f.child(), rem));
    case mtl::Op::And:
    case mtl::Op::Or: {
      std::vector<Formula> ks;
      for (const auto& c : f.children()) ks.push_back(clamp_intervals(c, rem));
      return f.op() == mtl::Op::And ? Formula::conjunction(std::move(ks))
                                    : Formula::disjunction(std::move(ks));
    }
    case mtl::Op::Next:
      return Formula::next(clamp_intervals(f.child(), rem - 1));
    case mtl::Op::Eventually:
      return Formula::eventually(clamp(f.interval()),
                                 clamp_intervals(f.child(), rem));
    case mtl::Op::Always:
      return Formula::always(clamp(f.interval()),
                             clamp_intervals(f.child(), rem));
    case mtl::Op::Until:
      return Formula::until(clamp(f.interval()),
                            clamp_intervals(f.child(0), rem),
                            clamp_intervals(f.child(1), rem));
  }
  throw std::logic_error("unreachable");
}

const dyn::LinearMode& envelope(const dyn::HybridModel& model, dyn::ModeId m) {
  return m == dyn::ModeId::Grasp ? model.grasp_envelope() : model.mode(m);
}

double mode_speed(const dyn::LinearMode& m) {
  return std::max({std::abs(m.x_max(3)), std::abs(m.x_min(3)),
                   std::abs(m.x_max(4)), std::abs(m.x_min(4)),
                   std::abs(m.x_max(5)), std::abs(m.x_min(5))});
}

double mode_tilt(const dyn::LinearMode& m) {
  return std::max({std::abs(m.x_max(6)), std::abs(m.x_min(6)),
                   std::abs(m.x_max(7)), std::abs(m.x_min(7))});
}

void add_avoidance(encode::SubtaskEncoding& enc, const scenario::Scenario& s,
                   const std::vector<Trajectory>& committed,
                   const Eigen::VectorXd& x, int abs_step, int horizon,
                   const dyn::LinearMode& env, const PlannerOptions& opts) {
  if (!opts.avoidance) return;
  constexpr int kLookahead = 5;  // terminal braking-margin steps
  // Per-step reachable-tube growth: velocity bound plus the extra distance
  // acceleration can add within one sampling interval. Keeping this tight
  // lets the encoder drop keep-out boxes the vehicle cannot reach yet.
  const double step_reach =
      mode_speed(env) * s.dt +
      0.5 * s.dt * s.dt * s.params.gravity * mode_tilt(env);
  for (const auto& other : committed) {
    std::vector<Eigen::Vector3d> pos;
    pos.reserve(horizon + kLookahead + 1);
    for (int t = 0; t <= horizon + kLookahead; ++t)
      pos.push_back(other.pos(abs_step + t));
    encode::encode_neighbor_avoidance(enc, s.workspace, pos, x.head<3>(),
                                      step_reach, 2.0 * s.params.r_safe,
                                      0.05, opts.bigm);
  }
}

// Mode labels for a flown segment. A grasp segment is flown as a
// hover / descend / climb dip, so its steps are labeled with that sequence.
std::vector<dyn::ModeId> segment_modes(const dyn::HybridModel& model,
                                       dyn::ModeId mode, int steps) {
  if (mode != dyn::ModeId::Grasp)
    return std::vector<dyn::ModeId>(steps, mode);
  const auto& seq = model.grasp_sequence();
  std::vector<dyn::ModeId> out;
  out.reserve(steps);
  for (int t = 0; t < steps; ++t) {
    size_t phase = std::min(seq.size() - 1,
                            static_cast<size_t>(t * seq.size() / std::max(1, steps)));
    out.push_back(seq[phase]);
  }
  return out;
}

bool prop_holds(const ws::Workspace& w, const std::string& prop,
                const Eigen::VectorXd& state) {
  for (const auto& part : w.polytopes_for(prop))
    if (part.contains(state.head(w.dim()))) return true;
  return false;
}

}  // namespace

Eigen::Vector3d Trajectory::pos(int t) const {
  if (states.empty()) return Eigen::Vector3d::Zero();
  const auto& x = states[std::clamp<int>(t, 0, static_cast<int>(states.size()) - 1)];
  return x.head<3>();
}

void validate_decomposition(const scenario::Scenario& s) {
  dyn::HybridModel model(s.params, s.dt);
  const auto pi = alphabet(s.workspace);
  for (const auto& m : s.missions) {
    int total = 0;
    for (const auto& st : m.subtasks) total += st.horizon;
    total += m.start_delay;
    if (total > m.total_steps)
      throw PlanError("mission " + std::to_string(m.uav) +
                      ": sub-task horizons sum to " + std::to_string(total) +
                      " > budget " + std::to_string(m.total_steps));
    for (size_t k = 0; k < m.subtasks.size(); ++k) {
      const auto& st = m.subtasks[k];
      mtl::Formula f = mtl::parse_mtl(st.formula, pi);
      // must be encodable and fit its slot
      mtl::bind_horizon(mtl::to_nnf(f), st.horizon);
      if (k + 1 < m.subtasks.size()) {
        dyn::ModeId a = st.mode, b = m.subtasks[k + 1].mode;
        // A grasp segment ends in TakeOff and starts in Hover.
        dyn::ModeId from = a == dyn::ModeId::Grasp ? model.grasp_sequence().back() : a;
        dyn::ModeId to = b == dyn::ModeId::Grasp ? model.grasp_sequence().front() : b;
        if (!model.transition_allowed(from, to))
          throw PlanError("mission " + std::to_string(m.uav) +
                          ": illegal mode switch " + dyn::mode_name(a) +
                          " -> " + dyn::mode_name(b) + " after sub-task '" +
                          st.label + "'");
      }
    }
    if (m.start.size() != dyn::kNumStates)
      throw PlanError("mission start state must have full dimension");
    if (m.start_delay > 0) {
      Eigen::VectorXd held =
          model.mode(dyn::ModeId::Hover).A * m.start +
          model.mode(dyn::ModeId::Hover).c;
      if ((held - m.start).lpNorm<Eigen::Infinity>() > 1e-9)
        throw PlanError("mission " + std::to_string(m.uav) +
                        ": start state is not an equilibrium, cannot delay "
                        "departure");
    }
  }
}

MissionResult plan_mission(const scenario::Scenario& s,
                           const dyn::HybridModel& model,
                           const scenario::MissionSpec& mission,
                           const std::vector<Trajectory>& committed,
                           const PlannerOptions& opts) {
  const auto pi = alphabet(s.workspace);
  MissionResult res;
  res.uav = mission.uav;
  res.traj.dt = s.dt;
  res.traj.states.push_back(mission.start);

  Eigen::VectorXd x = mission.start;
  int abs_step = 0;

  // Departure stagger: sit parked at the start state. With zero velocity and
  // zero input the linearized dynamics hold the state exactly.
  for (int t = 0; t < mission.start_delay; ++t) {
    res.traj.states.push_back(x);
    res.traj.inputs.push_back(Eigen::VectorXd::Zero(dyn::kNumInputs));
    res.traj.step_modes.push_back(mission.subtasks.front().mode);
    ++abs_step;
  }

  for (size_t k = 0; k < mission.subtasks.size(); ++k) {
    const auto& spec = mission.subtasks[k];
    const dyn::LinearMode& env = envelope(model, spec.mode);
    const dyn::LinearMode* next_env =
        k + 1 < mission.subtasks.size()
            ? &envelope(model, mission.subtasks[k + 1].mode)
            : nullptr;
    mtl::Formula formula = mtl::parse_mtl(spec.formula, pi);

    SubTaskResult st;
    st.label = spec.label;
    st.start_step = abs_step;

    int rem = spec.horizon;
    bool flown = false;
    while (!flown) {
      if (rem <= 0) {
        res.failure = "sub-task '" + spec.label +
                      "' ran out of steps while holding for clearance";
        res.subtasks.push_back(st);
        return res;
      }
      encode::SubtaskEncoding enc;
      bool encodable = true;
      try {
        enc = encode::encode_subtask_problem(
            s.workspace, env, clamp_intervals(formula, rem), x, rem,
            opts.bigm, next_env);
      } catch (const mtl::HorizonError&) {
        encodable = false;
      }
      solver::MilpSolution sol;
      if (encodable) {
        // Require a calm hand-off state: the flight envelope alone admits
        // terminal momentum that would immediately break the next sub-task's
        // invariant (e.g. arriving at a slot too fast to stay inside it).
        // The terminal state must also sit inside the next mode's envelope,
        // not merely be able to reach it one step later, and the bounds
        // leave margin for one step of attitude-induced velocity drift
        // (attitude acts on velocity with a one-step delay, so a terminal
        // state riding both the velocity and attitude bounds is a dead end).
        constexpr double kSettle[] = {0.35, 0.35, 0.35,  // velocity
                                      0.08, 0.08,        // attitude
                                      0.40, 0.40};       // body rates
        for (int i = 0; i < dyn::kNumStates; ++i) {
          double lo = i >= 3 ? -kSettle[i - 3] : -milp::kInf;
          double hi = i >= 3 ? kSettle[i - 3] : milp::kInf;
          if (next_env) {
            lo = std::max(lo, next_env->x_min(i));
            hi = std::min(hi, next_env->x_max(i));
          }
          int v = enc.x_vars[rem][i];
          if (hi < milp::kInf) enc.model.add_le({{v, 1.0}}, hi);
          if (lo > -milp::kInf) enc.model.add_ge({{v, 1.0}}, lo);
        }
        add_avoidance(enc, s, committed, x, abs_step, rem, env, opts);
        sol = solver::solve_milp(enc.model, opts.milp);
      }
      bool accepted = encodable && (sol.status == solver::MilpStatus::Optimal ||
                                    sol.status == solver::MilpStatus::BudgetFeasible);
      if (accepted) {
        st.status = sol.status;
        st.objective = sol.objective;
        st.nodes += sol.nodes;
        st.cpu_sec += sol.cpu_sec;
        st.binaries = enc.model.num_binaries();
        st.horizon = rem;
        auto modes = segment_modes(model, spec.mode, rem);
        for (int t = 1; t <= rem; ++t) {
          Eigen::VectorXd xt(dyn::kNumStates);
          for (int i = 0; i < dyn::kNumStates; ++i)
            xt(i) = sol.x[enc.x_vars[t][i]];
          Eigen::VectorXd ut(dyn::kNumInputs);
          for (int i = 0; i < dyn::kNumInputs; ++i)
            ut(i) = sol.x[enc.u_vars[t - 1][i]];
          res.traj.states.push_back(xt);
          res.traj.inputs.push_back(ut);
          res.traj.step_modes.push_back(modes[t - 1]);
        }
        if (auto reach = mtl::reach_proposition(formula)) {
          for (int t = 0; t <= rem; ++t) {
            if (prop_holds(s.workspace, *reach,
                           res.traj.states[abs_step + t])) {
              st.reach_step = t;
              break;
            }
          }
        }
        x = res.traj.states.back();
        abs_step += rem;
        flown = true;
        break;
      }

      // Hold for one step (braking problem in the same envelope) and retry
      // with the shrunken slot.
      encode::SubtaskEncoding hold = encode::encode_subtask_problem(
          s.workspace, env, mtl::Formula::top(), x, 1, opts.bigm, nullptr);
      // Replace the effort objective with braking: minimize velocity,
      // attitude, and body rates at the held step via epigraph variables,
      // so repeated holds settle near hover instead of ending in an
      // attitude the envelope cannot continue from.
      for (int i = 3; i <= 9; ++i) {
        int sv = hold.model.add_continuous(0.0, milp::kInf,
                                           "brake" + std::to_string(i));
        hold.model.add_ge({{sv, 1.0}, {hold.x_vars[1][i], -1.0}}, 0.0);
        hold.model.add_ge({{sv, 1.0}, {hold.x_vars[1][i], 1.0}}, 0.0);
        hold.model.obj_coef(sv, 100.0);
      }
      add_avoidance(hold, s, committed, x, abs_step, 1, env, opts);
      auto hsol = solver::solve_milp(hold.model, opts.milp);
      if (hsol.status != solver::MilpStatus::Optimal &&
          hsol.status != solver::MilpStatus::BudgetFeasible) {
        auto status_name = [](solver::MilpStatus v) {
          switch (v) {
            case solver::MilpStatus::Optimal: return "optimal";
            case solver::MilpStatus::Infeasible: return "infeasible";
            case solver::MilpStatus::BudgetFeasible: return "budget-feasible";
            case solver::MilpStatus::BudgetNoIncumbent: return "budget-no-incumbent";
          }
          return "?";
        };
        res.failure = "sub-task '" + spec.label + "' failed (attempt: " +
                      (encodable ? status_name(sol.status) : "not encodable") +
                      ") and so did the hold step (" +
                      status_name(hsol.status) + ")";
        res.subtasks.push_back(st);
        return res;
      }
      Eigen::VectorXd xt(dyn::kNumStates);
      for (int i = 0; i < dyn::kNumStates; ++i)
        xt(i) = hsol.x[hold.x_vars[1][i]];
      Eigen::VectorXd ut(dyn::kNumInputs);
      for (int i = 0; i < dyn::kNumInputs; ++i)
        ut(i) = hsol.x[hold.u_vars[0][i]];
      res.traj.states.push_back(xt);
      res.traj.inputs.push_back(ut);
      res.traj.step_modes.push_back(spec.mode == dyn::ModeId::Grasp
                                        ? dyn::ModeId::Hover
                                        : spec.mode);
      x = xt;
      ++abs_step;
      ++st.waits;
      --rem;
    }
    res.subtasks.push_back(st);
  }
  res.success = true;
  return res;
}

FleetPlan plan_fleet(const scenario::Scenario& s, const PlannerOptions& opts) {
  validate_decomposition(s);
  dyn::HybridModel model(s.params, s.dt);
  FleetPlan fp;
  std::vector<Trajectory> committed;
  for (const auto& m : s.missions) {
    MissionResult r = plan_mission(s, model, m, committed, opts);
    if (r.success) committed.push_back(r.traj);
    fp.missions.push_back(std::move(r));
  }
  return fp;
}

std::vector<std::string> verify_fleet(const scenario::Scenario& s,
                                      const FleetPlan& p) {
  std::vector<std::string> bad;
  dyn::HybridModel model(s.params, s.dt);
  const auto& hover = model.mode(dyn::ModeId::Hover);
  const auto pi = alphabet(s.workspace);

  for (size_t mi = 0; mi < p.missions.size(); ++mi) {
    const auto& mr = p.missions[mi];
    if (!mr.success) continue;
    const auto& tr = mr.traj;
    std::string who = "uav " + std::to_string(mr.uav);

    // Dynamics (every mode shares the hover linearization).
    for (int t = 0; t < tr.steps(); ++t) {
      Eigen::VectorXd pred =
          hover.A * tr.states[t] + hover.B * tr.inputs[t] + hover.c;
      double err = (pred - tr.states[t + 1]).lpNorm<Eigen::Infinity>();
      if (err > 1e-6)
        bad.push_back(who + ": dynamics residual " + std::to_string(err) +
                      " at step " + std::to_string(t));
    }
    // Mode switches.
    for (int t = 0; t + 1 < tr.steps(); ++t) {
      dyn::ModeId a = tr.step_modes[t], b = tr.step_modes[t + 1];
      if (a != b && !model.transition_allowed(a, b))
        bad.push_back(who + ": illegal mode switch " + dyn::mode_name(a) +
                      " -> " + dyn::mode_name(b) + " at step " +
                      std::to_string(t + 1));
    }
    // Labeled trace over the whole flight.
    mtl::Trace trace;
    for (const auto& xt : tr.states) {
      mtl::LabelSet L;
      for (const auto& prop : pi)
        if (prop_holds(s.workspace, prop, xt)) L.insert(prop);
      trace.labels.push_back(std::move(L));
    }
    // Each flown segment satisfies its (clamped, horizon-bound) formula.
    const auto& mission = s.missions.at(mi);
    for (size_t k = 0; k < mr.subtasks.size(); ++k) {
      const auto& st = mr.subtasks[k];
      const auto& spec = mission.subtasks[k];
      mtl::Trace seg;
      int seg_start = st.start_step + st.waits;
      for (int t = seg_start;
           t <= seg_start + st.horizon &&
           t < static_cast<int>(trace.labels.size());
           ++t)
        seg.labels.push_back(trace.labels[t]);
      mtl::Formula f = mtl::bind_horizon(
          mtl::to_nnf(clamp_intervals(mtl::parse_mtl(spec.formula, pi),
                                      st.horizon)),
          st.horizon);
      if (!mtl::evaluate_at(f, seg, 0))
        bad.push_back(who + ": sub-task '" + st.label +
                      "' formula does not hold on the flown segment");
    }
  }
  // Pairwise separation (finished vehicles hold their final position).
  int max_steps = 0;
  for (const auto& mr : p.missions)
    if (mr.success) max_steps = std::max(max_steps, mr.traj.steps());
  for (size_t i = 0; i < p.missions.size(); ++i) {
    for (size_t j = i + 1; j < p.missions.size(); ++j) {
      if (!p.missions[i].success || !p.missions[j].success) continue;
      for (int t = 0; t <= max_steps; ++t) {
        double d = (p.missions[i].traj.pos(t) - p.missions[j].traj.pos(t))
                       .lpNorm<Eigen::Infinity>();
        if (d < 2.0 * s.params.r_safe - 1e-6)
          bad.push_back("uavs " + std::to_string(p.missions[i].uav) + " and " +
                        std::to_string(p.missions[j].uav) +
                        " are separated by only " + std::to_string(d) +
                        " at step " + std::to_string(t));
      }
    }
  }
  return bad;
}

}  // namespace mtlplan::plan
