// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mtlplan/dynamics.hpp"
#include "mtlplan/encode.hpp"
#include "mtlplan/scenario.hpp"
#include "mtlplan/solver.hpp"

namespace mtlplan::plan {

/// Per-sub-task planning record.
struct SubTaskResult {
  std::string label;
  int start_step = 0;  // absolute step where the sub-task's slot begins
  int waits = 0;       // hold steps inserted before the flight segment
  int horizon = 0;     // steps actually flown (allotted minus waits)
  /// Steps from segment start until the reach proposition first holds
  /// (-1 when the formula has no reach proposition).
  int reach_step = -1;
  solver::MilpStatus status = solver::MilpStatus::Infeasible;
  double objective = 0.0;
  long nodes = 0;
  int binaries = 0;
  double cpu_sec = 0.0;
};

/// Executed state/input sequence with per-step mode labels.
struct Trajectory {
  double dt = 0.2;
  std::vector<Eigen::VectorXd> states;   // steps 0..K
  std::vector<Eigen::VectorXd> inputs;   // steps 0..K-1
  std::vector<dyn::ModeId> step_modes;   // one per input step

  int steps() const { return static_cast<int>(inputs.size()); }
  /// Position at step t, held at the final state past the end (a finished
  /// vehicle keeps occupying its landing slot).
  Eigen::Vector3d pos(int t) const;
};

struct MissionResult {
  int uav = 0;
  bool success = false;
  std::string failure;  // empty on success
  Trajectory traj;
  std::vector<SubTaskResult> subtasks;
};

struct FleetPlan {
  std::vector<MissionResult> missions;
  bool success() const {
    for (const auto& m : missions)
      if (!m.success) return false;
    return !missions.empty();
  }
};

struct PlannerOptions {
  PlannerOptions() {
    // Planning is feasibility-first: a generous optimality gap stops the
    // search as soon as a reasonable trajectory is proven close enough,
    // instead of spending the budget tightening the effort bound.
    milp.gap = 0.5;
  }
  solver::MilpOptions milp;
  encode::BigMConfig bigm;
  bool avoidance = true;
};

struct PlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Static checks of a scenario's mission decompositions: horizons fit the
/// step budget, formulas parse over the workspace's propositions, and
/// consecutive sub-task modes are connected in the hybrid model.
void validate_decomposition(const scenario::Scenario& s);

/// Plans one mission against already-committed trajectories (prioritized
/// planning). Sub-tasks are solved in order; an infeasible sub-task triggers
/// hold-and-retry: a one-step braking problem in the same mode, charged
/// against the sub-task's horizon.
MissionResult plan_mission(const scenario::Scenario& s,
                           const dyn::HybridModel& model,
                           const scenario::MissionSpec& mission,
                           const std::vector<Trajectory>& committed,
                           const PlannerOptions& opts);

/// Plans every mission in listed priority order.
FleetPlan plan_fleet(const scenario::Scenario& s,
                     const PlannerOptions& opts = {});

/// Independent check of a finished plan: dynamics residuals, mode-transition
/// legality, formula satisfaction over the labeled trace of each sub-task
/// segment, and pairwise separation. Returns human-readable violations
/// (empty means the plan verifies).
std::vector<std::string> verify_fleet(const scenario::Scenario& s,
                                      const FleetPlan& p);

}  // namespace mtlplan::plan
