// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mtlplan/dynamics.hpp"
#include "mtlplan/workspace.hpp"

namespace mtlplan::scenario {

struct SubTaskSpec {
  std::string label;
  std::string formula;
  dyn::ModeId mode = dyn::ModeId::Hover;
  int horizon = 0;  // steps allotted to this sub-task
};

struct MissionSpec {
  int uav = 0;
  Eigen::VectorXd start;  // full state
  int total_steps = 0;    // step budget: start_delay plus the sub-task slots
  /// Steps to sit parked at the start state before the first sub-task
  /// (staggers departures in multi-vehicle scenarios).
  int start_delay = 0;
  std::vector<SubTaskSpec> subtasks;
};

struct Scenario {
  ws::Workspace workspace;
  dyn::QuadParams params;
  double dt = 0.2;
  std::vector<MissionSpec> missions;
};

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// JSON schema: { "workspace": {bounds, regions}, "dt", "quad_params"?,
/// "missions": [{uav, start: [x,y,z] or full state, total_steps,
/// subtasks: [{label, formula, mode, horizon}]}] }.
Scenario load_scenario(const std::string& json_text);
std::string scenario_to_json(const Scenario& s);

/// The built-in rescue mission for n vehicles: ground slots on the victim
/// side of a full-height wall, a single window, per-vehicle pickup targets
/// and safe-zone slots behind the wall. Supports n in 1..10.
Scenario build_rescue_scenario(int n);

}  // namespace mtlplan::scenario
