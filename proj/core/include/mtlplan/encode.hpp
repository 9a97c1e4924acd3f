// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mtlplan/dynamics.hpp"
#include "mtlplan/milp.hpp"
#include "mtlplan/mtl.hpp"
#include "mtlplan/workspace.hpp"

namespace mtlplan::encode {

struct BigMConfig {
  /// Fixed big-M; 0 selects a per-halfspace value from the flight volume.
  double M = 0.0;
  /// Strict-inequality gap for the indicator lower side.
  double epsilon = 1e-6;
};

struct EncodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Big-M satisfaction encoding of an NNF, horizon-bound MTL formula over
/// position variables of an existing model. One satisfaction variable per
/// (subformula, time) pair is created on demand, so only the time points the
/// root formula actually consults are encoded.
class FormulaEncoder {
 public:
  /// `position_vars(t)` returns the model variable ids of the position
  /// coordinates at step t (dimension must match the workspace).
  FormulaEncoder(milp::MilpModel& model, const ws::Workspace& workspace,
                 std::function<std::vector<int>(int)> position_vars,
                 int horizon, BigMConfig cfg = {});

  /// Satisfaction variable for f at step t (1 iff satisfied, under the
  /// epsilon-robust reading of halfspace boundaries). f must be in NNF with
  /// every interval bounded.
  int encode_at(const mtl::Formula& f, int t);

  /// Applies to_nnf and bind_horizon, then pins satisfaction at step 0:
  /// K^f_0 = 1.
  void assert_root(const mtl::Formula& f);

  int binaries_added() const { return binaries_added_; }

 private:
  int halfspace_indicator(const ws::Halfspace& f, int t);
  int atom_var(const std::string& prop, int t, bool negated);
  int fresh_k(const std::string& tag, int t);
  void check_time(int t) const;

  milp::MilpModel& model_;
  const ws::Workspace& ws_;
  std::function<std::vector<int>(int)> pos_;
  int horizon_;
  BigMConfig cfg_;
  std::map<std::pair<const void*, int>, int> memo_;
  std::map<std::pair<int, std::string>, int> face_memo_;
  int binaries_added_ = 0;
  int serial_ = 0;
};

/// Variable layout of an encoded sub-task problem.
struct SubtaskEncoding {
  milp::MilpModel model;
  std::vector<std::vector<int>> x_vars;  // [t][state]
  std::vector<std::vector<int>> u_vars;  // [t][input]
  int horizon = 0;
};

/// Trajectory MILP for one sub-task: states x_0..x_T under one mode envelope
/// (x_0 fixed and exempt), exact discrete dynamics, the formula's
/// satisfaction constraint at step 0, and a minimum-effort objective. When
/// `next_mode` is given, x_T must additionally lie in its envelope so the
/// mode switch at the junction is dynamically consistent.
SubtaskEncoding encode_subtask_problem(const ws::Workspace& workspace,
                                       const dyn::LinearMode& mode,
                                       const mtl::Formula& spec,
                                       const Eigen::VectorXd& x0, int T,
                                       const BigMConfig& cfg = {},
                                       const dyn::LinearMode* next_mode = nullptr);

/// Keep-out boxes around another vehicle's committed positions: at each step
/// t >= 1 the own position must leave the axis-aligned box of half-width
/// `half_width` centered at other_pos[t], enforced by one escape binary per
/// face. Steps the vehicle cannot reach yet (outside the own reachable tube
/// grown by `rho`) are skipped. Entries of other_pos past the horizon
/// constrain the final state with the box inflated by `terminal_margin`, so
/// the segment ends with enough room to brake before the neighbor's
/// near-future positions.
void encode_neighbor_avoidance(SubtaskEncoding& enc,
                               const ws::Workspace& workspace,
                               const std::vector<Eigen::Vector3d>& other_pos,
                               const Eigen::Vector3d& own_start,
                               double speed_per_step, double half_width,
                               double rho, const BigMConfig& cfg = {},
                               double terminal_margin = 0.35);

}  // namespace mtlplan::encode
