// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mtlplan::dyn {

/// Flight modes of the hybrid quadrotor model.
enum class ModeId { TakeOff, Hover, Steer, Land, Grasp };

std::string mode_name(ModeId m);
ModeId mode_from_name(const std::string& name);

/// Physical parameters (SI units).
struct QuadParams {
  double mass = 1.0;
  Eigen::Matrix3d inertia =
      Eigen::Vector3d(0.01, 0.01, 0.02).asDiagonal();
  double gravity = 9.81;
  double r_safe = 0.35;        // collision radius per vehicle
  double rho = 2.0;            // avoidance pruning radius scale
  double max_altitude = 1.5;
};

/// Discrete-time linearized mode: x+ = A x + B u + c, with box bounds on
/// state and input deviations around the operating point.
struct LinearMode {
  ModeId id;
  Eigen::MatrixXd A;  // 10x10
  Eigen::MatrixXd B;  // 10x3
  Eigen::VectorXd c;  // affine drift (zero at hover)
  Eigen::VectorXd x_min, x_max;
  Eigen::VectorXd u_min, u_max;
};

/// Exact zero-order hold of (Ac, Bc) over dt. The hover Jacobian is
/// nilpotent, so the exponential series terminates and this is closed form.
void discretize_zoh(const Eigen::MatrixXd& Ac, const Eigen::MatrixXd& Bc,
                    double dt, Eigen::MatrixXd& Ad, Eigen::MatrixXd& Bd);

/// States: [x y z vx vy vz roll pitch omega_roll omega_pitch];
/// inputs: [thrust offset, torque_x, torque_y] around the hover trim.
constexpr int kNumStates = 10;
constexpr int kNumInputs = 3;

LinearMode hover_mode(const QuadParams& p, double dt);

/// Hybrid model: one linearization shared by every mode, distinct operating
/// envelopes, and a transition relation between modes.
class HybridModel {
 public:
  explicit HybridModel(const QuadParams& p = {}, double dt = 0.2);

  double dt() const { return dt_; }
  const QuadParams& params() const { return params_; }
  const LinearMode& mode(ModeId m) const;
  const std::map<ModeId, LinearMode>& modes() const { return modes_; }
  bool transition_allowed(ModeId from, ModeId to) const;

  /// Grasping is flown as a Hover-Land-TakeOff dip; the planner encodes it
  /// with this widened envelope and labels steps with the sequence below.
  const LinearMode& grasp_envelope() const { return grasp_; }
  const std::vector<ModeId>& grasp_sequence() const { return grasp_seq_; }

 private:
  QuadParams params_;
  double dt_;
  std::map<ModeId, LinearMode> modes_;
  LinearMode grasp_;
  std::vector<ModeId> grasp_seq_;
  std::set<std::pair<ModeId, ModeId>> edges_;
};

}  // namespace mtlplan::dyn
