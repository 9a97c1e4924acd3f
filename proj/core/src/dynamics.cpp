// SPDX-License-Identifier: Apache-2.0

#include <limits>
#include <stdexcept>

#include "mtlplan/dynamics.hpp"

namespace mtlplan::dyn {

std::string mode_name(ModeId m) {
  switch (m) {
    case ModeId::TakeOff:
      return "TakeOff";
    case ModeId::Hover:
      return "Hover";
    case ModeId::Steer:
      return "Steer";
    case ModeId::Land:
      return "Land";
    case ModeId::Grasp:
      return "Grasp";
  }
  return "?";
}

ModeId mode_from_name(const std::string& name) {
  if (name == "TakeOff") return ModeId::TakeOff;
  if (name == "Hover") return ModeId::Hover;
  if (name == "Steer") return ModeId::Steer;
  if (name == "Land") return ModeId::Land;
  if (name == "Grasp") return ModeId::Grasp;
  throw std::invalid_argument("unknown mode: " + name);
}

void discretize_zoh(const Eigen::MatrixXd& Ac, const Eigen::MatrixXd& Bc,
                    double dt, Eigen::MatrixXd& Ad, Eigen::MatrixXd& Bd) {
  const int n = static_cast<int>(Ac.rows());
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  // Ad = sum Ac^k dt^k / k!,  Bd = (sum Ac^k dt^(k+1) / (k+1)!) Bc.
  // Terminates once Ac^k vanishes (hover Jacobian is nilpotent); a generous
  // order cap with a convergence check covers the general case.
  Eigen::MatrixXd term = I;
  Ad = I;
  Eigen::MatrixXd S = I * dt;
  Eigen::MatrixXd bterm = I * dt;
  for (int k = 1; k <= 40; ++k) {
    term = (term * Ac * (dt / k)).eval();
    Ad += term;
    bterm = (bterm * Ac * (dt / (k + 1))).eval();
    S += bterm;
    if (term.lpNorm<Eigen::Infinity>() < 1e-300 &&
        bterm.lpNorm<Eigen::Infinity>() < 1e-300)
      break;
  }
  Bd = S * Bc;
}

namespace {

// Continuous-time Jacobians of the quadrotor about hover (small angles,
// yaw held at zero).
void hover_jacobians(const QuadParams& p, Eigen::MatrixXd& Ac,
                     Eigen::MatrixXd& Bc) {
  Ac = Eigen::MatrixXd::Zero(kNumStates, kNumStates);
  Bc = Eigen::MatrixXd::Zero(kNumStates, kNumInputs);
  // position <- velocity
  Ac.block(0, 3, 3, 3).setIdentity();
  // horizontal acceleration <- attitude tilt
  Ac(3, 7) = p.gravity;   // vx_dot =  g * pitch
  Ac(4, 6) = -p.gravity;  // vy_dot = -g * roll
  // attitude <- body rates
  Ac.block(6, 8, 2, 2).setIdentity();
  // vertical acceleration <- thrust offset
  Bc(5, 0) = 1.0 / p.mass;
  // angular acceleration <- torques
  Bc.block(8, 1, 2, 2) = p.inertia.inverse().leftCols(2).topRows(2);
}

constexpr double kDInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd base_x_min(const QuadParams&) {
  Eigen::VectorXd lo(kNumStates);
  lo << -kDInf, -kDInf, 0.0, -1.0, -1.0, -0.5, -0.35, -0.35, -2.0, -2.0;
  return lo;
}

Eigen::VectorXd base_x_max(const QuadParams& p) {
  Eigen::VectorXd hi(kNumStates);
  hi << kDInf, kDInf, p.max_altitude, 1.0, 1.0, 0.5, 0.35, 0.35, 2.0, 2.0;
  return hi;
}

}  // namespace

LinearMode hover_mode(const QuadParams& p, double dt) {
  LinearMode m;
  m.id = ModeId::Hover;
  Eigen::MatrixXd Ac, Bc;
  hover_jacobians(p, Ac, Bc);
  discretize_zoh(Ac, Bc, dt, m.A, m.B);
  m.c = Eigen::VectorXd::Zero(kNumStates);
  m.x_min = base_x_min(p);
  m.x_max = base_x_max(p);
  double fmax = 0.5 * p.mass * p.gravity;
  m.u_min = Eigen::Vector3d(-fmax, -0.1, -0.1);
  m.u_max = Eigen::Vector3d(fmax, 0.1, 0.1);
  return m;
}

HybridModel::HybridModel(const QuadParams& p, double dt)
    : params_(p), dt_(dt) {
  LinearMode hover = hover_mode(p, dt);

  LinearMode takeoff = hover;
  takeoff.id = ModeId::TakeOff;
  takeoff.x_min(3) = takeoff.x_min(4) = -0.5;
  takeoff.x_max(3) = takeoff.x_max(4) = 0.5;
  takeoff.x_min(5) = -0.05;  // climbing only (small settle allowance)
  takeoff.x_max(5) = 1.0;

  LinearMode steer = hover;
  steer.id = ModeId::Steer;
  steer.x_min(2) = 0.5;  // cruise altitude band
  steer.x_max(2) = 1.1;
  steer.x_min(3) = steer.x_min(4) = -1.5;
  steer.x_max(3) = steer.x_max(4) = 1.5;
  steer.x_min(5) = -1.0;
  steer.x_max(5) = 1.0;

  LinearMode land = hover;
  land.id = ModeId::Land;
  land.x_min(3) = land.x_min(4) = -0.5;
  land.x_max(3) = land.x_max(4) = 0.5;
  land.x_min(5) = -1.0;  // descending only
  land.x_max(5) = 0.05;

  modes_.emplace(ModeId::TakeOff, takeoff);
  modes_.emplace(ModeId::Hover, hover);
  modes_.emplace(ModeId::Steer, steer);
  modes_.emplace(ModeId::Land, land);

  grasp_ = hover;
  grasp_.id = ModeId::Grasp;
  grasp_.x_min(3) = grasp_.x_min(4) = -0.5;
  grasp_.x_max(3) = grasp_.x_max(4) = 0.5;
  grasp_.x_min(5) = -1.0;  // dip down and back up
  grasp_.x_max(5) = 1.0;
  grasp_seq_ = {ModeId::Hover, ModeId::Land, ModeId::TakeOff};

  auto edge = [&](ModeId a, ModeId b) { edges_.insert({a, b}); };
  edge(ModeId::TakeOff, ModeId::Hover);
  edge(ModeId::TakeOff, ModeId::Steer);
  edge(ModeId::Hover, ModeId::Hover);
  edge(ModeId::Hover, ModeId::Steer);
  edge(ModeId::Hover, ModeId::Land);
  edge(ModeId::Hover, ModeId::Grasp);
  edge(ModeId::Steer, ModeId::Hover);
  edge(ModeId::Steer, ModeId::Steer);
  edge(ModeId::Steer, ModeId::Grasp);
  edge(ModeId::Steer, ModeId::Land);
  edge(ModeId::Grasp, ModeId::Hover);
  edge(ModeId::Grasp, ModeId::Steer);
  edge(ModeId::Land, ModeId::TakeOff);
}

const LinearMode& HybridModel::mode(ModeId m) const {
  if (m == ModeId::Grasp) return grasp_;
  auto it = modes_.find(m);
  if (it == modes_.end())
    throw std::invalid_argument("mode not in model: " + mode_name(m));
  return it->second;
}

bool HybridModel::transition_allowed(ModeId from, ModeId to) const {
  return edges_.count({from, to}) > 0;
}

}  // namespace mtlplan::dyn
