// Discretization exactness, mode envelopes, and the transition relation.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mtlplan/dynamics.hpp"

using namespace mtlplan::dyn;

TEST_CASE("hover linearization is nilpotent: (A - I)^4 vanishes exactly") {
  // The continuous Jacobian only chains position <- velocity <- attitude
  // <- body rate, so A_d - I is a polynomial in a nilpotent matrix and any
  // fourth power is exactly zero (no tolerance).
  auto m = hover_mode(QuadParams{}, 0.2);
  Eigen::MatrixXd N = m.A - Eigen::MatrixXd::Identity(kNumStates, kNumStates);
  Eigen::MatrixXd N4 = N * N * N * N;
  CHECK(N4.cwiseAbs().maxCoeff() == 0.0);
  CHECK((N * N * N).cwiseAbs().maxCoeff() > 0.0);  // index is exactly 4
}

TEST_CASE("ZOH semigroup property: two 0.1 s steps equal one 0.2 s step") {
  auto half = hover_mode(QuadParams{}, 0.1);
  auto full = hover_mode(QuadParams{}, 0.2);
  Eigen::MatrixXd A2 = half.A * half.A;
  CHECK((A2 - full.A).cwiseAbs().maxCoeff() < 1e-12);
  // Constant input over both sub-steps: B_0.2 = A_0.1 B_0.1 + B_0.1.
  Eigen::MatrixXd B2 = half.A * half.B + half.B;
  CHECK((B2 - full.B).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("discretize_zoh matches a long truncated series") {
  Eigen::MatrixXd Ac = Eigen::MatrixXd::Zero(3, 3);
  Ac(0, 1) = 1.0;
  Ac(1, 2) = 1.0;
  Eigen::MatrixXd Bc(3, 1);
  Bc << 0, 0, 1;
  double dt = 0.37;
  Eigen::MatrixXd Ad, Bd;
  discretize_zoh(Ac, Bc, dt, Ad, Bd);

  // Oracle: exp(Ac dt) and the input integral by brute series summation.
  Eigen::MatrixXd expA = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd intA = Eigen::MatrixXd::Zero(3, 3);
  for (int k = 1; k <= 30; ++k) {
    intA += term * (dt / k);
    term = term * Ac * (dt / k);
    expA += term;
  }
  CHECK((Ad - expA).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((Bd - intA * Bc).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("hover equilibrium is a fixed point under zero input") {
  HybridModel model;
  const auto& m = model.mode(ModeId::Hover);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(kNumStates);
  x(0) = 3.0;
  x(1) = 4.0;
  x(2) = 1.0;
  Eigen::VectorXd nxt = m.A * x + m.c;  // u = 0
  CHECK((nxt - x).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("pitch produces forward acceleration with the right sign") {
  HybridModel model;
  const auto& m = model.mode(ModeId::Hover);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(kNumStates);
  x(7) = 0.1;  // pitch forward
  Eigen::VectorXd nxt = m.A * x + m.c;
  CHECK(nxt(3) > 0.0);   // vx grows
  CHECK(nxt(4) == 0.0);  // vy untouched
  x.setZero();
  x(6) = 0.1;  // roll
  nxt = m.A * x + m.c;
  CHECK(nxt(4) < 0.0);  // positive roll accelerates toward -y
}

TEST_CASE("all modes share one linearization and differ in envelopes") {
  HybridModel model;
  const auto& hover = model.mode(ModeId::Hover);
  for (const auto& [id, m] : model.modes()) {
    CHECK((m.A - hover.A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((m.B - hover.B).cwiseAbs().maxCoeff() == 0.0);
    CHECK((m.c - hover.c).cwiseAbs().maxCoeff() == 0.0);
    // Envelope sanity: velocity boxes are proper and altitude fits the cap.
    for (int i = 0; i < kNumStates; ++i) CHECK(m.x_min(i) <= m.x_max(i));
  }
  CHECK(model.mode(ModeId::Steer).x_max(3) >
        model.mode(ModeId::Hover).x_max(3));  // steering is the fast mode
}

TEST_CASE("transition relation") {
  HybridModel model;
  CHECK(model.transition_allowed(ModeId::TakeOff, ModeId::Hover));
  CHECK(model.transition_allowed(ModeId::TakeOff, ModeId::Steer));
  CHECK(model.transition_allowed(ModeId::Steer, ModeId::Land));
  CHECK(model.transition_allowed(ModeId::Hover, ModeId::Hover));
  CHECK_FALSE(model.transition_allowed(ModeId::Land, ModeId::Hover));
  CHECK_FALSE(model.transition_allowed(ModeId::Land, ModeId::Steer));
}

TEST_CASE("grasp is flown as a hover / descend / climb dip") {
  HybridModel model;
  const auto& seq = model.grasp_sequence();
  REQUIRE(seq.size() == 3);
  CHECK(seq[0] == ModeId::Hover);
  CHECK(seq[1] == ModeId::Land);
  CHECK(seq[2] == ModeId::TakeOff);
  // The widened grasp envelope admits the dip's descent speed.
  CHECK(model.grasp_envelope().x_min(5) <= -1.0);
}

TEST_CASE("mode names round-trip") {
  for (ModeId m : {ModeId::TakeOff, ModeId::Hover, ModeId::Steer, ModeId::Land,
                   ModeId::Grasp})
    CHECK(mode_from_name(mode_name(m)) == m);
  CHECK_THROWS(mode_from_name("warp"));
}
