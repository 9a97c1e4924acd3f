// SPDX-License-Identifier: Apache-2.0
//
// Mixed-integer encoding of MTL satisfaction. Halfspace membership gets a
// binary indicator with a big-M pair (epsilon-robust on the violated side);
// every boolean and temporal connective gets a continuous [0,1] satisfaction
// variable tied to its children, which the root constraint pins to 1.

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mtlplan/encode.hpp"

namespace mtlplan::encode {

namespace {

std::string face_key(const ws::Halfspace& f) {
  std::string k;
  char buf[32];
  for (int i = 0; i < f.h.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,", f.h(i));
    k += buf;
  }
  std::snprintf(buf, sizeof(buf), ";%.17g", f.a);
  k += buf;
  return k;
}

}  // namespace

FormulaEncoder::FormulaEncoder(milp::MilpModel& model,
                               const ws::Workspace& workspace,
                               std::function<std::vector<int>(int)> position_vars,
                               int horizon, BigMConfig cfg)
    : model_(model),
      ws_(workspace),
      pos_(std::move(position_vars)),
      horizon_(horizon),
      cfg_(cfg) {
  if (horizon_ < 0) throw EncodeError("negative horizon");
}

void FormulaEncoder::check_time(int t) const {
  if (t < 0 || t > horizon_)
    throw mtl::HorizonError("formula consults step " + std::to_string(t) +
                            " outside 0.." + std::to_string(horizon_));
}

int FormulaEncoder::fresh_k(const std::string& tag, int t) {
  return model_.add_continuous(
      0.0, 1.0, "K_" + tag + std::to_string(serial_++) + "_t" + std::to_string(t));
}

int FormulaEncoder::halfspace_indicator(const ws::Halfspace& f, int t) {
  auto key = std::make_pair(t, face_key(f));
  auto it = face_memo_.find(key);
  if (it != face_memo_.end()) return it->second;

  std::vector<int> x = pos_(t);
  if (static_cast<int>(x.size()) != ws_.dim())
    throw EncodeError("position variable arity does not match workspace");
  int b = model_.add_binary("b" + std::to_string(serial_++) + "_t" +
                            std::to_string(t));
  ++binaries_added_;

  double m_sat = cfg_.M > 0 ? cfg_.M
                            : std::max(cfg_.epsilon, ws_.max_violation(f));
  double m_vio =
      cfg_.M > 0
          ? cfg_.M
          : std::max(cfg_.epsilon, ws_.max_violation({-f.h, -f.a}) + cfg_.epsilon);

  // b = 1  =>  h.x <= a          (h.x + m_sat b <= a + m_sat)
  // b = 0  =>  h.x >= a + eps    (h.x + m_vio b >= a + eps)
  std::vector<milp::LinTerm> upper, lower;
  for (int k = 0; k < ws_.dim(); ++k) {
    if (f.h(k) == 0.0) continue;
    upper.push_back({x[k], f.h(k)});
    lower.push_back({x[k], f.h(k)});
  }
  upper.push_back({b, m_sat});
  lower.push_back({b, m_vio});
  model_.add_le(std::move(upper), f.a + m_sat);
  model_.add_ge(std::move(lower), f.a + cfg_.epsilon);

  face_memo_[key] = b;
  return b;
}

int FormulaEncoder::atom_var(const std::string& prop, int t, bool negated) {
  const auto parts = ws_.polytopes_for(prop);

  // Satisfaction variable for one convex part: conjunction of its faces.
  auto encode_part = [&](const ws::ConvexPolytope& part) -> int {
    std::vector<int> faces;
    faces.reserve(part.faces.size());
    for (const auto& f : part.faces) faces.push_back(halfspace_indicator(f, t));
    if (!negated) {
      if (faces.size() == 1) return faces[0];
      int k = fresh_k("in", t);
      std::vector<milp::LinTerm> sum{{k, 1.0}};
      for (int b : faces) {
        model_.add_le({{k, 1.0}, {b, -1.0}}, 0.0);  // k <= b
        sum.push_back({b, -1.0});
      }
      // k >= 1 - m + sum(b)
      model_.add_ge(std::move(sum), 1.0 - static_cast<double>(faces.size()));
      return k;
    }
    // Outside the part: some face violated, i.e. OR over (1 - b).
    // k >= (1 - b_i) for each face; k <= sum(1 - b_i).
    int k = fresh_k("out", t);
    std::vector<milp::LinTerm> sum{{k, 1.0}};
    for (int b : faces) {
      model_.add_ge({{k, 1.0}, {b, 1.0}}, 1.0);
      sum.push_back({b, 1.0});
    }
    model_.add_le(std::move(sum), static_cast<double>(faces.size()));
    return k;
  };

  if (!negated) {
    if (parts.size() == 1) return encode_part(parts[0]);
    std::vector<int> ks;
    for (const auto& p : parts) ks.push_back(encode_part(p));
    int k = fresh_k("or", t);
    std::vector<milp::LinTerm> sum{{k, 1.0}};
    for (int ki : ks) {
      model_.add_ge({{k, 1.0}, {ki, -1.0}}, 0.0);  // k >= ki
      sum.push_back({ki, -1.0});
    }
    model_.add_le(std::move(sum), 0.0);  // k <= sum ki
    return k;
  }
  // Negated: outside every part.
  std::vector<int> ks;
  for (const auto& p : parts) ks.push_back(encode_part(p));
  if (ks.size() == 1) return ks[0];
  int k = fresh_k("and", t);
  std::vector<milp::LinTerm> sum{{k, 1.0}};
  for (int ki : ks) {
    model_.add_le({{k, 1.0}, {ki, -1.0}}, 0.0);  // k <= ki
    sum.push_back({ki, -1.0});
  }
  model_.add_ge(std::move(sum), 1.0 - static_cast<double>(ks.size()));
  return k;
}

int FormulaEncoder::encode_at(const mtl::Formula& f, int t) {
  check_time(t);
  auto key = std::make_pair(f.id(), t);
  auto found = memo_.find(key);
  if (found != memo_.end()) return found->second;

  int result = -1;
  switch (f.op()) {
    case mtl::Op::True: {
      result = model_.add_continuous(1.0, 1.0, "K_true_t" + std::to_string(t));
      break;
    }
    case mtl::Op::Atom: {
      result = atom_var(f.prop().name, t, false);
      break;
    }
    case mtl::Op::Not: {
      const mtl::Formula& c = f.child();
      if (c.op() == mtl::Op::Atom) {
        result = atom_var(c.prop().name, t, true);
      } else if (c.op() == mtl::Op::True) {
        result = model_.add_continuous(0.0, 0.0,
                                       "K_false_t" + std::to_string(t));
      } else {
        throw mtl::UnsupportedFragmentError(
            "encoder requires negation normal form");
      }
      break;
    }
    case mtl::Op::And: {
      std::vector<int> ks;
      for (const auto& c : f.children()) ks.push_back(encode_at(c, t));
      int k = fresh_k("and", t);
      std::vector<milp::LinTerm> sum{{k, 1.0}};
      for (int ki : ks) {
        model_.add_le({{k, 1.0}, {ki, -1.0}}, 0.0);
        sum.push_back({ki, -1.0});
      }
      model_.add_ge(std::move(sum), 1.0 - static_cast<double>(ks.size()));
      result = k;
      break;
    }
    case mtl::Op::Or: {
      std::vector<int> ks;
      for (const auto& c : f.children()) ks.push_back(encode_at(c, t));
      int k = fresh_k("or", t);
      std::vector<milp::LinTerm> sum{{k, 1.0}};
      for (int ki : ks) {
        model_.add_ge({{k, 1.0}, {ki, -1.0}}, 0.0);
        sum.push_back({ki, -1.0});
      }
      model_.add_le(std::move(sum), 0.0);
      result = k;
      break;
    }
    case mtl::Op::Next: {
      result = encode_at(f.child(), t + 1);
      break;
    }
    case mtl::Op::Eventually:
    case mtl::Op::Always: {
      const auto& itv = f.interval();
      if (!itv.bounded())
        throw mtl::HorizonError("unbounded interval reached the encoder; "
                                "bind_horizon first");
      int lo = t + itv.lo, hi = t + *itv.hi;
      if (lo > hi) throw EncodeError("empty interval");
      check_time(hi);
      std::vector<int> ks;
      for (int tau = lo; tau <= hi; ++tau)
        ks.push_back(encode_at(f.child(), tau));
      if (ks.size() == 1) {
        result = ks[0];
        break;
      }
      bool disj = f.op() == mtl::Op::Eventually;
      int k = fresh_k(disj ? "ev" : "alw", t);
      std::vector<milp::LinTerm> sum{{k, 1.0}};
      for (int ki : ks) {
        if (disj)
          model_.add_ge({{k, 1.0}, {ki, -1.0}}, 0.0);
        else
          model_.add_le({{k, 1.0}, {ki, -1.0}}, 0.0);
        sum.push_back({ki, -1.0});
      }
      if (disj)
        model_.add_le(std::move(sum), 0.0);
      else
        model_.add_ge(std::move(sum), 1.0 - static_cast<double>(ks.size()));
      result = k;
      break;
    }
    case mtl::Op::Until: {
      const auto& itv = f.interval();
      if (!itv.bounded())
        throw mtl::HorizonError("unbounded until reached the encoder");
      int lo = t + itv.lo, hi = t + *itv.hi;
      if (lo > hi) throw EncodeError("empty until interval");
      check_time(hi);
      const mtl::Formula& p = f.child(0);
      const mtl::Formula& q = f.child(1);
      // c_tj = (q at j) and (p on every step in [t, j-1]).
      std::vector<int> cs;
      for (int j = lo; j <= hi; ++j) {
        int kq = encode_at(q, j);
        std::vector<int> kps;
        for (int l = t; l < j; ++l) kps.push_back(encode_at(p, l));
        if (kps.empty()) {
          cs.push_back(kq);
          continue;
        }
        int c = model_.add_continuous(
            0.0, 1.0, "c_t" + std::to_string(t) + "_j" + std::to_string(j));
        std::vector<milp::LinTerm> sum{{c, 1.0}, {kq, -1.0}};
        model_.add_le({{c, 1.0}, {kq, -1.0}}, 0.0);
        for (int kp : kps) {
          model_.add_le({{c, 1.0}, {kp, -1.0}}, 0.0);
          sum.push_back({kp, -1.0});
        }
        model_.add_ge(std::move(sum),
                      -static_cast<double>(kps.size()));  // c >= kq + sum - n
        cs.push_back(c);
      }
      if (cs.size() == 1) {
        result = cs[0];
        break;
      }
      int k = fresh_k("unt", t);
      std::vector<milp::LinTerm> sum{{k, 1.0}};
      for (int ci : cs) {
        model_.add_ge({{k, 1.0}, {ci, -1.0}}, 0.0);
        sum.push_back({ci, -1.0});
      }
      model_.add_le(std::move(sum), 0.0);
      result = k;
      break;
    }
  }
  memo_[key] = result;
  return result;
}

void FormulaEncoder::assert_root(const mtl::Formula& f) {
  mtl::Formula bound = mtl::bind_horizon(mtl::to_nnf(f), horizon_);
  int k = encode_at(bound, 0);
  model_.add_ge({{k, 1.0}}, 1.0);
}

SubtaskEncoding encode_subtask_problem(const ws::Workspace& workspace,
                                       const dyn::LinearMode& mode,
                                       const mtl::Formula& spec,
                                       const Eigen::VectorXd& x0, int T,
                                       const BigMConfig& cfg,
                                       const dyn::LinearMode* next_mode) {
  if (x0.size() != dyn::kNumStates)
    throw EncodeError("start state has wrong dimension");
  SubtaskEncoding enc;
  enc.horizon = T;
  auto& m = enc.model;

  // State variables; x_0 is pinned to the handover state and exempt from the
  // mode envelope, later steps live inside it.
  for (int t = 0; t <= T; ++t) {
    std::vector<int> xs;
    for (int i = 0; i < dyn::kNumStates; ++i) {
      double lo = t == 0 ? x0(i) : mode.x_min(i);
      double hi = t == 0 ? x0(i) : mode.x_max(i);
      if (t > 0 && i < workspace.dim()) {
        // positions stay inside the flight volume
        lo = std::max(lo, workspace.min_corner()(i));
        hi = std::min(hi, workspace.max_corner()(i));
      }
      int v = m.add_continuous(lo, hi,
                               "x" + std::to_string(i) + "_t" + std::to_string(t));
      m.tag(v, {"state", -1, t, i});
      xs.push_back(v);
    }
    enc.x_vars.push_back(std::move(xs));
  }
  for (int t = 0; t < T; ++t) {
    std::vector<int> us;
    for (int i = 0; i < dyn::kNumInputs; ++i) {
      int v = m.add_continuous(mode.u_min(i), mode.u_max(i),
                               "u" + std::to_string(i) + "_t" + std::to_string(t));
      m.tag(v, {"input", -1, t, i});
      us.push_back(v);
    }
    enc.u_vars.push_back(std::move(us));
  }

  // Dynamics: x_{t+1} = A x_t + B u_t + c, row by row.
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < dyn::kNumStates; ++i) {
      std::vector<milp::LinTerm> terms{{enc.x_vars[t + 1][i], 1.0}};
      for (int j = 0; j < dyn::kNumStates; ++j)
        if (mode.A(i, j) != 0.0)
          terms.push_back({enc.x_vars[t][j], -mode.A(i, j)});
      for (int j = 0; j < dyn::kNumInputs; ++j)
        if (mode.B(i, j) != 0.0)
          terms.push_back({enc.u_vars[t][j], -mode.B(i, j)});
      m.add_eq(std::move(terms), mode.c(i));
    }
  }

  // Junction: the final state must also satisfy the next mode's envelope so
  // the switch is admissible.
  if (next_mode) {
    for (int i = 2; i < dyn::kNumStates; ++i) {  // positions x,y unconstrained
      if (std::isfinite(next_mode->x_min(i)))
        m.add_ge({{enc.x_vars[T][i], 1.0}}, next_mode->x_min(i));
      if (std::isfinite(next_mode->x_max(i)))
        m.add_le({{enc.x_vars[T][i], 1.0}}, next_mode->x_max(i));
    }
  }

  // Continuation certificate: one ghost step past the horizon must also fit
  // the envelope of whatever mode flies next. Envelope membership at the
  // sample instants alone can leave the terminal state with velocity or
  // attitude momentum that no admissible input can keep in bounds, which
  // would make the follow-on problem infeasible at its first step.
  {
    const dyn::LinearMode& cont = next_mode ? *next_mode : mode;
    std::vector<int> gu;
    for (int i = 0; i < dyn::kNumInputs; ++i)
      gu.push_back(m.add_continuous(cont.u_min(i), cont.u_max(i),
                                    "ughost" + std::to_string(i)));
    std::vector<int> gx;
    for (int i = 0; i < dyn::kNumStates; ++i) {
      double lo = cont.x_min(i);
      double hi = cont.x_max(i);
      if (i < workspace.dim()) {
        lo = std::max(lo, workspace.min_corner()(i));
        hi = std::min(hi, workspace.max_corner()(i));
      }
      gx.push_back(m.add_continuous(lo, hi, "xghost" + std::to_string(i)));
    }
    for (int i = 0; i < dyn::kNumStates; ++i) {
      std::vector<milp::LinTerm> terms{{gx[i], 1.0}};
      for (int j = 0; j < dyn::kNumStates; ++j)
        if (cont.A(i, j) != 0.0)
          terms.push_back({enc.x_vars[T][j], -cont.A(i, j)});
      for (int j = 0; j < dyn::kNumInputs; ++j)
        if (cont.B(i, j) != 0.0) terms.push_back({gu[j], -cont.B(i, j)});
      m.add_eq(std::move(terms), cont.c(i));
    }
  }

  // Minimum-effort objective: sum of input magnitudes via epigraph variables.
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < dyn::kNumInputs; ++i) {
      int s = m.add_continuous(0.0, milp::kInf,
                               "s" + std::to_string(i) + "_t" + std::to_string(t));
      m.add_ge({{s, 1.0}, {enc.u_vars[t][i], -1.0}}, 0.0);
      m.add_ge({{s, 1.0}, {enc.u_vars[t][i], 1.0}}, 0.0);
      m.obj_coef(s, 1.0);
    }
  }

  FormulaEncoder fe(
      m, workspace,
      [&enc, &workspace](int t) {
        std::vector<int> p(enc.x_vars[t].begin(),
                           enc.x_vars[t].begin() + workspace.dim());
        return p;
      },
      T, cfg);
  fe.assert_root(spec);
  return enc;
}

void encode_neighbor_avoidance(SubtaskEncoding& enc,
                               const ws::Workspace& workspace,
                               const std::vector<Eigen::Vector3d>& other_pos,
                               const Eigen::Vector3d& own_start,
                               double speed_per_step, double half_width,
                               double rho, const BigMConfig& cfg,
                               double terminal_margin) {
  auto& m = enc.model;
  const Eigen::VectorXd& lo = workspace.min_corner();
  const Eigen::VectorXd& hi = workspace.max_corner();
  const int T = enc.horizon;
  for (int k = 1; k < static_cast<int>(other_pos.size()); ++k) {
    // Steps past the horizon pin the final state clear of the neighbor's
    // near-future positions, with braking margin.
    const int t = std::min(k, T);
    const double hw = k <= T ? half_width : half_width + terminal_margin;
    const Eigen::Vector3d& o = other_pos[k];
    // Reachable-tube pruning: positions the vehicle cannot get near yet (by
    // more than rho) need no constraint.
    double reach = speed_per_step * t;
    if ((o - own_start).lpNorm<Eigen::Infinity>() > reach + rho + hw)
      continue;
    std::vector<milp::LinTerm> pick;
    for (int axis = 0; axis < 3; ++axis) {
      int xv = enc.x_vars[t][axis];
      // Below the box: x <= o - hw + M (1 - e).
      {
        int e = m.add_binary("e_lo" + std::to_string(axis) + "_t" +
                             std::to_string(t) + "_" +
                             std::to_string(m.num_vars()));
        double M = cfg.M > 0 ? cfg.M : hi(axis) - (o(axis) - hw);
        M = std::max(M, cfg.epsilon);
        m.add_le({{xv, 1.0}, {e, M}}, o(axis) - hw + M);
        pick.push_back({e, 1.0});
      }
      // Above the box: x >= o + hw - M (1 - e).
      {
        int e = m.add_binary("e_hi" + std::to_string(axis) + "_t" +
                             std::to_string(t) + "_" +
                             std::to_string(m.num_vars()));
        double M = cfg.M > 0 ? cfg.M : (o(axis) + hw) - lo(axis);
        M = std::max(M, cfg.epsilon);
        m.add_ge({{xv, 1.0}, {e, -M}}, o(axis) + hw - M);
        pick.push_back({e, 1.0});
      }
    }
    m.add_ge(std::move(pick), 1.0);
  }
}

}  // namespace mtlplan::encode
