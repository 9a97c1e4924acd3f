// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtlplan::milp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };

struct MilpVar {
  VarKind kind = VarKind::Continuous;
  double lb = -kInf;
  double ub = kInf;
  std::string name;
};

enum class Sense { LE, EQ, GE };

struct LinTerm {
  int var;
  double coef;
};

struct LinConstraint {
  std::vector<LinTerm> terms;
  Sense sense = Sense::LE;
  double rhs = 0.0;
};

/// Semantic tag for trajectory variables (uav/time/state component).
struct VarTag {
  std::string role;
  int uav = -1;
  int t = -1;
  int comp = -1;
};

/// Sparse MILP in a minimization convention.
class MilpModel {
 public:
  int add_var(VarKind kind, double lb, double ub, std::string name) {
    if (kind == VarKind::Binary && (lb < -1e-12 || ub > 1.0 + 1e-12))
      throw std::invalid_argument("binary variable bounds outside [0,1]");
    vars_.push_back({kind, lb, ub, std::move(name)});
    return static_cast<int>(vars_.size()) - 1;
  }
  int add_continuous(double lb, double ub, std::string name) {
    return add_var(VarKind::Continuous, lb, ub, std::move(name));
  }
  int add_binary(std::string name) {
    return add_var(VarKind::Binary, 0.0, 1.0, std::move(name));
  }

  void add_con(LinConstraint c) {
    if (c.terms.empty())
      throw std::invalid_argument("constraint without coefficients");
    for (const auto& t : c.terms) check_var(t.var);
    cons_.push_back(std::move(c));
  }
  void add_le(std::vector<LinTerm> terms, double rhs) {
    add_con({std::move(terms), Sense::LE, rhs});
  }
  void add_ge(std::vector<LinTerm> terms, double rhs) {
    add_con({std::move(terms), Sense::GE, rhs});
  }
  void add_eq(std::vector<LinTerm> terms, double rhs) {
    add_con({std::move(terms), Sense::EQ, rhs});
  }

  void obj_coef(int var, double c) {
    check_var(var);
    obj_.push_back({var, c});
  }

  void fix(int var, double value) {
    check_var(var);
    vars_[var].lb = value;
    vars_[var].ub = value;
  }
  void set_bounds(int var, double lb, double ub) {
    check_var(var);
    vars_[var].lb = lb;
    vars_[var].ub = ub;
  }

  void make_binary(int var) {
    check_var(var);
    vars_[var].kind = VarKind::Binary;
    vars_[var].lb = std::max(0.0, vars_[var].lb);
    vars_[var].ub = std::min(1.0, vars_[var].ub);
  }

  void tag(int var, VarTag t) { tags_[var] = std::move(t); }

  const std::vector<MilpVar>& vars() const { return vars_; }
  const std::vector<LinConstraint>& constraints() const { return cons_; }
  const std::vector<LinTerm>& objective() const { return obj_; }
  const std::map<int, VarTag>& tags() const { return tags_; }
  int num_vars() const { return static_cast<int>(vars_.size()); }

  int num_binaries() const {
    int n = 0;
    for (const auto& v : vars_)
      if (v.kind == VarKind::Binary) ++n;
    return n;
  }

  double objective_value(const std::vector<double>& x) const {
    double z = 0.0;
    for (const auto& t : obj_) z += t.coef * x[t.var];
    return z;
  }

  /// Max constraint violation of x (0 when feasible).
  double feasibility_residual(const std::vector<double>& x) const;

 private:
  void check_var(int v) const {
    if (v < 0 || v >= num_vars())
      throw std::out_of_range("undeclared variable id " + std::to_string(v));
  }

  std::vector<MilpVar> vars_;
  std::vector<LinConstraint> cons_;
  std::vector<LinTerm> obj_;
  std::map<int, VarTag> tags_;
};

}  // namespace mtlplan::milp
