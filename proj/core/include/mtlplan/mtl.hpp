// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtlplan::mtl {

/// Atomic proposition over workspace regions. Names ending in "_prime"
/// carry the primed flag (altitude-variant region).
struct Proposition {
  std::string name;
  bool primed = false;

  static Proposition from_name(const std::string& n);
  bool operator==(const Proposition& o) const { return name == o.name; }
};

/// Discrete-step interval attached to a temporal operator. A missing upper
/// bound marks an untimed always/eventually; it must be resolved against a
/// finite horizon (bind_horizon) before encoding or evaluation.
struct Interval {
  int lo = 0;
  std::optional<int> hi;

  bool bounded() const { return hi.has_value(); }
  bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

enum class Op { True, Atom, Not, And, Or, Next, Eventually, Always, Until };

/// Immutable MTL formula tree with value semantics (nodes are shared).
class Formula {
 public:
  Formula() : Formula(top()) {}

  static Formula top();
  static Formula atom(const std::string& name);
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> fs);
  static Formula disjunction(std::vector<Formula> fs);
  static Formula next(Formula f);
  static Formula eventually(Interval i, Formula f);
  static Formula always(Interval i, Formula f);
  static Formula until(Interval i, Formula lhs, Formula rhs);

  Op op() const { return node_->op; }
  const Interval& interval() const { return node_->itv; }
  const Proposition& prop() const { return node_->prop; }
  const std::vector<Formula>& children() const { return node_->kids; }
  const Formula& child(std::size_t i = 0) const { return node_->kids[i]; }

  /// Stable identity of the underlying node; used for memoized encoding.
  const void* id() const { return node_.get(); }

  bool operator==(const Formula& o) const;
  std::string to_string() const;

 private:
  struct Node {
    Op op;
    Interval itv;
    Proposition prop;
    std::vector<Formula> kids;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(Node n);

  std::shared_ptr<const Node> node_;
};

using LabelSet = std::set<std::string>;

/// Finite discrete trace of label sets, labels[t] = L(x(t), t).
struct Trace {
  std::vector<LabelSet> labels;
  int length() const { return static_cast<int>(labels.size()); }
};

struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
        position(pos) {}
};

/// Negating an until has no linear encoding; to_nnf reports it as such.
struct UnsupportedFragmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceTooShortError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HorizonError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses the concrete MTL syntax:
///   formula := disj;  disj := conj ('|' conj)*;  conj := unary ('&' unary)*;
///   unary := '!' unary | 'X' unary | 'F' interval? unary
///          | 'G' interval? unary | atom | '(' formula ('U' interval formula)? ')'
/// Every identifier must belong to pi (unless pi is empty, which disables the
/// check). Throws ParseError with a character position on malformed input.
Formula parse_mtl(const std::string& text, const std::set<std::string>& pi);

/// Pushes negation down to atoms using De Morgan and the temporal dualities.
/// Throws UnsupportedFragmentError on a negated until.
Formula to_nnf(const Formula& f);

/// Furthest future step the truth of f at t can depend on. Requires every
/// interval bounded (bind_horizon first).
int horizon_of(const Formula& f);

/// Resolves untimed always/eventually against a finite step budget: an
/// unbounded interval [lo, inf) becomes [lo, budget - h] where h is the
/// subformula horizon. Bounded operators keep their intervals; throws
/// HorizonError if the budget cannot cover the formula.
Formula bind_horizon(const Formula& f, int budget);

/// Ground-truth semantics over a labeled trace (the encoder's oracle).
/// Until is read with the strict product form: exists j in [t+lo, t+hi] with
/// rhs at j and lhs at every l in [t, j-1].
bool evaluate_at(const Formula& f, const Trace& tr, int t);

/// First atom under the leftmost eventually, falling back to the leftmost
/// atom; this is the sub-task's reach proposition for the step-count metric.
std::optional<std::string> reach_proposition(const Formula& f);

/// All proposition names referenced by f.
std::set<std::string> propositions_of(const Formula& f);

}  // namespace mtlplan::mtl
