// SPDX-License-Identifier: Apache-2.0

#include "mtlplan/mtl.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace mtlplan::mtl {

Proposition Proposition::from_name(const std::string& n) {
  Proposition p;
  p.name = n;
  const std::string suffix = "_prime";
  p.primed = n.size() > suffix.size() &&
             n.compare(n.size() - suffix.size(), suffix.size(), suffix) == 0;
  return p;
}

Formula Formula::make(Node n) {
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::top() { return make({Op::True, {}, {}, {}}); }

Formula Formula::atom(const std::string& name) {
  return make({Op::Atom, {}, Proposition::from_name(name), {}});
}

Formula Formula::negation(Formula f) {
  return make({Op::Not, {}, {}, {std::move(f)}});
}

Formula Formula::conjunction(std::vector<Formula> fs) {
  if (fs.empty()) throw std::invalid_argument("conjunction of nothing");
  if (fs.size() == 1) return fs.front();
  return make({Op::And, {}, {}, std::move(fs)});
}

Formula Formula::disjunction(std::vector<Formula> fs) {
  if (fs.empty()) throw std::invalid_argument("disjunction of nothing");
  if (fs.size() == 1) return fs.front();
  return make({Op::Or, {}, {}, std::move(fs)});
}

Formula Formula::next(Formula f) {
  return make({Op::Next, {}, {}, {std::move(f)}});
}

static void check_interval(const Interval& i) {
  if (i.lo < 0) throw std::invalid_argument("interval lower bound < 0");
  if (i.hi && *i.hi < i.lo)
    throw std::invalid_argument("interval upper bound < lower bound");
}

Formula Formula::eventually(Interval i, Formula f) {
  check_interval(i);
  return make({Op::Eventually, i, {}, {std::move(f)}});
}

Formula Formula::always(Interval i, Formula f) {
  check_interval(i);
  return make({Op::Always, i, {}, {std::move(f)}});
}

Formula Formula::until(Interval i, Formula lhs, Formula rhs) {
  check_interval(i);
  if (!i.bounded())
    throw std::invalid_argument("until requires a bounded interval");
  return make({Op::Until, i, {}, {std::move(lhs), std::move(rhs)}});
}

bool Formula::operator==(const Formula& o) const {
  if (node_ == o.node_) return true;
  if (node_->op != o.node_->op) return false;
  if (!(node_->itv == o.node_->itv)) return false;
  if (node_->op == Op::Atom && !(node_->prop == o.node_->prop)) return false;
  if (node_->kids.size() != o.node_->kids.size()) return false;
  for (std::size_t i = 0; i < node_->kids.size(); ++i)
    if (!(node_->kids[i] == o.node_->kids[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string itv_text(const Interval& i) {
  if (!i.bounded()) return "";
  return "[" + std::to_string(i.lo) + "," + std::to_string(*i.hi) + "]";
}

// levels: 0 = disjunction, 1 = conjunction, 2 = unary operand
void print_rec(const Formula& f, int level, std::string& out) {
  switch (f.op()) {
    case Op::True:
      out += "TRUE";
      return;
    case Op::Atom:
      out += f.prop().name;
      return;
    case Op::Not:
      out += "!";
      print_rec(f.child(), 2, out);
      return;
    case Op::Next:
      out += "X ";
      print_rec(f.child(), 2, out);
      return;
    case Op::Eventually:
      out += "F" + itv_text(f.interval()) + " ";
      print_rec(f.child(), 2, out);
      return;
    case Op::Always:
      out += "G" + itv_text(f.interval()) + " ";
      print_rec(f.child(), 2, out);
      return;
    case Op::Until:
      out += "(";
      print_rec(f.children()[0], 0, out);
      out += " U" + itv_text(f.interval()) + " ";
      print_rec(f.children()[1], 0, out);
      out += ")";
      return;
    case Op::And: {
      bool wrap = level > 1;
      if (wrap) out += "(";
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += " & ";
        print_rec(f.children()[i], 2, out);
      }
      if (wrap) out += ")";
      return;
    }
    case Op::Or: {
      bool wrap = level > 0;
      if (wrap) out += "(";
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += " | ";
        print_rec(f.children()[i], 1, out);
      }
      if (wrap) out += ")";
      return;
    }
  }
}

}  // namespace

std::string Formula::to_string() const {
  std::string out;
  print_rec(*this, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Lexer {
  const std::string& s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool at_end() { return peek() == '\0'; }
};

struct Parser {
  Lexer lex;
  const std::set<std::string>& pi;

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, lex.pos);
  }

  bool eat(char c) {
    if (lex.peek() == c) {
      ++lex.pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::optional<std::string> peek_ident() {
    char c = lex.peek();
    if (!std::isalpha(static_cast<unsigned char>(c))) return std::nullopt;
    std::size_t p = lex.pos;
    std::string id;
    while (p < lex.s.size() &&
           (std::isalnum(static_cast<unsigned char>(lex.s[p])) ||
            lex.s[p] == '_'))
      id += lex.s[p++];
    return id;
  }

  std::string take_ident() {
    auto id = peek_ident();
    if (!id) fail("expected identifier");
    lex.pos += id->size();
    return *id;
  }

  int take_int() {
    lex.skip_ws();
    std::size_t start = lex.pos;
    while (lex.pos < lex.s.size() &&
           std::isdigit(static_cast<unsigned char>(lex.s[lex.pos])))
      ++lex.pos;
    if (lex.pos == start) fail("expected integer");
    return std::stoi(lex.s.substr(start, lex.pos - start));
  }

  Interval take_interval() {
    expect('[');
    Interval i;
    i.lo = take_int();
    expect(',');
    i.hi = take_int();
    expect(']');
    if (*i.hi < i.lo) fail("malformed interval: upper bound < lower bound");
    return i;
  }

  // True when the next token can start a unary formula; decides whether a
  // bare F/G/X identifier is an operator or a region atom.
  bool starts_unary_after(std::size_t from) {
    std::size_t p = from;
    while (p < lex.s.size() && std::isspace(static_cast<unsigned char>(lex.s[p])))
      ++p;
    if (p >= lex.s.size()) return false;
    char c = lex.s[p];
    return c == '!' || c == '(' || c == '[' ||
           std::isalpha(static_cast<unsigned char>(c));
  }

  Formula atom_named(const std::string& name) {
    if (name == "TRUE") return Formula::top();
    if (!pi.empty() && !pi.count(name))
      fail("unknown proposition '" + name + "'");
    return Formula::atom(name);
  }

  Formula parse_unary() {
    if (eat('!')) return Formula::negation(parse_unary());
    if (eat('(')) {
      Formula lhs = parse_formula();
      auto id = peek_ident();
      if (id && *id == "U" && lex.pos + 1 < lex.s.size() &&
          lex.s[lex.pos + 1] == '[') {
        lex.pos += 1;
        Interval i = take_interval();
        Formula rhs = parse_formula();
        expect(')');
        return Formula::until(i, std::move(lhs), std::move(rhs));
      }
      expect(')');
      return lhs;
    }
    auto id = peek_ident();
    if (!id) fail("expected formula");
    if ((*id == "F" || *id == "G" || *id == "X") &&
        starts_unary_after(lex.pos + 1)) {
      lex.pos += 1;
      if (*id == "X") return Formula::next(parse_unary());
      Interval i;
      if (lex.peek() == '[') i = take_interval();
      Formula body = parse_unary();
      return *id == "F" ? Formula::eventually(i, std::move(body))
                        : Formula::always(i, std::move(body));
    }
    lex.pos += id->size();
    return atom_named(*id);
  }

  Formula parse_conj() {
    std::vector<Formula> parts{parse_unary()};
    while (eat('&')) parts.push_back(parse_unary());
    return Formula::conjunction(std::move(parts));
  }

  Formula parse_formula() {
    std::vector<Formula> parts{parse_conj()};
    while (eat('|')) parts.push_back(parse_conj());
    return Formula::disjunction(std::move(parts));
  }
};

}  // namespace

Formula parse_mtl(const std::string& text, const std::set<std::string>& pi) {
  Parser p{Lexer{text}, pi};
  Formula f = p.parse_formula();
  if (!p.lex.at_end()) p.fail("trailing input");
  return f;
}

// ---------------------------------------------------------------------------
// Negation normal form

namespace {

Formula nnf_rec(const Formula& f, bool negated) {
  switch (f.op()) {
    case Op::True:
      // No dedicated bottom node; falsity stays as a negated constant.
      return negated ? Formula::negation(Formula::top()) : f;
    case Op::Atom:
      return negated ? Formula::negation(f) : f;
    case Op::Not:
      return nnf_rec(f.child(), !negated);
    case Op::And: {
      std::vector<Formula> ks;
      for (const auto& k : f.children()) ks.push_back(nnf_rec(k, negated));
      return negated ? Formula::disjunction(std::move(ks))
                     : Formula::conjunction(std::move(ks));
    }
    case Op::Or: {
      std::vector<Formula> ks;
      for (const auto& k : f.children()) ks.push_back(nnf_rec(k, negated));
      return negated ? Formula::conjunction(std::move(ks))
                     : Formula::disjunction(std::move(ks));
    }
    case Op::Next:
      return Formula::next(nnf_rec(f.child(), negated));
    case Op::Eventually:
      return negated
                 ? Formula::always(f.interval(), nnf_rec(f.child(), true))
                 : Formula::eventually(f.interval(), nnf_rec(f.child(), false));
    case Op::Always:
      return negated
                 ? Formula::eventually(f.interval(), nnf_rec(f.child(), true))
                 : Formula::always(f.interval(), nnf_rec(f.child(), false));
    case Op::Until:
      if (negated)
        throw UnsupportedFragmentError(
            "negation over until has no linear encoding");
      return Formula::until(f.interval(), nnf_rec(f.children()[0], false),
                            nnf_rec(f.children()[1], false));
  }
  throw std::logic_error("unreachable");
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf_rec(f, false); }

// ---------------------------------------------------------------------------
// Horizon

int horizon_of(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::Atom:
      return 0;
    case Op::Not:
      return horizon_of(f.child());
    case Op::And:
    case Op::Or: {
      int h = 0;
      for (const auto& k : f.children()) h = std::max(h, horizon_of(k));
      return h;
    }
    case Op::Next:
      return 1 + horizon_of(f.child());
    case Op::Eventually:
    case Op::Always:
      if (!f.interval().bounded())
        throw HorizonError("unbounded interval; bind_horizon first");
      return *f.interval().hi + horizon_of(f.child());
    case Op::Until: {
      int hi = *f.interval().hi;
      int hq = hi + horizon_of(f.children()[1]);
      int hp = hi > 0 ? hi - 1 + horizon_of(f.children()[0]) : 0;
      return std::max(hq, hp);
    }
  }
  throw std::logic_error("unreachable");
}

Formula bind_horizon(const Formula& f, int budget) {
  if (budget < 0) throw HorizonError("horizon budget exhausted");
  switch (f.op()) {
    case Op::True:
    case Op::Atom:
      return f;
    case Op::Not:
      return Formula::negation(bind_horizon(f.child(), budget));
    case Op::And:
    case Op::Or: {
      std::vector<Formula> ks;
      for (const auto& k : f.children()) ks.push_back(bind_horizon(k, budget));
      return f.op() == Op::And ? Formula::conjunction(std::move(ks))
                               : Formula::disjunction(std::move(ks));
    }
    case Op::Next:
      return Formula::next(bind_horizon(f.child(), budget - 1));
    case Op::Eventually:
    case Op::Always: {
      Interval i = f.interval();
      if (i.bounded()) {
        if (*i.hi > budget)
          throw HorizonError("interval [" + std::to_string(i.lo) + "," +
                             std::to_string(*i.hi) +
                             "] exceeds horizon budget " +
                             std::to_string(budget));
        Formula k = bind_horizon(f.child(), budget - *i.hi);
        return f.op() == Op::Eventually ? Formula::eventually(i, std::move(k))
                                        : Formula::always(i, std::move(k));
      }
      if (i.lo > budget) throw HorizonError("interval start beyond budget");
      Formula k = bind_horizon(f.child(), budget - i.lo);
      int hc = horizon_of(k);
      i.hi = std::max(i.lo, budget - hc);
      return f.op() == Op::Eventually ? Formula::eventually(i, std::move(k))
                                      : Formula::always(i, std::move(k));
    }
    case Op::Until: {
      const Interval& i = f.interval();
      if (*i.hi > budget) throw HorizonError("until interval exceeds budget");
      return Formula::until(i, bind_horizon(f.children()[0], budget - *i.hi),
                            bind_horizon(f.children()[1], budget - *i.hi));
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Semantics

bool evaluate_at(const Formula& f, const Trace& tr, int t) {
  if (t + horizon_of(f) > tr.length() - 1)
    throw TraceTooShortError("trace too short for formula horizon");
  switch (f.op()) {
    case Op::True:
      return true;
    case Op::Atom:
      return tr.labels[t].count(f.prop().name) > 0;
    case Op::Not:
      return !evaluate_at(f.child(), tr, t);
    case Op::And:
      return std::all_of(f.children().begin(), f.children().end(),
                         [&](const Formula& k) { return evaluate_at(k, tr, t); });
    case Op::Or:
      return std::any_of(f.children().begin(), f.children().end(),
                         [&](const Formula& k) { return evaluate_at(k, tr, t); });
    case Op::Next:
      return evaluate_at(f.child(), tr, t + 1);
    case Op::Eventually: {
      const Interval& i = f.interval();
      for (int tau = t + i.lo; tau <= t + *i.hi; ++tau)
        if (evaluate_at(f.child(), tr, tau)) return true;
      return false;
    }
    case Op::Always: {
      const Interval& i = f.interval();
      for (int tau = t + i.lo; tau <= t + *i.hi; ++tau)
        if (!evaluate_at(f.child(), tr, tau)) return false;
      return true;
    }
    case Op::Until: {
      const Interval& i = f.interval();
      for (int j = t + i.lo; j <= t + *i.hi; ++j) {
        if (!evaluate_at(f.children()[1], tr, j)) continue;
        bool lhs_holds = true;
        for (int l = t; l < j; ++l)
          if (!evaluate_at(f.children()[0], tr, l)) {
            lhs_holds = false;
            break;
          }
        if (lhs_holds) return true;
      }
      return false;
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Queries

namespace {

std::optional<std::string> leftmost_atom(const Formula& f) {
  if (f.op() == Op::Atom) return f.prop().name;
  for (const auto& k : f.children())
    if (auto a = leftmost_atom(k)) return a;
  return std::nullopt;
}

std::optional<std::string> first_eventually_atom(const Formula& f) {
  if (f.op() == Op::Eventually) return leftmost_atom(f.child());
  for (const auto& k : f.children())
    if (auto a = first_eventually_atom(k)) return a;
  return std::nullopt;
}

}  // namespace

std::optional<std::string> reach_proposition(const Formula& f) {
  if (auto a = first_eventually_atom(f)) return a;
  return leftmost_atom(f);
}

std::set<std::string> propositions_of(const Formula& f) {
  std::set<std::string> out;
  if (f.op() == Op::Atom) out.insert(f.prop().name);
  for (const auto& k : f.children()) {
    auto sub = propositions_of(k);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

}  // namespace mtlplan::mtl
