// SPDX-License-Identifier: Apache-2.0

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mtlplan/lp_format.hpp"

namespace mtlplan::lp_format {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_terms(std::ostringstream& os, const std::vector<milp::LinTerm>& terms,
                  const std::vector<milp::MilpVar>& vars) {
  // Accumulate duplicate variables so output is a clean linear form.
  std::map<int, double> acc;
  for (const auto& t : terms) acc[t.var] += t.coef;
  bool first = true;
  for (const auto& [v, c] : acc) {
    if (c == 0.0) continue;
    if (first) {
      if (c < 0) os << "- ";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    double a = std::abs(c);
    if (a != 1.0) os << num(a) << " ";
    os << vars[v].name;
  }
  if (first) os << "0 " << vars[0].name;
}

struct Lexer {
  const std::string& s;
  size_t pos = 0;

  void skip() {
    while (pos < s.size()) {
      if (std::isspace(static_cast<unsigned char>(s[pos]))) {
        ++pos;
      } else if (s[pos] == '\\') {  // comment to end of line
        while (pos < s.size() && s[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip();
    return pos >= s.size();
  }

  char peek() {
    skip();
    return pos < s.size() ? s[pos] : '\0';
  }

  std::string word() {
    skip();
    size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) ||
            std::string("_[]().#'\"!&").find(s[pos]) != std::string::npos))
      ++pos;
    return s.substr(start, pos - start);
  }

  double number() {
    skip();
    size_t used = 0;
    double v = std::stod(s.substr(pos), &used);
    pos += used;
    return v;
  }
};

bool starts_number(char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.'; }

std::string lower(std::string w) {
  for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return w;
}

}  // namespace

std::string export_lp_text(const milp::MilpModel& model, const std::string& name) {
  const auto& vars = model.vars();
  std::ostringstream os;
  os << "\\ " << name << "\n";
  os << "Minimize\n obj: ";
  append_terms(os, model.objective(), vars);
  os << "\nSubject To\n";
  int ci = 0;
  for (const auto& c : model.constraints()) {
    os << " c" << ci++ << ": ";
    append_terms(os, c.terms, vars);
    switch (c.sense) {
      case milp::Sense::LE:
        os << " <= ";
        break;
      case milp::Sense::GE:
        os << " >= ";
        break;
      case milp::Sense::EQ:
        os << " = ";
        break;
    }
    os << num(c.rhs) << "\n";
  }
  os << "Bounds\n";
  for (const auto& v : vars) {
    if (v.lb == 0.0 && v.ub == milp::kInf) continue;
    if (v.lb == v.ub) {
      os << " " << v.name << " = " << num(v.lb) << "\n";
      continue;
    }
    os << " ";
    if (v.lb == -milp::kInf)
      os << "-inf";
    else
      os << num(v.lb);
    os << " <= " << v.name << " <= ";
    if (v.ub == milp::kInf)
      os << "+inf";
    else
      os << num(v.ub);
    os << "\n";
  }
  bool any_bin = false;
  for (const auto& v : vars)
    if (v.kind == milp::VarKind::Binary) {
      if (!any_bin) os << "Binaries\n";
      any_bin = true;
      os << " " << v.name << "\n";
    }
  os << "End\n";
  return os.str();
}

milp::MilpModel parse_lp_text(const std::string& text) {
  milp::MilpModel model;
  std::map<std::string, int> ids;
  auto var_id = [&](const std::string& n) {
    auto it = ids.find(n);
    if (it != ids.end()) return it->second;
    int id = model.add_continuous(0.0, milp::kInf, n);
    ids[n] = id;
    return id;
  };

  Lexer lex{text};
  enum class Section { None, Objective, Constraints, Bounds, Binaries, Done };
  Section sec = Section::None;
  double obj_sign = 1.0;

  auto parse_expr = [&](std::vector<milp::LinTerm>& out) {
    // coef/var pairs until a relation, section keyword, or EOF.
    double sign = 1.0;
    bool pending_coef = false;
    double coef = 1.0;
    while (!lex.eof()) {
      char c = lex.peek();
      if (c == '+') {
        ++lex.pos;
        continue;
      }
      if (c == '-') {
        ++lex.pos;
        sign = -sign;
        continue;
      }
      if (c == '<' || c == '>' || c == '=') break;
      if (starts_number(c)) {
        double v = lex.number();
        if (pending_coef) coef *= v;  // e.g. "2 3 x" is malformed but tolerated
        else
          coef = v;
        pending_coef = true;
        char n = lex.peek();
        if (n == '*') ++lex.pos;
        continue;
      }
      size_t save = lex.pos;
      std::string w = lex.word();
      if (w.empty()) break;
      std::string lw = lower(w);
      if (lw == "subject" || lw == "st" || lw == "s.t." || lw == "bounds" ||
          lw == "binaries" || lw == "binary" || lw == "general" ||
          lw == "generals" || lw == "end" || lw == "minimize" ||
          lw == "maximize" || lw == "min" || lw == "max") {
        lex.pos = save;
        break;
      }
      if (w.back() == ':') w.pop_back();
      if (!lex.eof() && lex.peek() == ':') {  // row label
        ++lex.pos;
        continue;
      }
      if (pending_coef && coef == 0.0) {
        var_id(w);  // keep the variable declared even with zero coefficient
        sign = 1.0;
        pending_coef = false;
        coef = 1.0;
        continue;
      }
      out.push_back({var_id(w), sign * coef});
      sign = 1.0;
      pending_coef = false;
      coef = 1.0;
    }
    if (pending_coef) {
      // trailing bare constant: represent via rhs shift by caller
      out.push_back({-1, sign * coef});
    }
  };

  while (!lex.eof()) {
    size_t save = lex.pos;
    std::string w = lex.word();
    std::string lw = lower(w);
    if (lw == "minimize" || lw == "min") {
      sec = Section::Objective;
      obj_sign = 1.0;
      continue;
    }
    if (lw == "maximize" || lw == "max") {
      sec = Section::Objective;
      obj_sign = -1.0;
      continue;
    }
    if (lw == "subject" || lw == "st" || lw == "s.t.") {
      if (lw == "subject") lex.word();  // "To"
      sec = Section::Constraints;
      continue;
    }
    if (lw == "bounds") {
      sec = Section::Bounds;
      continue;
    }
    if (lw == "binaries" || lw == "binary") {
      sec = Section::Binaries;
      continue;
    }
    if (lw == "end") {
      sec = Section::Done;
      break;
    }
    lex.pos = save;

    if (sec == Section::Objective) {
      std::vector<milp::LinTerm> e;
      parse_expr(e);
      for (const auto& t : e)
        if (t.var >= 0) model.obj_coef(t.var, obj_sign * t.coef);
      continue;
    }
    if (sec == Section::Constraints) {
      std::vector<milp::LinTerm> lhs;
      parse_expr(lhs);
      char c = lex.peek();
      milp::Sense s;
      if (c == '<') {
        ++lex.pos;
        if (lex.peek() == '=') ++lex.pos;
        s = milp::Sense::LE;
      } else if (c == '>') {
        ++lex.pos;
        if (lex.peek() == '=') ++lex.pos;
        s = milp::Sense::GE;
      } else if (c == '=') {
        ++lex.pos;
        if (lex.peek() == '<') {
          ++lex.pos;
          s = milp::Sense::LE;
        } else if (lex.peek() == '>') {
          ++lex.pos;
          s = milp::Sense::GE;
        } else {
          s = milp::Sense::EQ;
        }
      } else {
        throw std::runtime_error("expected relational operator in constraint");
      }
      double rhs_shift = 0.0;
      std::vector<milp::LinTerm> real;
      for (const auto& t : lhs) {
        if (t.var < 0)
          rhs_shift += t.coef;
        else
          real.push_back(t);
      }
      double rhs = 0.0;
      // rhs may itself be an expression with a constant; accept "number" only.
      if (lex.peek() == '-' || lex.peek() == '+' || starts_number(lex.peek()))
        rhs = lex.number();
      else
        throw std::runtime_error("expected numeric right-hand side");
      model.add_con({std::move(real), s, rhs - rhs_shift});
      continue;
    }
    if (sec == Section::Bounds) {
      // Forms: "l <= x <= u", "x <= u", "x >= l", "x = v", "x free",
      // with -inf/+inf tokens.
      auto read_bound_value = [&](bool& is_inf, double& sign_out) -> double {
        lex.skip();
        double sgn = 1.0;
        if (lex.peek() == '-') {
          sgn = -1.0;
          ++lex.pos;
        } else if (lex.peek() == '+') {
          ++lex.pos;
        }
        lex.skip();
        if (lex.pos + 3 <= lex.s.size() &&
            lower(lex.s.substr(lex.pos, 3)) == "inf") {
          lex.pos += 3;
          while (lex.pos < lex.s.size() &&
                 std::isalpha(static_cast<unsigned char>(lex.s[lex.pos])))
            ++lex.pos;  // "infinity"
          is_inf = true;
          sign_out = sgn;
          return 0.0;
        }
        is_inf = false;
        sign_out = sgn;
        return sgn * lex.number();
      };

      char c = lex.peek();
      if (c == '-' || c == '+' || starts_number(c)) {
        bool inf;
        double sgn;
        double lo = read_bound_value(inf, sgn);
        if (inf) lo = sgn * milp::kInf;
        if (lex.peek() != '<')
          throw std::runtime_error("expected <= after lower bound");
        ++lex.pos;
        if (lex.peek() == '=') ++lex.pos;
        std::string name = lex.word();
        int v = var_id(name);
        double hi = milp::kInf;
        if (lex.peek() == '<') {
          ++lex.pos;
          if (lex.peek() == '=') ++lex.pos;
          bool inf2;
          double sgn2;
          hi = read_bound_value(inf2, sgn2);
          if (inf2) hi = sgn2 * milp::kInf;
        }
        model.set_bounds(v, lo, hi);
        continue;
      }
      std::string name = lex.word();
      if (name.empty()) throw std::runtime_error("malformed bounds line");
      int v = var_id(name);
      lex.skip();
      size_t save2 = lex.pos;
      std::string maybe_free = lower(lex.word());
      if (maybe_free == "free") {
        model.set_bounds(v, -milp::kInf, milp::kInf);
        continue;
      }
      lex.pos = save2;
      char r = lex.peek();
      bool inf;
      double sgn;
      if (r == '<') {
        ++lex.pos;
        if (lex.peek() == '=') ++lex.pos;
        double hi = read_bound_value(inf, sgn);
        if (inf) hi = sgn * milp::kInf;
        model.set_bounds(v, model.vars()[v].lb, hi);
      } else if (r == '>') {
        ++lex.pos;
        if (lex.peek() == '=') ++lex.pos;
        double lo = read_bound_value(inf, sgn);
        if (inf) lo = sgn * milp::kInf;
        model.set_bounds(v, lo, model.vars()[v].ub);
      } else if (r == '=') {
        ++lex.pos;
        double val = read_bound_value(inf, sgn);
        if (inf) throw std::runtime_error("fixed bound cannot be infinite");
        model.set_bounds(v, val, val);
      } else {
        throw std::runtime_error("malformed bounds line for " + name);
      }
      continue;
    }
    if (sec == Section::Binaries) {
      std::string name = lex.word();
      if (name.empty()) throw std::runtime_error("malformed binaries line");
      model.make_binary(var_id(name));
      continue;
    }
    throw std::runtime_error("unexpected token before any LP section: " + w);
  }

  return model;
}

}  // namespace mtlplan::lp_format
