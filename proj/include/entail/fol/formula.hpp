#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace entail::fol {

// A first-order term: a variable, or a Skolem symbol applied to zero
// (constant) or more argument terms.
struct Term {
  enum class Kind { Var, Fn };

  Kind kind = Kind::Var;
  int id = 0;
  std::vector<Term> args;

  static Term var(int id) { return Term{Kind::Var, id, {}}; }
  static Term fn(int id, std::vector<Term> args = {}) { return Term{Kind::Fn, id, std::move(args)}; }

  bool is_var() const { return kind == Kind::Var; }

  friend bool operator==(const Term& a, const Term& b) {
    return a.kind == b.kind && a.id == b.id && a.args == b.args;
  }
  friend bool operator<(const Term& a, const Term& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.id != b.id) return a.id < b.id;
    return std::lexicographical_compare(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
  }
};

inline void collect_vars(const Term& t, std::set<int>& out) {
  if (t.is_var()) {
    out.insert(t.id);
    return;
  }
  for (const auto& a : t.args) collect_vars(a, out);
}

inline std::string var_name(int id) {
  static const char* names[] = {"x", "y", "z", "u", "w"};
  if (id >= 0 && id < 5) return names[id];
  return "v" + std::to_string(id);
}

inline std::string to_string(const Term& t) {
  if (t.is_var()) return var_name(t.id);
  std::string out = (t.args.empty() ? "c" : "f") + std::to_string(t.id);
  if (!t.args.empty()) {
    out += '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i) out += ',';
      out += to_string(t.args[i]);
    }
    out += ')';
  }
  return out;
}

class Formula;
using FormulaList = std::vector<Formula>;

// Immutable formula tree over atoms P(t1..tk), negation, binary connectives
// and quantifiers. Copies share structure.
class Formula {
 public:
  enum class Kind { Atom, Not, And, Or, Implies, Forall, Exists };

  struct Node {
    Kind kind;
    std::string predicate;  // Atom
    std::vector<Term> args;  // Atom
    int var = -1;            // Forall / Exists
    FormulaList children;    // Not: 1, binary: 2, quantifier: 1
  };

  Formula() = default;

  static Formula atom(std::string predicate, std::vector<Term> args) {
    return Formula(Node{Kind::Atom, std::move(predicate), std::move(args), -1, {}});
  }
  static Formula negation(Formula f) { return Formula(Node{Kind::Not, {}, {}, -1, {std::move(f)}}); }
  static Formula conj(Formula a, Formula b) { return binary(Kind::And, std::move(a), std::move(b)); }
  static Formula disj(Formula a, Formula b) { return binary(Kind::Or, std::move(a), std::move(b)); }
  static Formula implies(Formula a, Formula b) { return binary(Kind::Implies, std::move(a), std::move(b)); }
  static Formula forall(int var, Formula body) { return quantifier(Kind::Forall, var, std::move(body)); }
  static Formula exists(int var, Formula body) { return quantifier(Kind::Exists, var, std::move(body)); }

  Kind kind() const { return node_->kind; }
  const std::string& predicate() const { return node_->predicate; }
  const std::vector<Term>& args() const { return node_->args; }
  int var() const { return node_->var; }
  const FormulaList& children() const { return node_->children; }
  const Formula& child(std::size_t i = 0) const { return node_->children.at(i); }
  bool valid() const { return node_ != nullptr; }

  bool is_quantifier() const { return kind() == Kind::Forall || kind() == Kind::Exists; }

 private:
  explicit Formula(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

  static Formula binary(Kind k, Formula a, Formula b) {
    return Formula(Node{k, {}, {}, -1, {std::move(a), std::move(b)}});
  }
  static Formula quantifier(Kind k, int var, Formula body) {
    return Formula(Node{k, {}, {}, var, {std::move(body)}});
  }

  std::shared_ptr<const Node> node_;
};

// Predicate name → arity for every atom in f.
inline void collect_predicates(const Formula& f, std::map<std::string, int>& out) {
  if (f.kind() == Formula::Kind::Atom) {
    out.emplace(f.predicate(), static_cast<int>(f.args().size()));
    return;
  }
  for (const auto& c : f.children()) collect_predicates(c, out);
}

inline std::set<std::string> predicates(const Formula& f) {
  std::map<std::string, int> m;
  collect_predicates(f, m);
  std::set<std::string> out;
  for (const auto& [p, _] : m) out.insert(p);
  return out;
}

inline void collect_free_vars(const Formula& f, std::set<int>& bound, std::set<int>& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      std::set<int> vs;
      for (const auto& a : f.args()) collect_vars(a, vs);
      for (int v : vs)
        if (!bound.count(v)) out.insert(v);
      return;
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      const bool fresh = bound.insert(f.var()).second;
      collect_free_vars(f.child(), bound, out);
      if (fresh) bound.erase(f.var());
      return;
    }
    default:
      for (const auto& c : f.children()) collect_free_vars(c, bound, out);
  }
}

inline std::set<int> free_vars(const Formula& f) {
  std::set<int> bound, out;
  collect_free_vars(f, bound, out);
  return out;
}

inline bool is_closed(const Formula& f) { return free_vars(f).empty(); }

inline void collect_bound_vars(const Formula& f, std::set<int>& out) {
  if (f.is_quantifier()) out.insert(f.var());
  for (const auto& c : f.children()) collect_bound_vars(c, out);
}

// ASCII rendering: all x (Romans(x) -> Italians(x)), exists y (...), -A(x),
// &, |.
inline std::string to_string(const Formula& f) {
  using K = Formula::Kind;
  auto args = [](const std::vector<Term>& ts) {
    std::string out = "(";
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (i) out += ',';
      out += to_string(ts[i]);
    }
    return out + ")";
  };
  auto wrapped = [](const Formula& g) {
    std::string s = to_string(g);
    return (g.kind() == K::Atom || g.kind() == K::Not || g.is_quantifier()) ? s : "(" + s + ")";
  };
  switch (f.kind()) {
    case K::Atom: return f.predicate() + args(f.args());
    case K::Not: return "-" + wrapped(f.child());
    case K::And: return wrapped(f.child(0)) + " & " + wrapped(f.child(1));
    case K::Or: return wrapped(f.child(0)) + " | " + wrapped(f.child(1));
    case K::Implies: return wrapped(f.child(0)) + " -> " + wrapped(f.child(1));
    case K::Forall: return "all " + var_name(f.var()) + " " + wrapped(f.child());
    case K::Exists: return "exists " + var_name(f.var()) + " " + wrapped(f.child());
  }
  return "?";
}

namespace detail {

inline void flatten(const Formula& f, Formula::Kind k, FormulaList& out) {
  if (f.kind() == k) {
    for (const auto& c : f.children()) flatten(c, k, out);
  } else {
    out.push_back(f);
  }
}

inline std::string canonical(const Formula& f, std::map<int, int>& names, int depth) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atom: {
      std::string out = f.predicate() + "(";
      for (const auto& a : f.args()) {
        // Closed formulas only contain bound variables, named by binding depth.
        if (a.is_var() && names.count(a.id))
          out += "b" + std::to_string(names.at(a.id)) + ",";
        else
          out += to_string(a) + ",";
      }
      return out + ")";
    }
    case K::Not: return "~" + canonical(f.child(), names, depth);
    case K::Implies:
      return "[" + canonical(f.child(0), names, depth) + ">" + canonical(f.child(1), names, depth) + "]";
    case K::And:
    case K::Or: {
      FormulaList ops;
      flatten(f, f.kind(), ops);
      std::vector<std::string> parts;
      for (const auto& o : ops) parts.push_back(canonical(o, names, depth));
      std::sort(parts.begin(), parts.end());
      parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
      std::string out = f.kind() == K::And ? "&{" : "|{";
      for (const auto& p : parts) out += p + ";";
      return out + "}";
    }
    case K::Forall:
    case K::Exists: {
      auto saved = names.find(f.var()) != names.end() ? std::optional<int>(names[f.var()]) : std::nullopt;
      names[f.var()] = depth;
      std::string out = (f.kind() == K::Forall ? "A" : "E") + std::to_string(depth) + "." +
                        canonical(f.child(), names, depth + 1);
      if (saved)
        names[f.var()] = *saved;
      else
        names.erase(f.var());
      return out;
    }
  }
  return "?";
}

}  // namespace detail

// Key identifying f up to reordering of ∧/∨ operands (and duplicate operands)
// and renaming of bound variables.
inline std::string canonical_key(const Formula& f) {
  std::map<int, int> names;
  return detail::canonical(f, names, 0);
}

}  // namespace entail::fol
