#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "entail/fol/formula.hpp"

namespace entail::fol {

struct Literal {
  bool positive = true;
  std::string predicate;
  std::vector<Term> args;

  friend bool operator==(const Literal& a, const Literal& b) {
    return a.positive == b.positive && a.predicate == b.predicate && a.args == b.args;
  }
  friend bool operator<(const Literal& a, const Literal& b) {
    if (a.predicate != b.predicate) return a.predicate < b.predicate;
    if (a.positive != b.positive) return a.positive < b.positive;
    return std::lexicographical_compare(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
  }
};

// Disjunction of literals; variables are implicitly universally quantified.
struct Clause {
  std::vector<Literal> literals;

  bool empty() const { return literals.empty(); }
  friend bool operator==(const Clause& a, const Clause& b) { return a.literals == b.literals; }
};

inline std::string to_string(const Literal& l) {
  std::string out = l.positive ? "" : "-";
  out += l.predicate + "(";
  for (std::size_t i = 0; i < l.args.size(); ++i) {
    if (i) out += ',';
    out += to_string(l.args[i]);
  }
  return out + ")";
}

inline std::string to_string(const Clause& c) {
  if (c.literals.empty()) return "$F";
  std::string out;
  for (std::size_t i = 0; i < c.literals.size(); ++i) {
    if (i) out += " | ";
    out += to_string(c.literals[i]);
  }
  return out;
}

// Fresh-symbol counters shared by all formulas clausified into one problem, so
// that Skolem symbols of different formulas never collide.
struct ClausifyContext {
  int next_var = 0;
  int next_skolem = 0;
  std::map<int, int> skolem_arity;
};

namespace detail {

// Negation normal form: only ∧, ∨, quantifiers and negated atoms remain.
inline Formula nnf(const Formula& f, bool negate) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atom: return negate ? Formula::negation(f) : f;
    case K::Not: return nnf(f.child(), !negate);
    case K::And:
      return negate ? Formula::disj(nnf(f.child(0), true), nnf(f.child(1), true))
                    : Formula::conj(nnf(f.child(0), false), nnf(f.child(1), false));
    case K::Or:
      return negate ? Formula::conj(nnf(f.child(0), true), nnf(f.child(1), true))
                    : Formula::disj(nnf(f.child(0), false), nnf(f.child(1), false));
    case K::Implies:
      return negate ? Formula::conj(nnf(f.child(0), false), nnf(f.child(1), true))
                    : Formula::disj(nnf(f.child(0), true), nnf(f.child(1), false));
    case K::Forall:
      return negate ? Formula::exists(f.var(), nnf(f.child(), true))
                    : Formula::forall(f.var(), nnf(f.child(), false));
    case K::Exists:
      return negate ? Formula::forall(f.var(), nnf(f.child(), true))
                    : Formula::exists(f.var(), nnf(f.child(), false));
  }
  return f;
}

inline Term substitute(const Term& t, const std::map<int, Term>& env) {
  if (t.is_var()) {
    auto it = env.find(t.id);
    return it == env.end() ? t : it->second;
  }
  Term out = t;
  for (auto& a : out.args) a = substitute(a, env);
  return out;
}

// Standardizes apart and Skolemizes an NNF formula, dropping the universal
// quantifiers. Each ∃ is replaced by a Skolem term over the universally bound
// variables free in its scope.
inline Formula skolemize(const Formula& f, std::map<int, Term> env, const std::vector<int>& universals,
                         ClausifyContext& ctx) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atom: {
      std::vector<Term> args;
      for (const auto& a : f.args()) args.push_back(substitute(a, env));
      return Formula::atom(f.predicate(), std::move(args));
    }
    case K::Not: return Formula::negation(skolemize(f.child(), env, universals, ctx));
    case K::And:
    case K::Or: {
      Formula a = skolemize(f.child(0), env, universals, ctx);
      Formula b = skolemize(f.child(1), env, universals, ctx);
      return f.kind() == K::And ? Formula::conj(std::move(a), std::move(b))
                                : Formula::disj(std::move(a), std::move(b));
    }
    case K::Forall: {
      const int fresh = ctx.next_var++;
      env[f.var()] = Term::var(fresh);
      auto inner = universals;
      inner.push_back(fresh);
      return skolemize(f.child(), std::move(env), inner, ctx);
    }
    case K::Exists: {
      std::set<int> used;
      for (int v : free_vars(f)) collect_vars(substitute(Term::var(v), env), used);
      std::vector<Term> args;
      for (int u : universals)
        if (used.count(u)) args.push_back(Term::var(u));
      const int id = ctx.next_skolem++;
      ctx.skolem_arity[id] = static_cast<int>(args.size());
      env[f.var()] = Term::fn(id, std::move(args));
      return skolemize(f.child(), std::move(env), universals, ctx);
    }
    case K::Implies: break;
  }
  return f;
}

using LiteralSets = std::vector<std::vector<Literal>>;

inline LiteralSets cnf(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atom: return {{Literal{true, f.predicate(), f.args()}}};
    case K::Not: return {{Literal{false, f.child().predicate(), f.child().args()}}};
    case K::And: {
      auto a = cnf(f.child(0));
      auto b = cnf(f.child(1));
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
    case K::Or: {
      auto a = cnf(f.child(0));
      auto b = cnf(f.child(1));
      LiteralSets out;
      for (const auto& ca : a)
        for (const auto& cb : b) {
          auto c = ca;
          c.insert(c.end(), cb.begin(), cb.end());
          out.push_back(std::move(c));
        }
      return out;
    }
    default: return {};
  }
}

inline void rename_vars(Term& t, std::map<int, int>& names) {
  if (t.is_var()) {
    auto [it, _] = names.emplace(t.id, static_cast<int>(names.size()));
    t.id = it->second;
    return;
  }
  for (auto& a : t.args) rename_vars(a, names);
}

}  // namespace detail

// Sorts and deduplicates literals and renames variables to 0, 1, ... in order
// of appearance. Returns false for tautologies.
inline bool normalize(Clause& c) {
  auto rename_all = [&c] {
    std::map<int, int> names;
    for (auto& l : c.literals)
      for (auto& t : l.args) detail::rename_vars(t, names);
  };
  rename_all();
  std::sort(c.literals.begin(), c.literals.end());
  c.literals.erase(std::unique(c.literals.begin(), c.literals.end()), c.literals.end());
  for (std::size_t i = 0; i + 1 < c.literals.size(); ++i)
    for (std::size_t j = i + 1; j < c.literals.size(); ++j) {
      const auto& a = c.literals[i];
      const auto& b = c.literals[j];
      if (a.positive != b.positive && a.predicate == b.predicate && a.args == b.args) return false;
    }
  rename_all();
  return true;
}

inline Formula to_nnf(const Formula& f) { return detail::nnf(f, false); }

// Equisatisfiable clause set for a closed formula.
inline std::vector<Clause> clausify(const Formula& f, ClausifyContext& ctx) {
  Formula matrix = detail::skolemize(to_nnf(f), {}, {}, ctx);
  std::vector<Clause> out;
  for (auto& lits : detail::cnf(matrix)) {
    Clause c{std::move(lits)};
    if (!normalize(c)) continue;
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<Clause> clausify(const Formula& f) {
  ClausifyContext ctx;
  return clausify(f, ctx);
}

}  // namespace entail::fol
