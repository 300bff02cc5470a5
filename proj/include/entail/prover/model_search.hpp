#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "entail/fol/clausify.hpp"
#include "entail/prover/finite_model.hpp"
#include "entail/prover/sat_solver.hpp"

namespace entail::prover {

struct Signature {
  std::map<std::string, int> predicates;  // name → arity
  std::map<int, int> functions;           // Skolem id → arity
};

inline void collect_functions(const fol::Term& t, std::map<int, int>& out) {
  if (t.is_var()) return;
  out.emplace(t.id, static_cast<int>(t.args.size()));
  for (const auto& a : t.args) collect_functions(a, out);
}

inline Signature signature_of(const std::vector<fol::Clause>& clauses) {
  Signature sig;
  for (const auto& c : clauses)
    for (const auto& l : c.literals) {
      sig.predicates.emplace(l.predicate, static_cast<int>(l.args.size()));
      for (const auto& t : l.args) collect_functions(t, sig.functions);
    }
  return sig;
}

namespace detail {

// Ground term: a domain element (fn < 0) or a Skolem symbol applied to ground
// terms.
struct GroundTerm {
  int fn = -1;
  int elem = 0;
  std::vector<GroundTerm> args;

  bool operator==(const GroundTerm&) const = default;
};

struct GroundLiteral {
  bool positive;
  const std::string* predicate;
  std::vector<GroundTerm> args;
};

// Propositional encoding of "is there a model of size n": one variable per
// ground atom and one per (function application, value) pair. Function values
// are flattened: a literal mentioning f(a) becomes, for each value v,
// ¬[f(a)=v] ∨ literal[v].
class Grounding {
 public:
  Grounding(const Signature& sig, int n) : sig_(sig), n_(n) {
    int next = 1;
    for (const auto& [name, arity] : sig.predicates) {
      pred_base_[name] = next;
      next += power(arity);
    }
    for (const auto& [id, arity] : sig.functions) {
      fn_base_[id] = next;
      next += power(arity) * n;
    }
    solver_.emplace(next - 1);
    for (const auto& [id, arity] : sig.functions)
      for (int code = 0; code < power(arity); ++code) {
        std::vector<int> at_least_one;
        for (int v = 0; v < n; ++v) at_least_one.push_back(fn_var(id, code, v));
        solver_->add_clause(std::move(at_least_one));
      }
    // Least-number symmetry breaking: the k-th constant takes a value <= k.
    int k = 0;
    for (const auto& [id, arity] : sig.functions) {
      if (arity != 0) continue;
      for (int v = k + 1; v < n; ++v) solver_->add_clause({-fn_var(id, 0, v)});
      ++k;
    }
  }

  void add(const fol::Clause& c) {
    std::set<int> vars;
    for (const auto& l : c.literals)
      for (const auto& t : l.args) fol::collect_vars(t, vars);
    const int max_var = vars.empty() ? -1 : *vars.rbegin();
    std::vector<int> order(vars.begin(), vars.end());
    std::vector<int> assignment(max_var + 1, 0);
    while (true) {
      std::vector<GroundLiteral> lits;
      for (const auto& l : c.literals) {
        GroundLiteral g{l.positive, &l.predicate, {}};
        for (const auto& t : l.args) g.args.push_back(ground(t, assignment));
        lits.push_back(std::move(g));
      }
      emit(std::move(lits), {});
      std::size_t k = 0;
      for (; k < order.size(); ++k) {
        if (++assignment[order[k]] < n_) break;
        assignment[order[k]] = 0;
      }
      if (k == order.size()) break;
    }
  }

  std::optional<FiniteModel> solve() {
    auto assignment = solver_->solve();
    if (!assignment) return std::nullopt;
    FiniteModel m;
    m.domain_size = n_;
    for (const auto& [name, arity] : sig_.predicates) {
      m.predicate_arity[name] = arity;
      auto& table = m.predicates[name];
      table.resize(power(arity));
      for (int code = 0; code < power(arity); ++code) table[code] = (*assignment)[pred_base_[name] + code];
    }
    for (const auto& [id, arity] : sig_.functions) {
      m.function_arity[id] = arity;
      auto& table = m.functions[id];
      table.resize(power(arity));
      for (int code = 0; code < power(arity); ++code) {
        int v = 0;
        while (!(*assignment)[fn_var(id, code, v)]) ++v;
        table[code] = v;
      }
    }
    return m;
  }

 private:
  int power(int k) const {
    int p = 1;
    for (int i = 0; i < k; ++i) p *= n_;
    return p;
  }

  int fn_var(int id, int code, int value) const { return fn_base_.at(id) + code * n_ + value; }

  static GroundTerm ground(const fol::Term& t, const std::vector<int>& assignment) {
    if (t.is_var()) return GroundTerm{-1, assignment[t.id], {}};
    GroundTerm g{t.id, 0, {}};
    for (const auto& a : t.args) g.args.push_back(ground(a, assignment));
    return g;
  }

  // Innermost function application whose arguments are all elements.
  static const GroundTerm* innermost(const GroundTerm& t) {
    if (t.fn < 0) return nullptr;
    for (const auto& a : t.args)
      if (const auto* inner = innermost(a)) return inner;
    return &t;
  }

  static void replace(GroundTerm& t, const GroundTerm& app, int value) {
    if (t.fn < 0) return;
    if (t == app) {
      t = GroundTerm{-1, value, {}};
      return;
    }
    for (auto& a : t.args) replace(a, app, value);
  }

  void emit(std::vector<GroundLiteral> lits, std::vector<int> extra) {
    const GroundTerm* app = nullptr;
    for (const auto& l : lits) {
      for (const auto& t : l.args)
        if ((app = innermost(t))) break;
      if (app) break;
    }
    if (!app) {
      for (const auto& l : lits) {
        int code = 0;
        for (const auto& t : l.args) code = code * n_ + t.elem;
        const int v = pred_base_.at(*l.predicate) + code;
        extra.push_back(l.positive ? v : -v);
      }
      solver_->add_clause(std::move(extra));
      return;
    }
    const GroundTerm target = *app;
    int code = 0;
    for (const auto& a : target.args) code = code * n_ + a.elem;
    for (int v = 0; v < n_; ++v) {
      auto next = lits;
      for (auto& l : next)
        for (auto& t : l.args) replace(t, target, v);
      auto e = extra;
      e.push_back(-fn_var(target.fn, code, v));
      emit(std::move(next), std::move(e));
    }
  }

  const Signature& sig_;
  int n_;
  std::map<std::string, int> pred_base_;
  std::map<int, int> fn_base_;
  std::optional<SatSolver> solver_;
};

}  // namespace detail

// Searches for a model with exactly `domain_size` elements.
inline std::optional<FiniteModel> find_model(const std::vector<fol::Clause>& clauses, int domain_size) {
  const Signature sig = signature_of(clauses);
  detail::Grounding g(sig, domain_size);
  for (const auto& c : clauses) g.add(c);
  return g.solve();
}

}  // namespace entail::prover
