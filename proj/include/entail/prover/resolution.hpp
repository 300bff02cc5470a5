#pragma once

#include <algorithm>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "entail/fol/clausify.hpp"

namespace entail::prover {

using Substitution = std::vector<std::optional<fol::Term>>;

namespace detail {

inline const fol::Term& walk(const fol::Term& t, const Substitution& s) {
  const fol::Term* cur = &t;
  while (cur->is_var() && cur->id < static_cast<int>(s.size()) && s[cur->id]) cur = &*s[cur->id];
  return *cur;
}

inline fol::Term apply(const fol::Term& t, const Substitution& s) {
  const fol::Term& w = walk(t, s);
  if (w.is_var()) return w;
  fol::Term out = fol::Term::fn(w.id);
  out.args.reserve(w.args.size());
  for (const auto& a : w.args) out.args.push_back(apply(a, s));
  return out;
}

inline bool occurs(int var, const fol::Term& t, const Substitution& s) {
  const fol::Term& w = walk(t, s);
  if (w.is_var()) return w.id == var;
  for (const auto& a : w.args)
    if (occurs(var, a, s)) return true;
  return false;
}

inline bool unify(const fol::Term& a, const fol::Term& b, Substitution& s) {
  const fol::Term& x = walk(a, s);
  const fol::Term& y = walk(b, s);
  if (x.is_var() && y.is_var() && x.id == y.id) return true;
  if (x.is_var()) {
    if (occurs(x.id, y, s)) return false;
    s[x.id] = y;
    return true;
  }
  if (y.is_var()) {
    if (occurs(y.id, x, s)) return false;
    s[y.id] = x;
    return true;
  }
  if (x.id != y.id || x.args.size() != y.args.size()) return false;
  // x and y may alias bindings in s; recurse over copies.
  const fol::Term xc = x, yc = y;
  for (std::size_t i = 0; i < xc.args.size(); ++i)
    if (!unify(xc.args[i], yc.args[i], s)) return false;
  return true;
}

inline int max_var(const fol::Term& t) {
  if (t.is_var()) return t.id;
  int m = -1;
  for (const auto& a : t.args) m = std::max(m, max_var(a));
  return m;
}

inline int max_var(const fol::Clause& c) {
  int m = -1;
  for (const auto& l : c.literals)
    for (const auto& t : l.args) m = std::max(m, max_var(t));
  return m;
}

inline void shift(fol::Term& t, int offset) {
  if (t.is_var()) {
    t.id += offset;
    return;
  }
  for (auto& a : t.args) shift(a, offset);
}

// One-way matching: binds variables of `pattern` only.
inline bool match(const fol::Term& pattern, const fol::Term& target, Substitution& s) {
  if (pattern.is_var()) {
    auto& slot = s[pattern.id];
    if (slot) return *slot == target;
    slot = target;
    return true;
  }
  if (target.is_var() || pattern.id != target.id || pattern.args.size() != target.args.size()) return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i)
    if (!match(pattern.args[i], target.args[i], s)) return false;
  return true;
}

inline bool subsumes_from(const fol::Clause& c, std::size_t k, const fol::Clause& d, Substitution& s) {
  if (k == c.literals.size()) return true;
  const auto& l = c.literals[k];
  for (const auto& m : d.literals) {
    if (m.positive != l.positive || m.predicate != l.predicate) continue;
    Substitution trial = s;
    bool ok = true;
    for (std::size_t i = 0; i < l.args.size() && ok; ++i) ok = match(l.args[i], m.args[i], trial);
    if (ok && subsumes_from(c, k + 1, d, trial)) return true;
  }
  return false;
}

inline int weight(const fol::Term& t) {
  int w = 1;
  for (const auto& a : t.args) w += weight(a);
  return w;
}

inline int weight(const fol::Clause& c) {
  int w = 0;
  for (const auto& l : c.literals) {
    w += 1;
    for (const auto& t : l.args) w += weight(t);
  }
  return w;
}

}  // namespace detail

// True when cθ ⊆ d for some substitution θ.
inline bool subsumes(const fol::Clause& c, const fol::Clause& d) {
  if (c.literals.size() > d.literals.size()) return false;
  Substitution s(detail::max_var(c) + 1);
  return detail::subsumes_from(c, 0, d, s);
}

// Binary resolvent of a on literal i with b on literal j. Returns nullopt when
// the literals do not clash or the resolvent is a tautology.
inline std::optional<fol::Clause> resolve(const fol::Clause& a, std::size_t i, const fol::Clause& b,
                                          std::size_t j) {
  const auto& la = a.literals.at(i);
  const auto& lb0 = b.literals.at(j);
  if (la.positive == lb0.positive || la.predicate != lb0.predicate || la.args.size() != lb0.args.size())
    return std::nullopt;
  const int offset = detail::max_var(a) + 1;
  fol::Clause bs = b;
  for (auto& l : bs.literals)
    for (auto& t : l.args) detail::shift(t, offset);
  Substitution s(offset + detail::max_var(b) + 1);
  const auto& lb = bs.literals[j];
  for (std::size_t k = 0; k < la.args.size(); ++k)
    if (!detail::unify(la.args[k], lb.args[k], s)) return std::nullopt;
  fol::Clause out;
  for (std::size_t k = 0; k < a.literals.size(); ++k)
    if (k != i) out.literals.push_back(a.literals[k]);
  for (std::size_t k = 0; k < bs.literals.size(); ++k)
    if (k != j) out.literals.push_back(bs.literals[k]);
  for (auto& l : out.literals)
    for (auto& t : l.args) t = detail::apply(t, s);
  if (!fol::normalize(out)) return std::nullopt;
  return out;
}

// Factor of c unifying literals i and j.
inline std::optional<fol::Clause> factor(const fol::Clause& c, std::size_t i, std::size_t j) {
  const auto& li = c.literals.at(i);
  const auto& lj = c.literals.at(j);
  if (i == j || li.positive != lj.positive || li.predicate != lj.predicate) return std::nullopt;
  Substitution s(detail::max_var(c) + 1);
  for (std::size_t k = 0; k < li.args.size(); ++k)
    if (!detail::unify(li.args[k], lj.args[k], s)) return std::nullopt;
  fol::Clause out;
  for (std::size_t k = 0; k < c.literals.size(); ++k)
    if (k != j) out.literals.push_back(c.literals[k]);
  for (auto& l : out.literals)
    for (auto& t : l.args) t = detail::apply(t, s);
  if (!fol::normalize(out)) return std::nullopt;
  return out;
}

struct Inference {
  enum class Kind { Input, Resolve, Factor };
  Kind kind = Kind::Input;
  int parent1 = -1, parent2 = -1;
  int lit1 = -1, lit2 = -1;
};

struct DerivationStep {
  fol::Clause clause;
  Inference from;
};

// Derivation of the empty clause. Parents index earlier steps.
struct Refutation {
  std::vector<DerivationStep> steps;
};

inline std::string to_string(const Refutation& r) {
  std::string out;
  for (std::size_t k = 0; k < r.steps.size(); ++k) {
    const auto& s = r.steps[k];
    out += std::to_string(k) + ". " + fol::to_string(s.clause) + "  [";
    switch (s.from.kind) {
      case Inference::Kind::Input: out += "input"; break;
      case Inference::Kind::Resolve:
        out += "resolve " + std::to_string(s.from.parent1) + "." + std::to_string(s.from.lit1) + " " +
               std::to_string(s.from.parent2) + "." + std::to_string(s.from.lit2);
        break;
      case Inference::Kind::Factor:
        out += "factor " + std::to_string(s.from.parent1) + " " + std::to_string(s.from.lit1) + "," +
               std::to_string(s.from.lit2);
        break;
    }
    out += "]\n";
  }
  return out;
}

// Replays every step of r and checks it ends in the empty clause.
inline bool check_refutation(const Refutation& r, const std::vector<fol::Clause>& inputs) {
  if (r.steps.empty() || !r.steps.back().clause.empty()) return false;
  for (std::size_t k = 0; k < r.steps.size(); ++k) {
    const auto& s = r.steps[k];
    auto parent = [&](int p) -> const fol::Clause* {
      return (p >= 0 && p < static_cast<int>(k)) ? &r.steps[p].clause : nullptr;
    };
    std::optional<fol::Clause> expected;
    switch (s.from.kind) {
      case Inference::Kind::Input: {
        bool found = false;
        for (auto c : inputs)
          if (fol::normalize(c) && c == s.clause) found = true;
        if (!found) return false;
        continue;
      }
      case Inference::Kind::Resolve: {
        const auto* a = parent(s.from.parent1);
        const auto* b = parent(s.from.parent2);
        if (!a || !b || s.from.lit1 < 0 || s.from.lit2 < 0 ||
            s.from.lit1 >= static_cast<int>(a->literals.size()) ||
            s.from.lit2 >= static_cast<int>(b->literals.size()))
          return false;
        expected = resolve(*a, s.from.lit1, *b, s.from.lit2);
        break;
      }
      case Inference::Kind::Factor: {
        const auto* a = parent(s.from.parent1);
        if (!a || s.from.lit1 < 0 || s.from.lit2 < 0 || s.from.lit1 >= static_cast<int>(a->literals.size()) ||
            s.from.lit2 >= static_cast<int>(a->literals.size()))
          return false;
        expected = factor(*a, s.from.lit1, s.from.lit2);
        break;
      }
    }
    if (!expected || !(*expected == s.clause)) return false;
  }
  return true;
}

struct ResolutionResult {
  enum class Status { Refuted, Saturated, LimitReached };
  Status status = Status::LimitReached;
  std::optional<Refutation> refutation;
  std::size_t generated = 0;
};

// Given-clause saturation with binary resolution and factoring. Subsumed
// clauses are deleted in both directions.
inline ResolutionResult refute(const std::vector<fol::Clause>& inputs, std::size_t max_steps) {
  std::vector<DerivationStep> all;
  std::vector<bool> removed;
  // Lightest clause first, except every kAgePick-th selection takes the
  // oldest one, which keeps the search fair when cheap unit chains grow forever.
  constexpr int kAgePick = 5;
  using Key = std::pair<int, int>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> by_weight;
  std::priority_queue<int, std::vector<int>, std::greater<>> by_age;
  std::vector<bool> selected;
  int picks = 0;
  std::vector<int> active;
  ResolutionResult result;

  auto extract = [&](int empty_id) {
    std::vector<int> order;
    std::vector<int> mark(all.size(), -1);
    // Post-order walk so parents precede children.
    std::vector<std::pair<int, bool>> work{{empty_id, false}};
    while (!work.empty()) {
      auto [id, expanded] = work.back();
      work.pop_back();
      if (mark[id] >= 0) continue;
      if (expanded) {
        mark[id] = static_cast<int>(order.size());
        order.push_back(id);
        continue;
      }
      work.push_back({id, true});
      const auto& f = all[id].from;
      if (f.parent2 >= 0 && mark[f.parent2] < 0) work.push_back({f.parent2, false});
      if (f.parent1 >= 0 && mark[f.parent1] < 0) work.push_back({f.parent1, false});
    }
    Refutation r;
    for (int id : order) {
      DerivationStep s = all[id];
      if (s.from.parent1 >= 0) s.from.parent1 = mark[s.from.parent1];
      if (s.from.parent2 >= 0) s.from.parent2 = mark[s.from.parent2];
      r.steps.push_back(std::move(s));
    }
    return r;
  };

  auto forward_subsumed = [&](const fol::Clause& c) {
    for (int a : active)
      if (!removed[a] && subsumes(all[a].clause, c)) return true;
    return false;
  };

  auto add = [&](fol::Clause c, Inference from) -> int {
    const int id = static_cast<int>(all.size());
    all.push_back({std::move(c), from});
    removed.push_back(false);
    selected.push_back(false);
    by_weight.emplace(detail::weight(all[id].clause), id);
    by_age.push(id);
    return id;
  };

  for (auto c : inputs) {
    if (!fol::normalize(c)) continue;
    const int id = add(std::move(c), {});
    if (all[id].clause.empty()) {
      result.status = ResolutionResult::Status::Refuted;
      result.refutation = extract(id);
      return result;
    }
  }

  auto next_given = [&]() -> int {
    const bool age = ++picks % kAgePick == 0;
    while (true) {
      int id;
      if (age && !by_age.empty()) {
        id = by_age.top();
        by_age.pop();
      } else if (!by_weight.empty()) {
        id = by_weight.top().second;
        by_weight.pop();
      } else if (!by_age.empty()) {
        id = by_age.top();
        by_age.pop();
      } else {
        return -1;
      }
      if (!selected[id]) {
        selected[id] = true;
        return id;
      }
    }
  };

  while (true) {
    const int given = next_given();
    if (given < 0) break;
    if (removed[given] || forward_subsumed(all[given].clause)) continue;
    for (int a : active)
      if (!removed[a] && subsumes(all[given].clause, all[a].clause)) removed[a] = true;
    active.erase(std::remove_if(active.begin(), active.end(), [&](int a) { return removed[a]; }),
                 active.end());
    active.push_back(given);

    std::vector<std::pair<fol::Clause, Inference>> fresh;
    const fol::Clause g = all[given].clause;
    for (std::size_t i = 0; i < g.literals.size(); ++i)
      for (std::size_t j = i + 1; j < g.literals.size(); ++j)
        if (auto f = factor(g, i, j))
          fresh.push_back({std::move(*f), {Inference::Kind::Factor, given, -1, int(i), int(j)}});
    for (int a : active) {
      const fol::Clause& other = all[a].clause;
      for (std::size_t i = 0; i < g.literals.size(); ++i)
        for (std::size_t j = 0; j < other.literals.size(); ++j) {
          if (g.literals[i].positive == other.literals[j].positive ||
              g.literals[i].predicate != other.literals[j].predicate)
            continue;
          if (auto r = resolve(g, i, other, j))
            fresh.push_back({std::move(*r), {Inference::Kind::Resolve, given, a, int(i), int(j)}});
        }
    }
    for (auto& [c, from] : fresh) {
      if (++result.generated > max_steps) {
        result.status = ResolutionResult::Status::LimitReached;
        return result;
      }
      if (c.empty()) {
        const int id = add(std::move(c), from);
        result.status = ResolutionResult::Status::Refuted;
        result.refutation = extract(id);
        return result;
      }
      if (forward_subsumed(c)) continue;
      add(std::move(c), from);
    }
  }
  result.status = ResolutionResult::Status::Saturated;
  return result;
}

}  // namespace entail::prover
