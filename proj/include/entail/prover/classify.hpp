#pragma once

#include <algorithm>
#include <array>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "entail/fol/axioms.hpp"
#include "entail/fol/clausify.hpp"
#include "entail/fol/formula.hpp"
#include "entail/lang/relation.hpp"
#include "entail/prover/check_sat.hpp"

namespace entail::prover {

// Memo of satisfiability keyed by the canonical forms of a problem's formulas
// (after negation normal form). Safe for concurrent use.
class SatCache {
 public:
  std::optional<bool> find(const std::string& key) const {
    std::shared_lock lock(mutex_);
    auto it = table_.find(key);
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }

  void store(const std::string& key, bool sat) {
    std::unique_lock lock(mutex_);
    table_.emplace(key, sat);
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return table_.size();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, bool> table_;
};

// Outcome of classifying one pair. `relation` is empty when any of the four
// satisfiability checks was undecided.
struct PairDecision {
  std::optional<Relation> relation;
  // b1 = SAT(A, φ, ψ), b2 = SAT(A, φ, ¬ψ), b3 = SAT(A, ¬φ, ψ), b4 = SAT(A, ¬φ, ¬ψ)
  std::array<SatVerdict::Status, 4> bits{};
  // Full verdicts (models / refutations); only filled when not served from cache.
  std::array<std::optional<SatVerdict>, 4> verdicts;
};

namespace detail {

inline std::string problem_key(const std::vector<std::string>& axiom_keys, const fol::Formula& a,
                               const fol::Formula& b) {
  std::vector<std::string> parts = axiom_keys;
  parts.push_back(fol::canonical_key(fol::to_nnf(a)));
  parts.push_back(fol::canonical_key(fol::to_nnf(b)));
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  std::string key;
  for (const auto& p : parts) key += p + "\n";
  return key;
}

}  // namespace detail

// Decides the relation between φ and ψ relative to the (already filtered)
// axioms by four satisfiability checks; see relation_from_bits.
inline PairDecision classify_pair(const fol::Formula& phi, const fol::Formula& psi, const fol::AxiomSet& axioms,
                                  const ProverLimits& limits = {}, SatCache* cache = nullptr) {
  fol::ClausifyContext ctx;
  std::vector<fol::Clause> base;
  std::vector<std::string> axiom_keys;
  for (const auto& a : axioms) {
    auto cs = fol::clausify(a.formula, ctx);
    base.insert(base.end(), cs.begin(), cs.end());
    if (cache) axiom_keys.push_back(fol::canonical_key(fol::to_nnf(a.formula)));
  }
  const std::array<fol::Formula, 2> left = {phi, fol::Formula::negation(phi)};
  const std::array<fol::Formula, 2> right = {psi, fol::Formula::negation(psi)};
  std::array<std::vector<fol::Clause>, 2> left_clauses, right_clauses;
  for (int k = 0; k < 2; ++k) {
    left_clauses[k] = fol::clausify(left[k], ctx);
    right_clauses[k] = fol::clausify(right[k], ctx);
  }

  PairDecision out;
  bool undecided = false;
  for (int bit = 0; bit < 4; ++bit) {
    const int l = bit / 2, r = bit % 2;
    std::string key;
    if (cache) {
      key = detail::problem_key(axiom_keys, left[l], right[r]);
      if (auto hit = cache->find(key)) {
        out.bits[bit] = *hit ? SatVerdict::Status::Sat : SatVerdict::Status::Unsat;
        continue;
      }
    }
    std::vector<fol::Clause> problem = base;
    problem.insert(problem.end(), left_clauses[l].begin(), left_clauses[l].end());
    problem.insert(problem.end(), right_clauses[r].begin(), right_clauses[r].end());
    SatVerdict v = check_sat(problem, limits);
    out.bits[bit] = v.status;
    if (v.undecided()) undecided = true;
    if (cache && !v.undecided()) cache->store(key, v.sat());
    out.verdicts[bit] = std::move(v);
  }
  if (!undecided) {
    auto is_sat = [&](int b) { return out.bits[b] == SatVerdict::Status::Sat; };
    out.relation = relation_from_bits(is_sat(0), is_sat(1), is_sat(2), is_sat(3));
  }
  return out;
}

// Filters the full axiom set down to the predicates of the pair, then
// classifies.
inline PairDecision classify_with_taxonomy(const fol::Formula& phi, const fol::Formula& psi,
                                           const fol::AxiomSet& all_axioms, const ProverLimits& limits = {},
                                           SatCache* cache = nullptr) {
  return classify_pair(phi, psi, fol::filter_axioms(all_axioms, phi, psi), limits, cache);
}

}  // namespace entail::prover
