#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "entail/fol/formula.hpp"
#include "entail/lang/taxonomy.hpp"

namespace entail::fol {

struct Axiom {
  Formula formula;
  LexicalEntry source;  // the word pair and relation this axiom encodes
};

// Lexical axioms. Insertion drops any axiom equivalent (up to operand order of
// ∧/∨ and bound variable names) to one already present.
class AxiomSet {
 public:
  bool add(Axiom a) {
    if (!keys_.insert(canonical_key(a.formula)).second) return false;
    axioms_.push_back(std::move(a));
    return true;
  }

  const std::vector<Axiom>& axioms() const { return axioms_; }
  std::size_t size() const { return axioms_.size(); }
  bool empty() const { return axioms_.empty(); }

  FormulaList formulas() const {
    FormulaList out;
    for (const auto& a : axioms_) out.push_back(a.formula);
    return out;
  }

  auto begin() const { return axioms_.begin(); }
  auto end() const { return axioms_.end(); }

 private:
  std::vector<Axiom> axioms_;
  std::unordered_set<std::string> keys_;
};

namespace detail {

// Atom P over the quantified variables: P(x) for nouns, P(x,y) for verbs.
inline Formula lexical_atom(const std::string& word, WordClass c) {
  if (c == WordClass::Noun) return Formula::atom(word, {Term::var(0)});
  return Formula::atom(word, {Term::var(0), Term::var(1)});
}

inline Formula close_universally(Formula body, WordClass c) {
  if (c == WordClass::Verb) body = Formula::forall(1, std::move(body));
  return Formula::forall(0, std::move(body));
}

}  // namespace detail

// Axioms for one lexical relation A rel B:
//   A < B : ∀(A → B)               A > B : ∀(B → A)
//   A | B : ∀¬(A ∧ B), ¬∀(A ∨ B)   A ^ B : ∀¬(A ∧ B), ∀(A ∨ B)
//   A v B : ∀(¬A → B)              A # B : nothing
// Verbs quantify both argument positions.
inline std::vector<Formula> axioms_for(const LexicalEntry& e) {
  using detail::close_universally;
  const Formula a = detail::lexical_atom(e.left, e.word_class);
  const Formula b = detail::lexical_atom(e.right, e.word_class);
  const WordClass c = e.word_class;
  const Formula disjoint = close_universally(Formula::negation(Formula::conj(a, b)), c);
  const Formula exhaustive = close_universally(Formula::disj(a, b), c);
  switch (e.relation) {
    case Relation::Forward: return {close_universally(Formula::implies(a, b), c)};
    case Relation::Backward: return {close_universally(Formula::implies(b, a), c)};
    case Relation::Alternation: return {disjoint, Formula::negation(exhaustive)};
    case Relation::Negation: return {disjoint, exhaustive};
    case Relation::Cover: return {close_universally(Formula::implies(Formula::negation(a), b), c)};
    case Relation::Equivalence:
      // Distinct words declared equivalent are two predicates with equal extensions.
      if (e.left == e.right) return {};
      return {close_universally(Formula::implies(a, b), c), close_universally(Formula::implies(b, a), c)};
    case Relation::Independence: return {};
  }
  return {};
}

inline AxiomSet compile_axioms(const Taxonomy& t) {
  AxiomSet out;
  for (const auto& e : t.entries())
    for (auto& f : axioms_for(e)) out.add({std::move(f), e});
  return out;
}

// Keeps only the axioms whose predicates all occur in phi or psi. Equivalent
// duplicates are dropped by AxiomSet::add.
inline AxiomSet filter_axioms(const AxiomSet& all, const Formula& phi, const Formula& psi) {
  std::set<std::string> allowed = predicates(phi);
  allowed.merge(predicates(psi));
  AxiomSet out;
  for (const auto& a : all) {
    auto used = predicates(a.formula);
    if (std::includes(allowed.begin(), allowed.end(), used.begin(), used.end())) out.add(a);
  }
  return out;
}

}  // namespace entail::fol
