#pragma once

#include <string>

#include "entail/fol/formula.hpp"
#include "entail/lang/sentence.hpp"

namespace entail::fol {

inline constexpr int kSubjectVar = 0;  // x
inline constexpr int kObjectVar = 1;   // y

namespace detail {

// "[not] Q [not] N" with scope `body` over variable v:
//   all  → ∀v(N*(v) → body),  some → ∃v(N*(v) ∧ body),
// N* = ¬N(v) under noun negation, and the whole thing negated under
// determiner negation.
inline Formula noun_phrase(bool det_neg, const std::string& quant, bool noun_neg,
                           const std::string& noun, int v, Formula body) {
  Formula restrictor = Formula::atom(noun, {Term::var(v)});
  if (noun_neg) restrictor = Formula::negation(restrictor);
  Formula q = quant == "all" ? Formula::forall(v, Formula::implies(restrictor, std::move(body)))
                             : Formula::exists(v, Formula::conj(restrictor, std::move(body)));
  return det_neg ? Formula::negation(q) : q;
}

}  // namespace detail

// Verb phrase of s as a formula with x free. Verb negation scopes over the
// verb together with its object noun phrase.
inline Formula translate_verb_phrase(const Sentence& s) {
  Formula core = Formula::atom(s.verb, {Term::var(kSubjectVar), Term::var(kObjectVar)});
  Formula object = detail::noun_phrase(s.obj_det_neg, s.obj_quant, s.obj_noun_neg, s.obj_noun,
                                       kObjectVar, std::move(core));
  return s.verb_neg ? Formula::negation(object) : object;
}

// Closed formula over variables x and y expressing s.
inline Formula translate(const Sentence& s) {
  return detail::noun_phrase(s.subj_det_neg, s.subj_quant, s.subj_noun_neg, s.subj_noun, kSubjectVar,
                             translate_verb_phrase(s));
}

}  // namespace entail::fol
