#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "entail/error.hpp"

namespace entail {

// The seven entailment relations between two sets (or two sentences, read as
// the sets of models that make them true). The enumerator value doubles as the
// class index used by the classifiers.
enum class Relation : int {
  Independence = 0,  // #
  Forward = 1,       // <
  Backward = 2,      // >
  Equivalence = 3,   // =
  Alternation = 4,   // |
  Negation = 5,      // ^
  Cover = 6,         // v
};

inline constexpr std::size_t kRelationCount = 7;

inline constexpr std::array<Relation, kRelationCount> kAllRelations = {
    Relation::Independence, Relation::Forward,  Relation::Backward, Relation::Equivalence,
    Relation::Alternation,  Relation::Negation, Relation::Cover};

constexpr std::string_view symbol(Relation r) {
  switch (r) {
    case Relation::Independence: return "#";
    case Relation::Forward: return "<";
    case Relation::Backward: return ">";
    case Relation::Equivalence: return "=";
    case Relation::Alternation: return "|";
    case Relation::Negation: return "^";
    case Relation::Cover: return "v";
  }
  return "?";
}

inline std::optional<Relation> relation_from_symbol(std::string_view s) {
  for (Relation r : kAllRelations)
    if (symbol(r) == s) return r;
  return std::nullopt;
}

inline Relation parse_relation(std::string_view s) {
  if (auto r = relation_from_symbol(s)) return *r;
  throw DataError("unknown relation symbol '" + std::string(s) + "'");
}

constexpr int index_of(Relation r) { return static_cast<int>(r); }
constexpr Relation relation_at(int i) { return static_cast<Relation>(i); }

// Relation of (y, x) given the relation of (x, y).
constexpr Relation converse(Relation r) {
  switch (r) {
    case Relation::Forward: return Relation::Backward;
    case Relation::Backward: return Relation::Forward;
    default: return r;
  }
}

// Maps the four satisfiability bits of a pair to a relation.
//   b1 = x ∩ y nonempty, b2 = x \ y nonempty, b3 = y \ x nonempty,
//   b4 = complement of x ∪ y nonempty.
// Checks are applied in a fixed precedence so that degenerate cases (empty or
// universal sets) still receive exactly one label.
constexpr Relation relation_from_bits(bool b1, bool b2, bool b3, bool b4) {
  if (!b2 && !b3) return Relation::Equivalence;
  if (!b2 && b3) return Relation::Forward;
  if (b2 && !b3) return Relation::Backward;
  if (!b1 && !b4) return Relation::Negation;
  if (!b1 && b4) return Relation::Alternation;
  if (!b4 && b1 && b2 && b3) return Relation::Cover;
  return Relation::Independence;
}

}  // namespace entail
