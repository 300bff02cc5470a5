#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "entail/error.hpp"
#include "entail/lang/relation.hpp"
#include "entail/lang/vocabulary.hpp"

namespace entail {

// One declared lexical relation "left rel right".
struct LexicalEntry {
  std::string left;
  Relation relation;
  std::string right;
  WordClass word_class;
};

// Explicit finite sets for every noun and verb plus a universe per class. Used
// to check that the declared relations can all hold at once.
struct SetWitness {
  std::map<std::string, std::set<int>> sets;
  std::set<int> noun_universe;
  std::set<int> verb_universe;

  bool empty() const { return sets.empty(); }
};

// Relation between two finite sets inside a universe, by the set-theoretic
// definitions of the seven relations.
inline Relation set_relation(const std::set<int>& x, const std::set<int>& y,
                             const std::set<int>& universe) {
  auto contains_all = [](const std::set<int>& a, const std::set<int>& b) {
    return std::includes(a.begin(), a.end(), b.begin(), b.end());
  };
  std::set<int> meet, join;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::inserter(meet, meet.end()));
  std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::inserter(join, join.end()));
  const bool b1 = !meet.empty();
  const bool b2 = !contains_all(y, x);
  const bool b3 = !contains_all(x, y);
  const bool b4 = !contains_all(join, universe);
  return relation_from_bits(b1, b2, b3, b4);
}

class Taxonomy {
 public:
  Taxonomy() = default;

  Taxonomy(Vocabulary vocab, const std::vector<LexicalEntry>& entries, SetWitness witness = {})
      : vocab_(std::move(vocab)), witness_(std::move(witness)) {
    vocab_.validate();
    for (const auto& e : entries) add(e);
  }

  const Vocabulary& vocabulary() const { return vocab_; }
  const SetWitness& witness() const { return witness_; }

  // Declared entries in canonical orientation (left precedes right in the
  // vocabulary's listing order), sorted by that order.
  std::vector<LexicalEntry> entries() const {
    std::vector<LexicalEntry> out;
    for (const auto& [key, rel] : relations_) {
      auto c = *vocab_.class_of(key.first);
      out.push_back({key.first, rel, key.second, c});
    }
    std::sort(out.begin(), out.end(), [&](const LexicalEntry& a, const LexicalEntry& b) {
      return std::make_tuple(rank(a.left), rank(a.right)) <
             std::make_tuple(rank(b.left), rank(b.right));
    });
    return out;
  }

  // Relation of w to v. Identical words are "=", undeclared pairs "#".
  Relation relation(const std::string& w, const std::string& v) const {
    auto cw = vocab_.class_of(w);
    auto cv = vocab_.class_of(v);
    if (!cw || !cv) throw ConfigError("word not in vocabulary: '" + (cw ? v : w) + "'");
    if (*cw != *cv || *cw == WordClass::Quantifier)
      throw ConfigError("no lexical relation between '" + w + "' and '" + v + "'");
    if (w == v) return Relation::Equivalence;
    auto [key, flipped] = canonical(w, v);
    auto it = relations_.find(key);
    if (it == relations_.end()) return Relation::Independence;
    return flipped ? converse(it->second) : it->second;
  }

  // Checks every pair of nouns and every pair of verbs against the witness
  // sets. Returns a list of human readable mismatches; empty means coherent.
  std::vector<std::string> coherence_errors() const {
    std::vector<std::string> errors;
    if (witness_.empty()) {
      errors.emplace_back("no set witness configured");
      return errors;
    }
    for (WordClass c : {WordClass::Noun, WordClass::Verb}) {
      const auto& universe = c == WordClass::Noun ? witness_.noun_universe : witness_.verb_universe;
      const auto& ws = vocab_.words(c);
      for (const auto& w : ws) {
        auto it = witness_.sets.find(w);
        if (it == witness_.sets.end()) {
          errors.push_back("no witness set for '" + w + "'");
          continue;
        }
        if (!std::includes(universe.begin(), universe.end(), it->second.begin(), it->second.end()))
          errors.push_back("witness set of '" + w + "' escapes its universe");
      }
      if (!errors.empty()) continue;
      for (const auto& w : ws)
        for (const auto& v : ws) {
          Relation declared = relation(w, v);
          Relation actual = set_relation(witness_.sets.at(w), witness_.sets.at(v), universe);
          if (declared != actual)
            errors.push_back(w + " " + std::string(symbol(declared)) + " " + v +
                             " declared, witness gives " + std::string(symbol(actual)));
        }
    }
    return errors;
  }

  static Taxonomy from_json(const nlohmann::json& j) {
    Vocabulary vocab;
    try {
      if (j.contains("quantifiers")) vocab.quantifiers = j.at("quantifiers").get<std::vector<std::string>>();
      vocab.nouns = j.at("nouns").get<std::vector<std::string>>();
      vocab.verbs = j.at("verbs").get<std::vector<std::string>>();
      vocab.validate();
      std::vector<LexicalEntry> entries;
      auto read_relations = [&](const char* key, WordClass c) {
        if (!j.contains(key)) return;
        for (const auto& triple : j.at(key)) {
          if (!triple.is_array() || triple.size() != 3)
            throw ConfigError(std::string(key) + ": entries must be [word, relation, word]");
          auto rel = relation_from_symbol(triple[1].get<std::string>());
          if (!rel) throw ConfigError("unknown relation '" + triple[1].get<std::string>() + "'");
          entries.push_back({triple[0].get<std::string>(), *rel, triple[2].get<std::string>(), c});
        }
      };
      read_relations("noun_relations", WordClass::Noun);
      read_relations("verb_relations", WordClass::Verb);
      SetWitness witness;
      if (j.contains("set_witness")) {
        for (const auto& [word, members] : j.at("set_witness").items()) {
          auto v = members.get<std::vector<int>>();
          witness.sets[word] = std::set<int>(v.begin(), v.end());
        }
        auto universe = [&](const char* key) {
          auto v = j.at(key).get<std::vector<int>>();
          return std::set<int>(v.begin(), v.end());
        };
        witness.noun_universe = universe("noun_universe");
        witness.verb_universe = universe("verb_universe");
      }
      return Taxonomy(std::move(vocab), entries, std::move(witness));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("taxonomy config: ") + e.what());
    }
  }

  static Taxonomy load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open taxonomy config " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path + ": " + e.what());
    }
    return from_json(j);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["quantifiers"] = vocab_.quantifiers;
    j["nouns"] = vocab_.nouns;
    j["verbs"] = vocab_.verbs;
    j["noun_relations"] = nlohmann::json::array();
    j["verb_relations"] = nlohmann::json::array();
    for (const auto& e : entries()) {
      auto& list = e.word_class == WordClass::Noun ? j["noun_relations"] : j["verb_relations"];
      list.push_back({e.left, std::string(symbol(e.relation)), e.right});
    }
    if (!witness_.empty()) {
      for (const auto& [w, s] : witness_.sets) j["set_witness"][w] = std::vector<int>(s.begin(), s.end());
      j["noun_universe"] = std::vector<int>(witness_.noun_universe.begin(), witness_.noun_universe.end());
      j["verb_universe"] = std::vector<int>(witness_.verb_universe.begin(), witness_.verb_universe.end());
    }
    return j;
  }

  // Romans < Italians < Europeans, Germans < Europeans, Germans | Italians,
  // Germans | Romans, children # every nationality; love < like, hate < fear,
  // and the two verb branches mutually exclusive.
  static Taxonomy default_taxonomy() { return from_json(nlohmann::json::parse(kDefaultConfig)); }

  static constexpr const char* kDefaultConfig = R"json({
  "quantifiers": ["all", "some"],
  "nouns": ["Romans", "Italians", "Germans", "Europeans", "children"],
  "verbs": ["love", "like", "hate", "fear"],
  "noun_relations": [
    ["Romans", "<", "Italians"],
    ["Romans", "|", "Germans"],
    ["Romans", "<", "Europeans"],
    ["Romans", "#", "children"],
    ["Italians", "|", "Germans"],
    ["Italians", "<", "Europeans"],
    ["Italians", "#", "children"],
    ["Germans", "<", "Europeans"],
    ["Germans", "#", "children"],
    ["Europeans", "#", "children"]
  ],
  "verb_relations": [
    ["love", "<", "like"],
    ["love", "|", "hate"],
    ["love", "|", "fear"],
    ["like", "|", "hate"],
    ["like", "|", "fear"],
    ["hate", "<", "fear"]
  ],
  "set_witness": {
    "Romans": [0, 1],
    "Italians": [0, 1, 2, 3],
    "Germans": [4, 5],
    "Europeans": [0, 1, 2, 3, 4, 5, 6, 7],
    "children": [0, 2, 4, 6, 8],
    "love": [0],
    "like": [0, 1],
    "hate": [2],
    "fear": [2, 3]
  },
  "noun_universe": [0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
  "verb_universe": [0, 1, 2, 3, 4]
}
)json";

 private:
  int rank(const std::string& w) const {
    auto c = vocab_.class_of(w);
    const auto& ws = vocab_.words(*c);
    return static_cast<int>(std::find(ws.begin(), ws.end(), w) - ws.begin());
  }

  std::pair<std::pair<std::string, std::string>, bool> canonical(const std::string& w,
                                                                const std::string& v) const {
    if (rank(w) <= rank(v)) return {{w, v}, false};
    return {{v, w}, true};
  }

  void add(const LexicalEntry& e) {
    auto cl = vocab_.class_of(e.left);
    auto cr = vocab_.class_of(e.right);
    if (!cl || !cr) throw ConfigError("relation over unknown word: " + e.left + " / " + e.right);
    if (*cl != *cr || *cl != e.word_class)
      throw ConfigError("relation must join two " + std::string(class_name(e.word_class)) + "s: " +
                        e.left + " / " + e.right);
    if (e.left == e.right) {
      if (e.relation != Relation::Equivalence)
        throw ConfigError("self relation of '" + e.left + "' must be =");
      return;
    }
    auto [key, flipped] = canonical(e.left, e.right);
    Relation rel = flipped ? converse(e.relation) : e.relation;
    auto [it, inserted] = relations_.emplace(key, rel);
    if (!inserted && it->second != rel)
      throw ConfigError("conflicting relations for " + e.left + " / " + e.right);
  }

  Vocabulary vocab_;
  SetWitness witness_;
  std::map<std::pair<std::string, std::string>, Relation> relations_;
};

}  // namespace entail
