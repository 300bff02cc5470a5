#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "entail/data/dataset.hpp"
#include "entail/error.hpp"
#include "entail/lang/vocabulary.hpp"

namespace entail::data {

// One word-for-word replacement applied to a test set.
struct Substitution {
  std::string name;
  std::map<std::string, std::string> mapping;
};

// A family of substitutions evaluated one at a time against the same model,
// plus the pretrained vectors that supply the new words.
struct SubstitutionSpec {
  std::string name;
  std::string embedding_path;
  std::vector<Substitution> substitutions;

  std::set<std::string> replacement_words() const {
    std::set<std::string> out;
    for (const auto& s : substitutions)
      for (const auto& [from, to] : s.mapping) out.insert(to);
    return out;
  }
};

// {"name": ..., "embeddings": path, "substitutions": [{"name": ..., "mapping": {w: r, ...}}, ...]}
// A relative embedding path is resolved against the spec file's directory.
inline SubstitutionSpec substitution_spec_from_json(const nlohmann::json& j, const std::string& base_dir = "") {
  SubstitutionSpec spec;
  try {
    spec.name = j.value("name", "");
    spec.embedding_path = j.value("embeddings", "");
    for (const auto& s : j.at("substitutions")) {
      Substitution sub;
      sub.mapping = s.at("mapping").get<std::map<std::string, std::string>>();
      sub.name = s.value("name", "");
      if (sub.name.empty())
        for (const auto& [from, to] : sub.mapping) sub.name += (sub.name.empty() ? "" : ", ") + from + " -> " + to;
      spec.substitutions.push_back(std::move(sub));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad substitution spec: ") + e.what());
  }
  if (!spec.embedding_path.empty() && !base_dir.empty() && std::filesystem::path(spec.embedding_path).is_relative())
    spec.embedding_path = (std::filesystem::path(base_dir) / spec.embedding_path).string();
  return spec;
}

inline SubstitutionSpec load_substitution_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read substitution spec " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return substitution_spec_from_json(j, std::filesystem::path(path).parent_path().string());
}

struct SubstitutedFragment {
  Dataset original;     // test pairs mentioning at least one mapped word
  Dataset substituted;  // the same pairs after replacement, labels unchanged
};

inline Sentence substitute_words(Sentence s, const std::map<std::string, std::string>& mapping) {
  for (std::string* w : {&s.subj_quant, &s.subj_noun, &s.verb, &s.obj_quant, &s.obj_noun}) {
    auto it = mapping.find(*w);
    if (it != mapping.end()) *w = it->second;
  }
  return s;
}

// Restricts `test` to pairs containing a mapped word and replaces those words.
// Every key must be a noun or verb of `vocab`; when `known` is given every
// replacement must be in it (the words of the embedding file).
inline SubstitutedFragment apply_substitution(const Dataset& test, const Substitution& sub, const Vocabulary& vocab,
                                              const std::set<std::string>* known = nullptr) {
  std::string missing;
  for (const auto& [from, to] : sub.mapping) {
    auto c = vocab.class_of(from);
    if (!c || *c == WordClass::Quantifier) throw ConfigError("substitution key '" + from + "' is not a noun or verb");
    if (known && !known->count(to)) missing += (missing.empty() ? "" : ", ") + to;
  }
  if (!missing.empty()) throw DataError("replacement words without embeddings: " + missing);
  SubstitutedFragment out;
  for (const auto& p : test) {
    bool hit = false;
    for (const auto& [from, to] : sub.mapping) hit = hit || p.left.contains_word(from) || p.right.contains_word(from);
    if (!hit) continue;
    out.original.push_back(p);
    out.substituted.push_back({p.relation, substitute_words(p.left, sub.mapping), substitute_words(p.right, sub.mapping)});
  }
  return out;
}

}  // namespace entail::data
