#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "entail/error.hpp"

namespace entail {

enum class WordClass { Quantifier, Noun, Verb };

inline std::string_view class_name(WordClass c) {
  switch (c) {
    case WordClass::Quantifier: return "quantifier";
    case WordClass::Noun: return "noun";
    case WordClass::Verb: return "verb";
  }
  return "?";
}

// The only adverb with a surface form; the other adverb is the empty string.
inline constexpr std::string_view kNot = "not";

struct Vocabulary {
  std::vector<std::string> quantifiers{"all", "some"};
  std::vector<std::string> nouns{"Romans", "Italians", "Germans", "Europeans", "children"};
  std::vector<std::string> verbs{"love", "like", "hate", "fear"};

  const std::vector<std::string>& words(WordClass c) const {
    switch (c) {
      case WordClass::Quantifier: return quantifiers;
      case WordClass::Noun: return nouns;
      case WordClass::Verb: return verbs;
    }
    return nouns;
  }

  std::optional<WordClass> class_of(std::string_view w) const {
    for (WordClass c : {WordClass::Quantifier, WordClass::Noun, WordClass::Verb}) {
      const auto& ws = words(c);
      if (std::find(ws.begin(), ws.end(), w) != ws.end()) return c;
    }
    return std::nullopt;
  }

  bool contains(std::string_view w) const { return class_of(w).has_value(); }

  // Throws ConfigError unless every class is nonempty, duplicate free and
  // disjoint from the others, and no word collides with "not".
  void validate() const {
    std::set<std::string> seen;
    for (WordClass c : {WordClass::Quantifier, WordClass::Noun, WordClass::Verb}) {
      const auto& ws = words(c);
      if (ws.empty())
        throw ConfigError("vocabulary has no " + std::string(class_name(c)) + "s");
      for (const auto& w : ws) {
        if (w.empty() || w == kNot || w.find_first_of(" \t\n") != std::string::npos)
          throw ConfigError("invalid word '" + w + "'");
        if (!seen.insert(w).second) throw ConfigError("word '" + w + "' listed twice");
      }
    }
    if (quantifiers != std::vector<std::string>{"all", "some"} &&
        quantifiers != std::vector<std::string>{"some", "all"})
      throw ConfigError("quantifiers must be exactly {all, some}");
  }

  // All words in a fixed order: quantifiers, nouns, verbs, then "not".
  std::vector<std::string> all_words() const {
    std::vector<std::string> out = quantifiers;
    out.insert(out.end(), nouns.begin(), nouns.end());
    out.insert(out.end(), verbs.begin(), verbs.end());
    out.emplace_back(kNot);
    return out;
  }
};

}  // namespace entail
