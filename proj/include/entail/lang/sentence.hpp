#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "entail/error.hpp"
#include "entail/lang/vocabulary.hpp"

namespace entail {

// A sentence of the artificial language:
//   [not] Quant [not] Noun [not] Verb [not] Quant [not] Noun
// Each bracketed "not" is one negation slot.
struct Sentence {
  bool subj_det_neg = false;
  std::string subj_quant;
  bool subj_noun_neg = false;
  std::string subj_noun;
  bool verb_neg = false;
  std::string verb;
  bool obj_det_neg = false;
  std::string obj_quant;
  bool obj_noun_neg = false;
  std::string obj_noun;

  int negation_count() const {
    return int(subj_det_neg) + int(subj_noun_neg) + int(verb_neg) + int(obj_det_neg) +
           int(obj_noun_neg);
  }
  int length() const { return 5 + negation_count(); }

  bool contains_word(std::string_view w) const {
    return subj_quant == w || subj_noun == w || verb == w || obj_quant == w || obj_noun == w;
  }

  auto operator<=>(const Sentence&) const = default;
};

// Which negation slots the generator may fill. The object determiner slot is
// off by default.
struct SlotPolicy {
  bool object_determiner_negation = false;
};

// Uniform integer in [0, n) from a 64-bit engine, independent of the standard
// library's distribution implementation so seeds reproduce across toolchains.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t range = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return static_cast<std::size_t>(draw % range);
}

inline bool coin(std::mt19937_64& rng) { return (rng() >> 63) != 0; }

inline Sentence generate_sentence(std::mt19937_64& rng, const Vocabulary& vocab,
                                  const SlotPolicy& policy = {}) {
  for (WordClass c : {WordClass::Quantifier, WordClass::Noun, WordClass::Verb})
    if (vocab.words(c).empty())
      throw ConfigError("cannot generate: no " + std::string(class_name(c)) + "s");
  auto pick = [&](const std::vector<std::string>& ws) { return ws[uniform_index(rng, ws.size())]; };
  Sentence s;
  s.subj_det_neg = coin(rng);
  s.subj_quant = pick(vocab.quantifiers);
  s.subj_noun_neg = coin(rng);
  s.subj_noun = pick(vocab.nouns);
  s.verb_neg = coin(rng);
  s.verb = pick(vocab.verbs);
  s.obj_det_neg = policy.object_determiner_negation ? coin(rng) : false;
  s.obj_quant = pick(vocab.quantifiers);
  s.obj_noun_neg = coin(rng);
  s.obj_noun = pick(vocab.nouns);
  return s;
}

// Every sentence the policy admits, in a fixed order.
inline std::vector<Sentence> enumerate_sentences(const Vocabulary& vocab,
                                                 const SlotPolicy& policy = {}) {
  std::vector<Sentence> out;
  const int obj_det_options = policy.object_determiner_negation ? 2 : 1;
  for (const auto& q1 : vocab.quantifiers)
    for (const auto& n1 : vocab.nouns)
      for (const auto& v : vocab.verbs)
        for (const auto& q2 : vocab.quantifiers)
          for (const auto& n2 : vocab.nouns)
            for (int neg = 0; neg < 16; ++neg)
              for (int od = 0; od < obj_det_options; ++od) {
                Sentence s;
                s.subj_det_neg = neg & 1;
                s.subj_quant = q1;
                s.subj_noun_neg = neg & 2;
                s.subj_noun = n1;
                s.verb_neg = neg & 4;
                s.verb = v;
                s.obj_det_neg = od != 0;
                s.obj_quant = q2;
                s.obj_noun_neg = neg & 8;
                s.obj_noun = n2;
                out.push_back(std::move(s));
              }
  return out;
}

inline std::vector<std::string> render_tokens(const Sentence& s) {
  std::vector<std::string> out;
  auto slot = [&](bool neg, const std::string& w) {
    if (neg) out.emplace_back(kNot);
    out.push_back(w);
  };
  slot(s.subj_det_neg, s.subj_quant);
  slot(s.subj_noun_neg, s.subj_noun);
  slot(s.verb_neg, s.verb);
  slot(s.obj_det_neg, s.obj_quant);
  slot(s.obj_noun_neg, s.obj_noun);
  return out;
}

inline std::string render(const Sentence& s) {
  std::string out;
  for (const auto& t : render_tokens(s)) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

namespace detail {

// Fixed-shape parser. With a vocabulary, each word must belong to the class its
// slot requires; without one, any token other than "not" fills a word slot.
inline Sentence parse_tokens(const std::vector<std::string>& tokens, const Vocabulary* vocab) {
  std::size_t pos = 0;  // 0-based cursor; errors report 1-based positions
  auto slot = [&](WordClass c, bool& neg, std::string& word) {
    neg = false;
    if (pos < tokens.size() && tokens[pos] == kNot) {
      neg = true;
      ++pos;
    }
    if (pos >= tokens.size())
      throw ParseError(pos + 1, "expected " + std::string(class_name(c)) + ", got end of sentence");
    const std::string& t = tokens[pos];
    if (t == kNot)
      throw ParseError(pos + 1, "expected " + std::string(class_name(c)) + ", got 'not'");
    if (vocab) {
      auto actual = vocab->class_of(t);
      if (!actual) throw ParseError(pos + 1, "unknown token '" + t + "'");
      if (*actual != c)
        throw ParseError(pos + 1, "expected " + std::string(class_name(c)) + ", got " +
                                      std::string(class_name(*actual)) + " '" + t + "'");
    }
    word = t;
    ++pos;
  };
  Sentence s;
  slot(WordClass::Quantifier, s.subj_det_neg, s.subj_quant);
  slot(WordClass::Noun, s.subj_noun_neg, s.subj_noun);
  slot(WordClass::Verb, s.verb_neg, s.verb);
  slot(WordClass::Quantifier, s.obj_det_neg, s.obj_quant);
  slot(WordClass::Noun, s.obj_noun_neg, s.obj_noun);
  if (pos != tokens.size()) throw ParseError(pos + 1, "trailing token '" + tokens[pos] + "'");
  return s;
}

}  // namespace detail

inline Sentence parse(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
  return detail::parse_tokens(tokens, &vocab);
}

inline Sentence parse(std::string_view text, const Vocabulary& vocab) {
  return parse(tokenize(text), vocab);
}

// Parses by shape only; words outside the vocabulary (substituted words) are
// accepted.
inline Sentence parse_shape(std::string_view text) {
  return detail::parse_tokens(tokenize(text), nullptr);
}

}  // namespace entail
