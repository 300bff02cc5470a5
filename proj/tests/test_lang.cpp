#include <random>
#include <set>

#include <gtest/gtest.h>

#include "entail/lang/relation.hpp"
#include "entail/lang/sentence.hpp"
#include "entail/lang/taxonomy.hpp"

using namespace entail;

namespace {

const Taxonomy& tax() {
  static const Taxonomy t = Taxonomy::default_taxonomy();
  return t;
}

}  // namespace

TEST(Relation, SymbolsRoundTrip) {
  for (Relation r : kAllRelations) EXPECT_EQ(parse_relation(symbol(r)), r);
  EXPECT_THROW(parse_relation("?"), DataError);
}

TEST(Relation, ConverseIsAnInvolution) {
  EXPECT_EQ(converse(Relation::Forward), Relation::Backward);
  EXPECT_EQ(converse(Relation::Backward), Relation::Forward);
  for (Relation r : {Relation::Equivalence, Relation::Alternation, Relation::Negation, Relation::Cover,
                     Relation::Independence})
    EXPECT_EQ(converse(r), r);
  for (Relation r : kAllRelations) EXPECT_EQ(converse(converse(r)), r);
}

// Bits follow the set definitions: b1 = x∩y nonempty, b2 = x\y, b3 = y\x, b4 = outside both.
TEST(Relation, BitsMatchSetDefinitions) {
  EXPECT_EQ(relation_from_bits(true, false, false, true), Relation::Equivalence);
  EXPECT_EQ(relation_from_bits(true, false, true, true), Relation::Forward);
  EXPECT_EQ(relation_from_bits(true, true, false, true), Relation::Backward);
  EXPECT_EQ(relation_from_bits(false, true, true, false), Relation::Negation);
  EXPECT_EQ(relation_from_bits(false, true, true, true), Relation::Alternation);
  EXPECT_EQ(relation_from_bits(true, true, true, false), Relation::Cover);
  EXPECT_EQ(relation_from_bits(true, true, true, true), Relation::Independence);
}

TEST(Parse, PlainSentence) {
  const Sentence s = parse("all Europeans like some Italians", tax().vocabulary());
  EXPECT_EQ(s.subj_quant, "all");
  EXPECT_EQ(s.subj_noun, "Europeans");
  EXPECT_EQ(s.verb, "like");
  EXPECT_EQ(s.obj_quant, "some");
  EXPECT_EQ(s.obj_noun, "Italians");
  EXPECT_EQ(s.negation_count(), 0);
  EXPECT_EQ(render(s), "all Europeans like some Italians");
}

TEST(Parse, NegationFlags) {
  const Sentence s = parse("not all not Germans not fear all Europeans", tax().vocabulary());
  EXPECT_TRUE(s.subj_det_neg);
  EXPECT_TRUE(s.subj_noun_neg);
  EXPECT_TRUE(s.verb_neg);
  EXPECT_FALSE(s.obj_det_neg);
  EXPECT_FALSE(s.obj_noun_neg);
  EXPECT_EQ(s.length(), 8);
}

TEST(Parse, ErrorsCarryPositions) {
  auto position_of = [](const std::string& text) -> std::size_t {
    try {
      parse(text, tax().vocabulary());
    } catch (const ParseError& e) {
      return e.position();
    }
    return 0;
  };
  EXPECT_EQ(position_of("all all Romans"), 2u);
  EXPECT_EQ(position_of("all Romans like some Martians"), 5u);
  EXPECT_EQ(position_of("all Romans like some"), 5u);
  EXPECT_EQ(position_of("all Romans like some Italians today"), 6u);
  EXPECT_EQ(position_of("all not not Romans like some Italians"), 3u);
}

TEST(Render, VerbNegationInsertsOneToken) {
  Sentence s = parse("all Europeans like some Italians", tax().vocabulary());
  s.verb_neg = true;
  EXPECT_EQ(render(s), "all Europeans not like some Italians");
}

TEST(Render, RoundTripOnRandomSentences) {
  std::mt19937_64 rng(11);
  SlotPolicy five;
  five.object_determiner_negation = true;
  for (int i = 0; i < 1000; ++i) {
    const Sentence s = generate_sentence(rng, tax().vocabulary(), i % 2 ? five : SlotPolicy{});
    EXPECT_EQ(parse(render(s), tax().vocabulary()), s) << render(s);
    EXPECT_GE(s.length(), 5);
    EXPECT_LE(s.length(), 10);
  }
}

TEST(Generate, DefaultPolicyNeverNegatesObjectDeterminer) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) EXPECT_FALSE(generate_sentence(rng, tax().vocabulary()).obj_det_neg);
}

TEST(Generate, DeterministicGivenSeed) {
  std::mt19937_64 a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(generate_sentence(a, tax().vocabulary()), generate_sentence(b, tax().vocabulary()));
}

TEST(Generate, EmptyWordClassIsAConfigError) {
  Vocabulary v = tax().vocabulary();
  v.verbs.clear();
  std::mt19937_64 rng(1);
  EXPECT_THROW(generate_sentence(rng, v), ConfigError);
}

TEST(Enumerate, DefaultLanguageHas6400Sentences) {
  const auto all = enumerate_sentences(tax().vocabulary());
  std::set<std::string> surfaces;
  for (const auto& s : all) surfaces.insert(render(s));
  EXPECT_EQ(all.size(), 6400u);
  EXPECT_EQ(surfaces.size(), 6400u);
}

TEST(Enumerate, FiveSlotsDoubleTheLanguage) {
  SlotPolicy five;
  five.object_determiner_negation = true;
  EXPECT_EQ(enumerate_sentences(tax().vocabulary(), five).size(), 12800u);
}

TEST(Taxonomy, LookupExamples) {
  EXPECT_EQ(tax().relation("Romans", "Italians"), Relation::Forward);
  EXPECT_EQ(tax().relation("Italians", "Romans"), Relation::Backward);
  EXPECT_EQ(tax().relation("children", "Germans"), Relation::Independence);
  EXPECT_EQ(tax().relation("love", "love"), Relation::Equivalence);
  EXPECT_EQ(tax().relation("love", "like"), Relation::Forward);
  EXPECT_EQ(tax().relation("like", "hate"), Relation::Alternation);
  EXPECT_THROW(tax().relation("Romans", "love"), ConfigError);
}

TEST(Taxonomy, ConverseClosure) {
  const Vocabulary& v = tax().vocabulary();
  for (const auto* words : {&v.nouns, &v.verbs})
    for (const auto& a : *words)
      for (const auto& b : *words) EXPECT_EQ(tax().relation(a, b), converse(tax().relation(b, a))) << a << " " << b;
}

// The shipped set witness reproduces every declared relation.
TEST(Taxonomy, DefaultIsCoherent) {
  EXPECT_TRUE(tax().coherence_errors().empty());
  const Vocabulary& v = tax().vocabulary();
  const SetWitness& w = tax().witness();
  for (const auto& [words, universe] : {std::pair{&v.nouns, &w.noun_universe}, std::pair{&v.verbs, &w.verb_universe}})
    for (const auto& a : *words)
      for (const auto& b : *words)
        EXPECT_EQ(set_relation(w.sets.at(a), w.sets.at(b), *universe), tax().relation(a, b)) << a << " " << b;
}

TEST(Taxonomy, IncoherentWitnessIsReported) {
  nlohmann::json j = tax().to_json();
  j["set_witness"]["Romans"] = {7, 8};  // no longer inside Italians
  const Taxonomy broken = Taxonomy::from_json(j);
  EXPECT_FALSE(broken.coherence_errors().empty());
}

TEST(Taxonomy, JsonRoundTrip) {
  const Taxonomy again = Taxonomy::from_json(tax().to_json());
  EXPECT_EQ(again.to_json(), tax().to_json());
}
