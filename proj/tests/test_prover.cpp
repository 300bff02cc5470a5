#include <random>

#include <gtest/gtest.h>

#include "entail/fol/axioms.hpp"
#include "entail/fol/translate.hpp"
#include "entail/lang/taxonomy.hpp"
#include "entail/prover/brute_force.hpp"
#include "entail/prover/check_sat.hpp"
#include "entail/prover/classify.hpp"

using namespace entail;
using fol::Clause;
using fol::Formula;
using fol::Literal;
using fol::Term;

namespace {

const Taxonomy& tax() {
  static const Taxonomy t = Taxonomy::default_taxonomy();
  return t;
}

const fol::AxiomSet& all_axioms() {
  static const fol::AxiomSet a = fol::compile_axioms(tax());
  return a;
}

Formula tr(const std::string& text) { return fol::translate(parse(text, tax().vocabulary())); }

std::optional<Relation> label(const Formula& a, const Formula& b) {
  return prover::classify_with_taxonomy(a, b, all_axioms()).relation;
}

std::optional<Relation> label(const std::string& a, const std::string& b) { return label(tr(a), tr(b)); }

}  // namespace

TEST(CheckSat, ComplementaryUnitsAreUnsat) {
  const std::vector<Clause> cs = {Clause{{Literal{true, "A", {Term::fn(0)}}}},
                                  Clause{{Literal{false, "A", {Term::var(0)}}}}};
  const auto v = prover::check_sat(cs);
  ASSERT_TRUE(v.unsat());
  ASSERT_TRUE(v.refutation.has_value());
  EXPECT_TRUE(prover::check_refutation(*v.refutation, cs));
}

TEST(CheckSat, VacuousImplicationHasASingletonModel) {
  const std::vector<Clause> cs = {Clause{{Literal{false, "A", {Term::var(0)}}, Literal{true, "B", {Term::var(0)}}}}};
  const auto v = prover::check_sat(cs);
  ASSERT_TRUE(v.sat());
  EXPECT_EQ(v.model->domain_size, 1);
  EXPECT_TRUE(v.model->satisfies(cs));
}

TEST(CheckSat, EntailmentDirectionIsUnsat) {
  const Formula phi = tr("all Europeans like some Italians");
  const Formula psi = tr("not some Italians not like some Europeans");
  fol::ClausifyContext ctx;
  std::vector<Clause> cs;
  for (const auto& a : fol::filter_axioms(all_axioms(), phi, psi)) {
    auto c = fol::clausify(a.formula, ctx);
    cs.insert(cs.end(), c.begin(), c.end());
  }
  for (const auto& f : {phi, Formula::negation(psi)}) {
    auto c = fol::clausify(f, ctx);
    cs.insert(cs.end(), c.begin(), c.end());
  }
  const auto v = prover::check_sat(cs);
  ASSERT_TRUE(v.unsat());
  EXPECT_TRUE(prover::check_refutation(*v.refutation, cs));
}

TEST(CheckSat, TinyLimitsLeaveHardProblemsUndecided) {
  const Formula phi = tr("all Europeans like some Italians");
  const Formula psi = tr("not some Italians not like some Europeans");
  prover::ProverLimits tiny;
  tiny.max_domain = 0;
  tiny.early_domain = 0;
  tiny.max_resolution_steps = 1;
  tiny.early_resolution_steps = 0;
  const auto d = prover::classify_with_taxonomy(phi, psi, all_axioms(), tiny);
  EXPECT_FALSE(d.relation.has_value());
}

TEST(Classify, LabeledExamples) {
  EXPECT_EQ(label("all Europeans like some Italians", "not some Italians not like some Europeans"), Relation::Forward);
  EXPECT_EQ(label("all Germans not hate all not Italians", "not all not Italians love some not Italians"),
            Relation::Cover);
  EXPECT_EQ(label("all children not hate all Romans", "all not Italians not fear all Romans"),
            Relation::Independence);
  EXPECT_EQ(label("some not Europeans like all not Italians", "not some not Italians like all not Italians"),
            Relation::Alternation);
  EXPECT_EQ(label("not all not Germans not fear all Europeans", "not some not Germans fear all Europeans"),
            Relation::Negation);
}

TEST(Classify, IdenticalSentencesAreEquivalent) {
  const Formula f = tr("some Romans not love all not Germans");
  const auto d = prover::classify_with_taxonomy(f, f, all_axioms());
  EXPECT_EQ(d.relation, Relation::Equivalence);
  EXPECT_EQ(d.bits[1], prover::SatVerdict::Status::Unsat);
  EXPECT_EQ(d.bits[2], prover::SatVerdict::Status::Unsat);
}

TEST(Classify, SentenceAndItsNegation) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    Sentence s = generate_sentence(rng, tax().vocabulary());
    Sentence n = s;
    n.subj_det_neg = !s.subj_det_neg;
    EXPECT_EQ(label(fol::translate(s), fol::translate(n)), Relation::Negation) << render(s);
  }
}

TEST(Classify, ConverseOrderGivesConverseLabel) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) {
    const Formula a = fol::translate(generate_sentence(rng, tax().vocabulary()));
    const Formula b = fol::translate(generate_sentence(rng, tax().vocabulary()));
    const auto ab = label(a, b), ba = label(b, a);
    ASSERT_TRUE(ab && ba);
    EXPECT_EQ(*ba, converse(*ab));
  }
}

// Negating ψ swaps b1↔b2 and b3↔b4.
TEST(Classify, NegatingOneSideSwapsBits) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 200; ++i) {
    const Sentence s = generate_sentence(rng, tax().vocabulary());
    Sentence t = generate_sentence(rng, tax().vocabulary());
    const Formula phi = fol::translate(s), psi = fol::translate(t);
    t.subj_det_neg = !t.subj_det_neg;
    const Formula not_psi = fol::translate(t);
    const auto d = prover::classify_with_taxonomy(phi, psi, all_axioms());
    const auto e = prover::classify_with_taxonomy(phi, not_psi, all_axioms());
    EXPECT_EQ(d.bits[0], e.bits[1]);
    EXPECT_EQ(d.bits[1], e.bits[0]);
    EXPECT_EQ(d.bits[2], e.bits[3]);
    EXPECT_EQ(d.bits[3], e.bits[2]);
    if (d.relation == Relation::Equivalence) EXPECT_EQ(e.relation, Relation::Negation);
    if (d.relation == Relation::Forward) EXPECT_EQ(e.relation, Relation::Alternation);
  }
}

// Every SAT verdict carries a model that satisfies the problem (checked when
// the verdict is built) and every UNSAT verdict a derivation that replays.
TEST(Classify, VerdictsCarryWitnesses) {
  std::mt19937_64 rng(12);
  int unsat = 0;
  for (int i = 0; i < 100; ++i) {
    const Sentence s = generate_sentence(rng, tax().vocabulary());
    Sentence t = generate_sentence(rng, tax().vocabulary());
    if (i % 2 == 0) {
      // negation of the left side: two refutations per pair
      t = s;
      t.subj_det_neg = !s.subj_det_neg;
    }
    const auto d = prover::classify_with_taxonomy(fol::translate(s), fol::translate(t), all_axioms());
    for (const auto& v : d.verdicts) {
      ASSERT_TRUE(v.has_value());
      if (v->sat()) EXPECT_TRUE(v->model.has_value());
      if (v->unsat()) {
        ++unsat;
        EXPECT_TRUE(v->refutation.has_value());
      }
    }
  }
  EXPECT_GE(unsat, 100);
}

// Oracle: exhaustive enumeration of interpretations over domains 1..3, used on
// random pairs small enough to enumerate.
TEST(Classify, AgreesWithEnumerationOnRandomPairs) {
  std::mt19937_64 rng(13);
  int checked = 0;
  while (checked < 500) {
    const Formula a = fol::translate(generate_sentence(rng, tax().vocabulary()));
    const Formula b = fol::translate(generate_sentence(rng, tax().vocabulary()));
    std::map<std::string, int> preds;
    fol::collect_predicates(a, preds);
    fol::collect_predicates(b, preds);
    int bits = 0;
    for (const auto& [p, arity] : preds) bits += arity == 1 ? 3 : 9;
    if (bits > 21) continue;
    const auto filtered = fol::filter_axioms(all_axioms(), a, b);
    const auto got = prover::classify_pair(a, b, filtered).relation;
    ASSERT_TRUE(got.has_value());
    EXPECT_EQ(*got, prover::brute_force_label(a, b, filtered, 3)) << fol::to_string(a) << " / " << fol::to_string(b);
    ++checked;
  }
}

// The unfiltered problems carry every predicate, which makes some of them
// slow to decide; 200 pairs keep this quick.
TEST(Classify, FilteringDoesNotChangeLabels) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 200; ++i) {
    const Formula a = fol::translate(generate_sentence(rng, tax().vocabulary()));
    const Formula b = fol::translate(generate_sentence(rng, tax().vocabulary()));
    const auto filtered = prover::classify_pair(a, b, fol::filter_axioms(all_axioms(), a, b)).relation;
    const auto full = prover::classify_pair(a, b, all_axioms()).relation;
    ASSERT_TRUE(filtered && full);
    EXPECT_EQ(*filtered, *full) << fol::to_string(a) << " / " << fol::to_string(b);
  }
}

// Non-exhaustiveness of Italians | Germans implies a non-Italian exists. The
// filter drops that axiom when Germans is absent from the pair, so the pair
// below is # after filtering but | under the full taxonomy.
TEST(Classify, FilteringForgetsConsequencesOfDroppedAxioms) {
  const Formula a = tr("all not Italians hate all Italians");
  const Formula b = tr("all not Italians not hate all Italians");
  const auto filtered = fol::filter_axioms(all_axioms(), a, b);
  EXPECT_TRUE(filtered.empty());
  EXPECT_EQ(label(a, b), Relation::Independence);
  fol::AxiomSet with_germans;
  for (const auto& ax : all_axioms()) {
    std::map<std::string, int> preds;
    fol::collect_predicates(ax.formula, preds);
    if (preds.size() == 2 && preds.count("Italians") && preds.count("Germans")) with_germans.add(ax);
  }
  ASSERT_EQ(with_germans.size(), 2u);
  EXPECT_EQ(prover::classify_pair(a, b, with_germans).relation, Relation::Alternation);
  EXPECT_EQ(prover::brute_force_label(a, b, with_germans, 3), Relation::Alternation);
}

TEST(Classify, RandomPairsAreDecided) {
  std::mt19937_64 rng(15);
  int undecided = 0;
  for (int i = 0; i < 20000; ++i) {
    const Formula a = fol::translate(generate_sentence(rng, tax().vocabulary()));
    const Formula b = fol::translate(generate_sentence(rng, tax().vocabulary()));
    undecided += !label(a, b).has_value();
  }
  EXPECT_EQ(undecided, 0);
}

TEST(Classify, CacheGivesSameLabels) {
  std::mt19937_64 rng(16);
  prover::SatCache cache;
  for (int i = 0; i < 300; ++i) {
    const Formula a = fol::translate(generate_sentence(rng, tax().vocabulary()));
    const Formula b = fol::translate(generate_sentence(rng, tax().vocabulary()));
    EXPECT_EQ(prover::classify_with_taxonomy(a, b, all_axioms(), {}, &cache).relation, label(a, b));
  }
  EXPECT_GT(cache.size(), 0u);
}

TEST(BruteForce, IdentityAndNegation) {
  const Formula f = tr("all not Romans hate some Germans");
  const auto axioms = fol::filter_axioms(all_axioms(), f, f);
  EXPECT_EQ(prover::brute_force_label(f, f, axioms, 3), Relation::Equivalence);
  EXPECT_EQ(prover::brute_force_label(f, Formula::negation(f), axioms, 3), Relation::Negation);
}

TEST(BruteForce, RefusesHugeSpaces) {
  std::map<std::string, int> preds = {{"a", 2}, {"b", 2}, {"c", 2}, {"d", 2}};
  EXPECT_THROW(prover::BruteForceOracle(preds, 3), ConfigError);
}
