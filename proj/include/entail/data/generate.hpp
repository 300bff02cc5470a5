#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "entail/data/dataset.hpp"
#include "entail/error.hpp"
#include "entail/fol/axioms.hpp"
#include "entail/fol/translate.hpp"
#include "entail/lang/sentence.hpp"
#include "entail/lang/taxonomy.hpp"
#include "entail/prover/classify.hpp"

namespace entail::data {

struct SplitSpec {
  std::size_t train_size = 30'000;
  std::size_t test_size = 5'000;
  // Allowed sentence lengths; both sentences of a pair must qualify.
  std::optional<std::set<int>> train_lengths;
  std::optional<std::set<int>> test_lengths;
  std::uint64_t seed = 1;
  // Most of a split that may be labeled "#". Uniformly drawn pairs are
  // overwhelmingly independent; 1.0 keeps the raw distribution.
  double independence_cap = 0.5;
  SlotPolicy policy;
  unsigned workers = 0;  // 0: one per hardware thread
};

struct UndecidedPair {
  Sentence left, right;
  std::string left_formula, right_formula;
  std::string reason;
};

struct GenerationReport {
  std::size_t candidates = 0;  // pairs drawn
  std::size_t duplicates = 0;  // already in train or test
  std::size_t capped = 0;      // "#" pairs turned away by the independence cap
  std::vector<UndecidedPair> undecided;
  double seconds = 0.0;

  double undecided_rate() const {
    const std::size_t labeled = candidates - duplicates;
    return labeled ? static_cast<double>(undecided.size()) / static_cast<double>(labeled) : 0.0;
  }
};

struct Splits {
  Dataset train, test;
  GenerationReport report;
};

// Labels one pair with the prover. Empty when a satisfiability check was
// undecided; `reason` then says which resource ran out.
inline std::optional<Relation> label_pair(const Sentence& left, const Sentence& right, const fol::AxiomSet& axioms,
                                          const prover::ProverLimits& limits, std::string* reason = nullptr) {
  auto d = prover::classify_with_taxonomy(fol::translate(left), fol::translate(right), axioms, limits);
  if (!d.relation && reason)
    for (const auto& v : d.verdicts)
      if (v && v->undecided()) *reason = v->exhausted;
  return d.relation;
}

namespace detail {

inline bool length_ok(const Sentence& s, const std::optional<std::set<int>>& lengths) {
  return !lengths || lengths->count(s.length());
}

// Number of distinct sentences the policy admits per length.
inline std::map<int, std::size_t> sentences_per_length(const Vocabulary& vocab, const SlotPolicy& policy) {
  std::map<int, std::size_t> out;
  for (const auto& s : enumerate_sentences(vocab, policy)) ++out[s.length()];
  return out;
}

inline std::size_t admitted(const std::map<int, std::size_t>& per_length, const std::optional<std::set<int>>& lengths) {
  std::size_t n = 0;
  for (const auto& [len, count] : per_length)
    if (!lengths || lengths->count(len)) n += count;
  return n;
}

inline Sentence draw_sentence(std::mt19937_64& rng, const Vocabulary& vocab, const SplitSpec& spec,
                              const std::optional<std::set<int>>& lengths) {
  while (true) {
    Sentence s = generate_sentence(rng, vocab, spec.policy);
    if (length_ok(s, lengths)) return s;
  }
}

// Runs f(i) for i in [0, n) on `workers` threads.
inline void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& f) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < n; i = next++) f(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

inline void check_feasible(const SplitSpec& spec, const Vocabulary& vocab) {
  if (spec.independence_cap < 0.0 || spec.independence_cap > 1.0)
    throw ConfigError("independence cap must lie in [0, 1]");
  const auto per_length = detail::sentences_per_length(vocab, spec.policy);
  const double tr = static_cast<double>(detail::admitted(per_length, spec.train_lengths));
  const double te = static_cast<double>(detail::admitted(per_length, spec.test_lengths));
  std::optional<std::set<int>> both;
  if (spec.train_lengths && spec.test_lengths) {
    both.emplace();
    std::set_intersection(spec.train_lengths->begin(), spec.train_lengths->end(), spec.test_lengths->begin(),
                          spec.test_lengths->end(), std::inserter(*both, both->end()));
  } else {
    both = spec.train_lengths ? spec.train_lengths : spec.test_lengths;
  }
  const double shared = static_cast<double>(detail::admitted(per_length, both));
  auto fail = [](const std::string& what) { throw DataError("infeasible split: " + what); };
  if (static_cast<double>(spec.train_size) > tr * tr)
    fail("train size " + std::to_string(spec.train_size) + " exceeds " + std::to_string(tr * tr) + " distinct pairs");
  if (static_cast<double>(spec.test_size) > te * te)
    fail("test size " + std::to_string(spec.test_size) + " exceeds " + std::to_string(te * te) + " distinct pairs");
  if (static_cast<double>(spec.train_size + spec.test_size) > tr * tr + te * te - shared * shared)
    fail("train and test together exceed the distinct pairs available");
}

// Rejection-samples labeled pairs until both splits are full. Candidates are
// drawn in fixed-size batches from one seeded stream and labeled in parallel;
// acceptance runs in draw order, so the output does not depend on the number
// of workers.
inline Splits generate_dataset(const SplitSpec& spec, const Taxonomy& taxonomy,
                               const prover::ProverLimits& limits = {},
                               const std::function<void(const std::string&)>& log = {}) {
  const Vocabulary& vocab = taxonomy.vocabulary();
  check_feasible(spec, vocab);
  const auto start = std::chrono::steady_clock::now();
  const fol::AxiomSet axioms = fol::compile_axioms(taxonomy);
  const unsigned workers = spec.workers ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
  constexpr std::size_t kBatch = 512;

  std::mt19937_64 rng(spec.seed);
  std::unordered_set<std::string> seen;
  Splits out;
  GenerationReport& report = out.report;

  auto fill = [&](Dataset& split, std::size_t size, const std::optional<std::set<int>>& lengths, const char* name) {
    const auto cap = static_cast<std::size_t>(std::floor(spec.independence_cap * static_cast<double>(size)));
    const std::size_t budget = std::max<std::size_t>(1'000'000, 2'000 * size);
    std::size_t independent = 0, drawn = 0, batches = 0;
    split.reserve(size);
    while (split.size() < size) {
      if (drawn > budget)
        throw DataError(std::string("could not fill the ") + name + " split after " + std::to_string(drawn) +
                        " candidates (" + std::to_string(split.size()) + " of " + std::to_string(size) + ")");
      std::vector<LabeledPair> batch;
      std::vector<std::string> keys;
      std::unordered_set<std::string> in_batch;
      while (batch.size() < kBatch && drawn <= budget) {
        LabeledPair p;
        p.left = detail::draw_sentence(rng, vocab, spec, lengths);
        p.right = detail::draw_sentence(rng, vocab, spec, lengths);
        ++drawn;
        ++report.candidates;
        std::string key = render(p.left) + '\t' + render(p.right);
        if (seen.count(key) || !in_batch.insert(key).second) {
          ++report.duplicates;
          continue;
        }
        batch.push_back(std::move(p));
        keys.push_back(std::move(key));
      }
      std::vector<std::optional<Relation>> labels(batch.size());
      std::vector<std::string> reasons(batch.size());
      detail::parallel_for(batch.size(), workers, [&](std::size_t i) {
        labels[i] = label_pair(batch[i].left, batch[i].right, axioms, limits, &reasons[i]);
      });
      for (std::size_t i = 0; i < batch.size() && split.size() < size; ++i) {
        if (!labels[i]) {
          report.undecided.push_back({batch[i].left, batch[i].right, fol::to_string(fol::translate(batch[i].left)),
                                      fol::to_string(fol::translate(batch[i].right)), reasons[i]});
          continue;
        }
        if (*labels[i] == Relation::Independence) {
          if (independent >= cap) {
            ++report.capped;
            continue;
          }
          ++independent;
        }
        batch[i].relation = *labels[i];
        seen.insert(keys[i]);
        split.push_back(std::move(batch[i]));
      }
      if (log && (++batches % 32 == 0 || split.size() == size))
        log(std::string(name) + ": " + std::to_string(split.size()) + "/" + std::to_string(size) + " after " +
            std::to_string(drawn) + " candidates");
    }
  };

  fill(out.train, spec.train_size, spec.train_lengths, "train");
  fill(out.test, spec.test_size, spec.test_lengths, "test");
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace entail::data
