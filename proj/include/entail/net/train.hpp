#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "entail/data/dataset.hpp"
#include "entail/error.hpp"
#include "entail/net/adadelta.hpp"
#include "entail/net/checkpoint.hpp"
#include "entail/net/model.hpp"
#include "entail/net/network.hpp"

namespace entail::net {

struct TrainConfig {
  int epochs = 50;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  double rho = 0.95;
  double epsilon = 1e-6;
  bool evaluate_test_each_epoch = true;
};

struct EpochMetrics {
  int epoch = 0;
  double loss = 0.0;       // mean training loss over the epoch's batches
  double train_acc = 0.0;  // accuracy on the batches as they were trained
  double test_acc = 0.0;   // after the epoch; NaN without a test set
  double seconds = 0.0;
};

inline std::string metrics_header() { return "epoch\tloss\ttrain_acc\ttest_acc\n"; }

// Timing is left out so identical runs give identical logs.
inline std::string format_metrics(const EpochMetrics& m) {
  std::ostringstream out;
  out << m.epoch << '\t' << std::setprecision(10) << m.loss << '\t' << m.train_acc << '\t' << m.test_acc << '\n';
  return out.str();
}

// Rows are targets, columns predictions, both in relation index order.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kRelationCount>, kRelationCount> counts{};

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& r : counts)
      for (auto c : r) n += c;
    return n;
  }
  std::size_t correct() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < kRelationCount; ++i) n += counts[i][i];
    return n;
  }
  double accuracy() const { return total() ? static_cast<double>(correct()) / static_cast<double>(total()) : 0.0; }

  std::string format_row_normalized() const {
    std::ostringstream out;
    out << "target\\predicted";
    for (Relation r : kAllRelations) out << '\t' << symbol(r);
    out << '\n' << std::fixed << std::setprecision(4);
    for (std::size_t i = 0; i < kRelationCount; ++i) {
      std::size_t row = 0;
      for (auto c : counts[i]) row += c;
      out << symbol(relation_at(static_cast<int>(i)));
      for (std::size_t j = 0; j < kRelationCount; ++j)
        out << '\t' << (row ? static_cast<double>(counts[i][j]) / static_cast<double>(row) : 0.0);
      out << '\n';
    }
    return out.str();
  }

  // Raw counts with the diagonal zeroed: only the misclassifications.
  std::string format_errors() const {
    std::ostringstream out;
    out << "target\\predicted";
    for (Relation r : kAllRelations) out << '\t' << symbol(r);
    out << '\n';
    for (std::size_t i = 0; i < kRelationCount; ++i) {
      out << symbol(relation_at(static_cast<int>(i)));
      for (std::size_t j = 0; j < kRelationCount; ++j) out << '\t' << (i == j ? 0 : counts[i][j]);
      out << '\n';
    }
    return out.str();
  }
};

struct EvalResult {
  double accuracy = 0.0;
  double loss = 0.0;
  ConfusionMatrix confusion;
  std::vector<int> predictions;
};

inline EvalResult evaluate(const Model& m, const data::Dataset& ds, std::size_t batch_size = 256) {
  EvalResult r;
  if (ds.empty()) return r;
  Network net;
  for (std::size_t start = 0; start < ds.size(); start += batch_size) {
    std::vector<std::size_t> rows;
    for (std::size_t i = start; i < std::min(ds.size(), start + batch_size); ++i) rows.push_back(i);
    const Batch b = make_batch(m, ds, rows);
    const BatchOutput out = net.run(m, b);
    r.loss += out.loss * static_cast<double>(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ++r.confusion.counts[b.labels[i]][out.predictions[i]];
      r.predictions.push_back(out.predictions[i]);
    }
  }
  r.loss /= static_cast<double>(ds.size());
  r.accuracy = r.confusion.accuracy();
  return r;
}

// Sorted set of tokens used by the datasets: the model's vocabulary.
inline std::vector<std::string> dataset_words(const std::vector<const data::Dataset*>& sets) {
  std::set<std::string> words;
  for (const auto* ds : sets)
    for (const auto& p : *ds) {
      for (const auto& w : render_tokens(p.left)) words.insert(w);
      for (const auto& w : render_tokens(p.right)) words.insert(w);
    }
  return {words.begin(), words.end()};
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed of the shuffling stream for a given epoch of a run.
inline std::uint64_t epoch_seed(std::uint64_t run_seed, int epoch) {
  return splitmix64(splitmix64(run_seed) ^ static_cast<std::uint64_t>(epoch));
}

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochMetrics> history;
  EvalResult train, test;  // final full evaluations
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

// Minibatch training with AdaDelta on a model that has already been
// initialized. The data order is reshuffled every epoch from a stream seeded by
// the run seed and the epoch number.
inline TrainResult train(Model model, const data::Dataset& train_set, const data::Dataset* test_set,
                         const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  if (train_set.empty()) throw DataError("empty training set");
  if (cfg.batch_size == 0) throw ConfigError("batch size must be positive");
  TrainResult result;
  AdaDelta opt;
  opt.rho = cfg.rho;
  opt.epsilon = cfg.epsilon;
  opt.reset(model);
  Network net;
  Gradients grads(model);
  std::vector<std::size_t> order(train_set.size());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Random shuffle(epoch_seed(cfg.seed, epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.index(i)]);
    EpochMetrics m;
    m.epoch = epoch;
    std::size_t correct = 0;
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(b),
                                          order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), b + cfg.batch_size)));
      const Batch batch = make_batch(model, train_set, rows);
      grads.zero();
      const BatchOutput out = net.run(model, batch, &grads);
      opt.step(model, grads);
      m.loss += out.loss * static_cast<double>(rows.size());
      correct += out.correct;
    }
    m.loss /= static_cast<double>(train_set.size());
    m.train_acc = static_cast<double>(correct) / static_cast<double>(train_set.size());
    m.test_acc = std::numeric_limits<double>::quiet_NaN();
    if (test_set && !test_set->empty() && (cfg.evaluate_test_each_epoch || epoch == cfg.epochs))
      m.test_acc = evaluate(model, *test_set).accuracy;
    m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.history.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  result.train = evaluate(model, train_set);
  if (test_set) result.test = evaluate(model, *test_set);
  result.checkpoint.model = std::move(model);
  result.checkpoint.optimizer = std::move(opt);
  result.checkpoint.epoch = cfg.epochs;
  std::ostringstream state;
  state << Random(epoch_seed(cfg.seed, cfg.epochs + 1)).engine();
  result.checkpoint.rng_state = state.str();
  return result;
}

}  // namespace entail::net
