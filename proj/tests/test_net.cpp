#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <unistd.h>

#include "entail/lang/taxonomy.hpp"
#include "entail/net/adadelta.hpp"
#include "entail/net/checkpoint.hpp"
#include "entail/net/gradcheck.hpp"
#include "entail/net/network.hpp"
#include "entail/net/pretrained.hpp"
#include "entail/net/train.hpp"

using namespace entail;
using namespace entail::net;

namespace {

constexpr CellKind kCells[] = {CellKind::SRN, CellKind::GRU, CellKind::LSTM, CellKind::Sum};

ModelConfig small_config(CellKind cell) {
  ModelConfig c;
  c.cell = cell;
  c.hidden = 8;
  c.embedding_dim = 5;
  c.sentence_dim = 4;
  c.comparison_dim = 6;
  return c;
}

const std::vector<std::string>& words6() {
  static const std::vector<std::string> w = {"a", "b", "c", "d", "e", "f"};
  return w;
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

data::Dataset random_pairs(std::size_t n, std::uint64_t seed) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  std::mt19937_64 rng(seed);
  data::Dataset ds;
  for (std::size_t i = 0; i < n; ++i)
    ds.push_back({relation_at(static_cast<int>(rng() % kRelationCount)), generate_sentence(rng, tax.vocabulary()),
                  generate_sentence(rng, tax.vocabulary())});
  return ds;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("entail_net_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Gradients, MatchFiniteDifferencesForEveryCell) {
  for (CellKind cell : kCells)
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const auto c = random_gradient_case(cell, seed);
      const auto check = check_gradients(c.model, c.batch);
      for (int s = 0; s < kSlotCount; ++s)
        EXPECT_LE(check.relative_error[s], 1e-4) << cell_name(cell) << " seed " << seed << " " << kSlotNames[s];
    }
}

TEST(Gradients, FrozenEmbeddingsReceiveNone) {
  auto c = random_gradient_case(CellKind::GRU, 3);
  c.model.tensors()[kEmbedding].frozen = true;
  Network net;
  Gradients g(c.model);
  net.run(c.model, c.batch, &g);
  EXPECT_EQ(g[kEmbedding].norm(), 0.0);
  EXPECT_GT(g[kW].norm(), 0.0);
}

// Both sides of the pair read the same tensors: a word seen only on the left
// and a word seen only on the right both receive embedding gradient.
TEST(Gradients, SidesShareParameters) {
  Model m = Model::init(small_config(CellKind::GRU), words6(), 4);
  Batch b;
  b.left = {{0, 1}};
  b.right = {{2, 3, 3}};
  b.labels = {2};
  Network net;
  Gradients g(m);
  net.run(m, b, &g);
  for (int w : {0, 1, 2, 3}) EXPECT_GT(g[kEmbedding].col(w).norm(), 0.0) << w;
  for (int w : {4, 5}) EXPECT_EQ(g[kEmbedding].col(w).norm(), 0.0) << w;
}

TEST(Cells, ZeroWeights) {
  for (CellKind cell : {CellKind::SRN, CellKind::GRU, CellKind::LSTM}) {
    Model m = Model::init(small_config(cell), words6(), 1);
    m[kW].setZero();
    m[kU].setZero();
    m[kB].setZero();
    CellState s;
    s.h = Vector::LinSpaced(8, -0.9, 0.9);
    s.c = Vector::LinSpaced(8, -2.0, 2.0);
    const Vector x = Vector::Ones(5);
    const CellState next = cell_step(m, x, s);
    switch (cell) {
      case CellKind::SRN: EXPECT_EQ(next.h.norm(), 0.0); break;
      case CellKind::GRU: EXPECT_LE((next.h - 0.5 * s.h).norm(), 1e-15); break;
      case CellKind::LSTM:
        EXPECT_LE((next.c - 0.5 * s.c).norm(), 1e-15);
        EXPECT_LE((next.h - 0.5 * Vector(next.c.array().tanh())).norm(), 1e-15);
        break;
      default: break;
    }
  }
}

// The batched encoder (length-sorted, shrinking active prefix) gives the same
// sentence vectors as stepping the cell by hand one sentence at a time.
TEST(Encoder, BatchedMatchesStepwise) {
  for (CellKind cell : {CellKind::SRN, CellKind::GRU, CellKind::LSTM}) {
    const Model m = Model::init(small_config(cell), words6(), 7);
    const std::vector<WordIds> sentences = {{0}, {1, 2, 3, 4, 5}, {2, 2}, {5, 4, 3}, {1, 2, 3, 4, 5, 0, 1}};
    Network net;
    const Matrix batched = net.encode_sentences(m, sentences);
    EXPECT_EQ(net.cell_applications(), 18u);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      CellState s{Vector::Zero(8), Vector::Zero(8)};
      for (int w : sentences[i]) s = cell_step(m, m[kEmbedding].col(w), s);
      const Vector expected = (m[kProjection] * s.h + m[kProjectionBias].col(0)).array().tanh();
      EXPECT_LE((batched.col(static_cast<Eigen::Index>(i)) - expected).norm(), 1e-12) << cell_name(cell) << " " << i;
      EXPECT_LE((encode_sentence(m, sentences[i]) - expected).norm(), 1e-12);
    }
  }
}

TEST(Encoder, SumIsExactlyOrderInvariant) {
  const Model m = Model::init(small_config(CellKind::Sum), words6(), 2);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    WordIds s(1 + rng() % 9);
    for (int& w : s) w = static_cast<int>(rng() % 6);
    const Vector v = encode_sentence(m, s);
    std::shuffle(s.begin(), s.end(), rng);
    EXPECT_TRUE(bit_equal(v, encode_sentence(m, s)));
  }
  const Vector single = encode_sentence(m, {3});
  const Vector expected = (m[kProjection] * m[kEmbedding].col(3) + m[kProjectionBias].col(0)).array().tanh();
  EXPECT_LE((single - expected).norm(), 1e-15);
}

TEST(Encoder, RecurrentCellsAreOrderSensitive) {
  for (CellKind cell : {CellKind::SRN, CellKind::GRU, CellKind::LSTM}) {
    const Model m = Model::init(small_config(cell), words6(), 5);
    std::mt19937_64 rng(4);
    int changed = 0, trials = 0;
    while (trials < 100) {
      WordIds s(2 + rng() % 6);
      for (int& w : s) w = static_cast<int>(rng() % 6);
      WordIds p = s;
      std::shuffle(p.begin(), p.end(), rng);
      if (p == s) continue;
      ++trials;
      changed += (encode_sentence(m, s) - encode_sentence(m, p)).norm() > 1e-9;
    }
    EXPECT_GE(changed, 95) << cell_name(cell);
  }
}

TEST(Classifier, ProbabilitiesAreNormalized) {
  for (CellKind cell : kCells) {
    const auto c = random_gradient_case(cell, 11);
    Network net;
    const auto out = net.run(c.model, c.batch);
    for (Eigen::Index j = 0; j < out.probabilities.cols(); ++j) {
      EXPECT_NEAR(out.probabilities.col(j).sum(), 1.0, 1e-12);
      EXPECT_GE(out.probabilities.col(j).minCoeff(), 0.0);
    }
    EXPECT_GE(out.loss, 0.0);
  }
}

TEST(Classifier, BatchMatchesSinglePairAndIsOrdered) {
  const Model m = Model::init(small_config(CellKind::GRU), words6(), 9);
  Batch b;
  b.left = {{0, 1, 2}, {4}};
  b.right = {{3, 3}, {5, 0, 1, 2}};
  Network net;
  const auto out = net.run(m, b);
  for (std::size_t i = 0; i < 2; ++i) {
    const Vector p = classify(m, encode_sentence(m, b.left[i]), encode_sentence(m, b.right[i]));
    EXPECT_LE((out.probabilities.col(static_cast<Eigen::Index>(i)) - p).norm(), 1e-12);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
  }
  const Vector ab = classify(m, encode_sentence(m, {0, 1, 2}), encode_sentence(m, {3, 3}));
  const Vector ba = classify(m, encode_sentence(m, {3, 3}), encode_sentence(m, {0, 1, 2}));
  EXPECT_GT((ab - ba).norm(), 1e-6);
}

TEST(Classifier, UnknownWordIsADataError) {
  const Model m = Model::init(small_config(CellKind::GRU), words6(), 1);
  EXPECT_THROW(m.word_id("Romans"), DataError);
}

TEST(AdaDelta, ZeroGradientMeansNoUpdate) {
  Model m = Model::init(small_config(CellKind::LSTM), words6(), 1);
  const Model before = m;
  AdaDelta opt;
  Gradients g(m);
  for (int i = 0; i < 5; ++i) opt.step(m, g);
  for (int s = 0; s < kSlotCount; ++s) EXPECT_TRUE(bit_equal(m.tensors()[s].value, before.tensors()[s].value));
}

// Against the scalar recurrence written out independently, then the
// steady state |Δ| = |g| of a constant gradient.
TEST(AdaDelta, ConstantGradientIteration) {
  Model m = Model::init(small_config(CellKind::SRN), words6(), 1);
  AdaDelta opt;
  Gradients g(m);
  const double grad = 1e-3;
  for (auto& s : g.slots) s.setConstant(grad);
  double eg = 0, ed = 0;
  double last_delta = 0;
  for (int step = 0; step < 2000; ++step) {
    const double before = m[kClassifierBias](0, 0);
    opt.step(m, g);
    eg = 0.95 * eg + 0.05 * grad * grad;
    const double delta = -std::sqrt(ed + 1e-6) / std::sqrt(eg + 1e-6) * grad;
    ed = 0.95 * ed + 0.05 * delta * delta;
    last_delta = m[kClassifierBias](0, 0) - before;
    if (step < 50) EXPECT_NEAR(last_delta, delta, 1e-15);
  }
  EXPECT_NEAR(std::abs(last_delta), grad, 1e-6 * grad);
}

TEST(AdaDelta, FrozenTensorsStayBitIdentical) {
  Model m = Model::init(small_config(CellKind::GRU), words6(), 1);
  m.tensors()[kEmbedding].frozen = true;
  const Matrix embedding = m[kEmbedding];
  const Matrix classifier = m[kClassifier];
  AdaDelta opt;
  std::mt19937_64 rng(2);
  for (int step = 0; step < 100; ++step) {
    Gradients g(m);
    for (auto& s : g.slots)
      for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = static_cast<double>(rng() % 1000) / 1000.0 - 0.5;
    opt.step(m, g);
  }
  EXPECT_TRUE(bit_equal(m[kEmbedding], embedding));
  EXPECT_FALSE(bit_equal(m[kClassifier], classifier));
}

TEST(AdaDelta, NonFiniteGradientAborts) {
  Model m = Model::init(small_config(CellKind::GRU), words6(), 1);
  AdaDelta opt;
  Gradients g(m);
  g[kU](0, 0) = std::nan("");
  EXPECT_THROW(opt.step(m, g), NumericError);
}

TEST(Training, OverfitsFiftyPairs) {
  const auto ds = random_pairs(50, 21);
  const auto words = dataset_words({&ds});
  for (CellKind cell : {CellKind::SRN, CellKind::GRU, CellKind::LSTM}) {
    ModelConfig c;
    c.cell = cell;
    TrainConfig tc;
    tc.epochs = 200;
    tc.seed = 3;
    tc.evaluate_test_each_epoch = false;
    const Model start = Model::init(c, words, tc.seed);
    const double initial_loss = evaluate(start, ds).loss;
    TrainConfig one = tc;
    one.epochs = 1;
    EXPECT_LT(train(start, ds, nullptr, one).train.loss, initial_loss) << cell_name(cell);
    const auto result = train(start, ds, nullptr, tc);
    EXPECT_EQ(result.train.accuracy, 1.0) << cell_name(cell);
  }
}

TEST(Training, DeterministicGivenSeed) {
  const auto ds = random_pairs(200, 22);
  const auto test = random_pairs(50, 23);
  const auto words = dataset_words({&ds, &test});
  TrainConfig tc;
  tc.epochs = 3;
  tc.seed = 5;
  auto run = [&](std::uint64_t seed) {
    tc.seed = seed;
    std::string log;
    auto r = train(Model::init(ModelConfig{}, words, seed), ds, &test, tc,
                   [&](const EpochMetrics& m) { log += format_metrics(m); });
    return std::pair{log, r.checkpoint.model};
  };
  const auto [log_a, model_a] = run(5);
  const auto [log_b, model_b] = run(5);
  const auto [log_c, model_c] = run(6);
  EXPECT_EQ(log_a, log_b);
  for (int s = 0; s < kSlotCount; ++s) EXPECT_TRUE(bit_equal(model_a.tensors()[s].value, model_b.tensors()[s].value));
  EXPECT_NE(log_a, log_c);
}

TEST(Training, EpochSeedsDiffer) {
  EXPECT_NE(epoch_seed(1, 1), epoch_seed(1, 2));
  EXPECT_NE(epoch_seed(1, 1), epoch_seed(2, 1));
  EXPECT_EQ(epoch_seed(7, 3), epoch_seed(7, 3));
}

TEST(Evaluation, ConfusionMatrices) {
  ConfusionMatrix perfect;
  for (std::size_t i = 0; i < kRelationCount; ++i) perfect.counts[i][i] = 10 + i;
  EXPECT_EQ(perfect.accuracy(), 1.0);
  const std::string normalized = perfect.format_row_normalized();
  EXPECT_NE(normalized.find("#\t1.0000\t0.0000"), std::string::npos) << normalized;

  const auto ds = random_pairs(300, 24);
  const Model m = Model::init(ModelConfig{}, dataset_words({&ds}), 1);
  const auto r = evaluate(m, ds, 64);
  EXPECT_EQ(r.confusion.total(), ds.size());
  EXPECT_DOUBLE_EQ(r.accuracy, static_cast<double>(r.confusion.correct()) / static_cast<double>(ds.size()));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) hits += r.predictions[i] == index_of(ds[i].relation);
  EXPECT_EQ(hits, r.confusion.correct());
  EXPECT_EQ(r.confusion.format_errors().find("\n#\t0"), r.confusion.format_errors().find('\n'));
}

TEST(Checkpoint, RoundTripIsExact) {
  const auto ds = random_pairs(100, 25);
  TrainConfig tc;
  tc.epochs = 2;
  auto result = train(Model::init(small_config(CellKind::LSTM), dataset_words({&ds}), 1), ds, nullptr, tc);
  result.checkpoint.config = {{"note", "round trip"}};
  std::stringstream buffer;
  save_checkpoint(result.checkpoint, buffer);
  const Checkpoint back = load_checkpoint(buffer);
  EXPECT_EQ(back.model.words(), result.checkpoint.model.words());
  EXPECT_EQ(config_to_json(back.model.config()), config_to_json(result.checkpoint.model.config()));
  EXPECT_EQ(back.epoch, 2);
  EXPECT_EQ(back.rng_state, result.checkpoint.rng_state);
  EXPECT_EQ(back.config, result.checkpoint.config);
  for (int s = 0; s < kSlotCount; ++s) {
    EXPECT_TRUE(bit_equal(back.model.tensors()[s].value, result.checkpoint.model.tensors()[s].value));
    EXPECT_TRUE(bit_equal(back.optimizer.grad_sq[s], result.checkpoint.optimizer.grad_sq[s]));
    EXPECT_TRUE(bit_equal(back.optimizer.update_sq[s], result.checkpoint.optimizer.update_sq[s]));
  }
  EXPECT_EQ(evaluate(back.model, ds).predictions, evaluate(result.checkpoint.model, ds).predictions);
}

TEST(Checkpoint, CorruptFilesAreRejected) {
  std::stringstream junk("not a checkpoint at all");
  EXPECT_THROW(load_checkpoint(junk), DataError);
  std::stringstream full;
  save_checkpoint(Checkpoint{Model::init(small_config(CellKind::GRU), words6(), 1), {}, 0, "", nullptr}, full);
  const std::string bytes = full.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 9));
  EXPECT_THROW(load_checkpoint(truncated), DataError);
}

TEST(Pretrained, LoadsWithLowercaseFallbackAndFreezes) {
  const auto path = scratch("vectors.txt");
  std::ofstream(path) << "romans 1 0 0\nlike 0 1 0\nkids 0 0 1\nchildren 0 0.5 1\n";
  const std::vector<std::string> words = {"Romans", "like", "children"};
  const auto vectors = load_pretrained_embeddings(path.string(), words, 3);
  EXPECT_EQ(vectors.at("Romans"), (Vector(3) << 1, 0, 0).finished());
  EXPECT_THROW(load_pretrained_embeddings(path.string(), {"Romans", "Italians", "fear"}, 3), DataError);
  try {
    load_pretrained_embeddings(path.string(), {"Italians", "fear"}, 3);
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("Italians, fear"), std::string::npos) << e.what();
  }
  Model m = init_with_pretrained(ModelConfig{}, words, vectors, 1);
  EXPECT_TRUE(m.config().frozen_embeddings);
  EXPECT_TRUE(m.tensors()[kEmbedding].frozen);
  EXPECT_EQ(m.config().embedding_dim, 3);
  EXPECT_EQ(m[kEmbedding].col(m.word_id("children")), vectors.at("children"));
  const auto kids = load_pretrained_embeddings(path.string(), {"kids"}, 3).at("kids");
  m.set_embedding("kids", kids);
  EXPECT_EQ(m[kEmbedding].cols(), 4);
  EXPECT_NEAR(cos_dist(kids, kids), 0.0, 1e-15);
  EXPECT_NEAR(cos_dist(kids, vectors.at("children")), 1 - 1 / std::sqrt(1.25), 1e-12);
}
