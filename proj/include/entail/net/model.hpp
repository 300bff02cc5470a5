#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "entail/error.hpp"

namespace entail::net {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class CellKind { SRN, GRU, LSTM, Sum };

inline std::string_view cell_name(CellKind k) {
  switch (k) {
    case CellKind::SRN: return "srn";
    case CellKind::GRU: return "gru";
    case CellKind::LSTM: return "lstm";
    case CellKind::Sum: return "sum";
  }
  return "?";
}

inline CellKind parse_cell(std::string_view s) {
  for (CellKind k : {CellKind::SRN, CellKind::GRU, CellKind::LSTM, CellKind::Sum})
    if (cell_name(k) == s) return k;
  if (s == "sumnn") return CellKind::Sum;
  throw ConfigError("unknown model kind '" + std::string(s) + "' (srn, gru, lstm, sum)");
}

// Number of stacked gate blocks in W, U and b.
inline int gate_count(CellKind k) {
  switch (k) {
    case CellKind::SRN: return 1;
    case CellKind::GRU: return 3;
    case CellKind::LSTM: return 4;
    case CellKind::Sum: return 0;
  }
  return 0;
}

struct ModelConfig {
  CellKind cell = CellKind::GRU;
  int hidden = 128;
  int embedding_dim = 25;
  int sentence_dim = 25;
  int comparison_dim = 75;
  int classes = 7;
  double leaky_slope = 0.01;
  bool frozen_embeddings = false;
};

// Named parameter slots. Cells without recurrence (Sum) leave W, U, b empty.
enum Slot : int { kEmbedding, kW, kU, kB, kProjection, kProjectionBias, kComparison, kComparisonBias, kClassifier, kClassifierBias, kSlotCount };

inline constexpr std::array<const char*, kSlotCount> kSlotNames = {
    "embedding", "input_weights", "recurrent_weights", "recurrent_bias", "projection",
    "projection_bias", "comparison", "comparison_bias", "classifier", "classifier_bias"};

struct Tensor {
  std::string name;
  Matrix value;
  bool frozen = false;
};

// Deterministic draws that do not depend on the standard library's
// distribution implementations.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double normal() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    double u1;
    do u1 = uniform01();
    while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    cached_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }
  std::size_t index(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw;
    do draw = engine_();
    while (draw >= limit);
    return static_cast<std::size_t>(draw % n);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool cached_ = false;
  double spare_ = 0.0;
};

// Siamese classifier parameters: word embeddings (one column per word), the
// encoder, a projection of the final state to the sentence vector, and the
// comparison and classification layers.
class Model {
 public:
  Model() = default;

  // Random initialization: embeddings N(0,1), encoder weights U(-1/sqrt(h),
  // 1/sqrt(h)), every other layer U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static Model init(const ModelConfig& config, std::vector<std::string> words, std::uint64_t seed) {
    Model m;
    m.config_ = config;
    m.set_words(std::move(words));
    Random rng(seed);
    const int h = config.hidden, d = config.embedding_dim, g = gate_count(config.cell);
    const int enc_out = config.cell == CellKind::Sum ? d : h;
    auto uniform = [&rng](int rows, int cols, double bound) {
      Matrix x(rows, cols);
      for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) x(i, j) = rng.uniform(-bound, bound);
      return x;
    };
    m.tensors_.resize(kSlotCount);
    for (int s = 0; s < kSlotCount; ++s) m.tensors_[s].name = kSlotNames[s];
    Matrix e(d, static_cast<int>(m.words_.size()));
    for (int j = 0; j < e.cols(); ++j)
      for (int i = 0; i < d; ++i) e(i, j) = rng.normal();
    m.tensors_[kEmbedding].value = std::move(e);
    m.tensors_[kEmbedding].frozen = config.frozen_embeddings;
    const double rec = 1.0 / std::sqrt(static_cast<double>(h));
    if (g > 0) {
      m.tensors_[kW].value = uniform(g * h, d, rec);
      m.tensors_[kU].value = uniform(g * h, h, rec);
      m.tensors_[kB].value = uniform(g * h, 1, rec);
    }
    const double proj = 1.0 / std::sqrt(static_cast<double>(enc_out));
    m.tensors_[kProjection].value = uniform(config.sentence_dim, enc_out, proj);
    m.tensors_[kProjectionBias].value = uniform(config.sentence_dim, 1, proj);
    const double comp = 1.0 / std::sqrt(2.0 * config.sentence_dim);
    m.tensors_[kComparison].value = uniform(config.comparison_dim, 2 * config.sentence_dim, comp);
    m.tensors_[kComparisonBias].value = uniform(config.comparison_dim, 1, comp);
    const double cls = 1.0 / std::sqrt(static_cast<double>(config.comparison_dim));
    m.tensors_[kClassifier].value = uniform(config.classes, config.comparison_dim, cls);
    m.tensors_[kClassifierBias].value = uniform(config.classes, 1, cls);
    return m;
  }

  // Rebuilds a model from stored parts (checkpoints).
  static Model assemble(const ModelConfig& config, std::vector<std::string> words, std::vector<Tensor> tensors) {
    if (tensors.size() != kSlotCount) throw DataError("model needs " + std::to_string(kSlotCount) + " tensors");
    Model m;
    m.config_ = config;
    m.set_words(std::move(words));
    m.tensors_ = std::move(tensors);
    m.check_shapes();
    return m;
  }

  const ModelConfig& config() const { return config_; }
  const std::vector<std::string>& words() const { return words_; }
  std::vector<Tensor>& tensors() { return tensors_; }
  const std::vector<Tensor>& tensors() const { return tensors_; }
  Matrix& operator[](Slot s) { return tensors_[s].value; }
  const Matrix& operator[](Slot s) const { return tensors_[s].value; }

  int word_id(const std::string& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) throw DataError("word '" + w + "' has no embedding in this model");
    return it->second;
  }
  bool knows(const std::string& w) const { return index_.count(w) != 0; }

  // Adds (or overwrites) embedding columns. Used to give a trained model with
  // frozen pretrained embeddings the vectors of words it never saw.
  void set_embedding(const std::string& w, const Vector& v) {
    if (v.size() != config_.embedding_dim) throw DataError("embedding of '" + w + "' has the wrong size");
    auto it = index_.find(w);
    Matrix& e = tensors_[kEmbedding].value;
    if (it != index_.end()) {
      e.col(it->second) = v;
      return;
    }
    e.conservativeResize(Eigen::NoChange, e.cols() + 1);
    e.col(e.cols() - 1) = v;
    index_.emplace(w, static_cast<int>(words_.size()));
    words_.push_back(w);
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors_) n += static_cast<std::size_t>(t.value.size());
    return n;
  }

  void check_shapes() const {
    const int h = config_.hidden, d = config_.embedding_dim, g = gate_count(config_.cell);
    const int enc_out = config_.cell == CellKind::Sum ? d : h;
    const std::array<std::pair<int, int>, kSlotCount> shapes = {{{d, static_cast<int>(words_.size())},
                                                                  {g * h, g ? d : 0},
                                                                  {g * h, g ? h : 0},
                                                                  {g * h, g ? 1 : 0},
                                                                  {config_.sentence_dim, enc_out},
                                                                  {config_.sentence_dim, 1},
                                                                  {config_.comparison_dim, 2 * config_.sentence_dim},
                                                                  {config_.comparison_dim, 1},
                                                                  {config_.classes, config_.comparison_dim},
                                                                  {config_.classes, 1}}};
    for (int s = 0; s < kSlotCount; ++s) {
      const auto& v = tensors_[s].value;
      if (v.rows() != shapes[s].first || v.cols() != shapes[s].second)
        throw DataError(std::string("tensor ") + kSlotNames[s] + " has shape " + std::to_string(v.rows()) + "x" +
                        std::to_string(v.cols()) + ", expected " + std::to_string(shapes[s].first) + "x" +
                        std::to_string(shapes[s].second));
    }
  }

 private:
  void set_words(std::vector<std::string> words) {
    words_ = std::move(words);
    index_.clear();
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (!index_.emplace(words_[i], static_cast<int>(i)).second) throw ConfigError("duplicate word " + words_[i]);
  }

  ModelConfig config_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
  std::vector<Tensor> tensors_;
};

// One gradient matrix per parameter slot, shaped like the model's tensors.
struct Gradients {
  std::vector<Matrix> slots;

  explicit Gradients(const Model& m) {
    for (const auto& t : m.tensors()) slots.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
  }
  Matrix& operator[](Slot s) { return slots[s]; }
  const Matrix& operator[](Slot s) const { return slots[s]; }
  void zero() {
    for (auto& g : slots) g.setZero();
  }
};

}  // namespace entail::net
