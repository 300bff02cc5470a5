#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "entail/data/dataset.hpp"
#include "entail/error.hpp"
#include "entail/lang/sentence.hpp"
#include "entail/net/model.hpp"

namespace entail::net {

using WordIds = std::vector<int>;

struct Batch {
  std::vector<WordIds> left, right;
  std::vector<int> labels;  // class index per pair
  std::size_t size() const { return left.size(); }
};

inline WordIds word_ids(const Model& m, const Sentence& s) {
  WordIds ids;
  for (const auto& w : render_tokens(s)) ids.push_back(m.word_id(w));
  return ids;
}

inline Batch make_batch(const Model& m, const data::Dataset& ds, const std::vector<std::size_t>& rows) {
  Batch b;
  for (std::size_t r : rows) {
    b.left.push_back(word_ids(m, ds[r].left));
    b.right.push_back(word_ids(m, ds[r].right));
    b.labels.push_back(index_of(ds[r].relation));
  }
  return b;
}

namespace detail {

inline Matrix sigmoid(const Matrix& a) { return (1.0 + (-a.array()).exp()).inverse().matrix(); }

// Accumulates column j of `src` into column ids[j] of `dst`.
inline void scatter_add(Matrix& dst, const Matrix& src, const std::vector<int>& ids) {
  for (std::size_t j = 0; j < ids.size(); ++j) dst.col(ids[j]) += src.col(static_cast<Eigen::Index>(j));
}

}  // namespace detail

struct BatchOutput {
  Matrix probabilities;  // classes x pairs
  std::vector<int> predictions;
  double loss = 0.0;  // mean cross-entropy
  std::size_t correct = 0;
};

// Forward and backward passes of the Siamese classifier over a batch. Left
// and right sentences go through the same encoder in one pass: sentences are
// sorted by length so that the ones still running at step t are a prefix of
// the columns, and each step touches only that prefix.
class Network {
 public:
  BatchOutput run(const Model& m, const Batch& batch, Gradients* grads = nullptr) {
    const auto& cfg = m.config();
    const std::size_t pairs = batch.size();
    if (pairs == 0) throw DataError("empty batch");
    std::vector<const WordIds*> sentences;
    for (const auto& s : batch.left) sentences.push_back(&s);
    for (const auto& s : batch.right) sentences.push_back(&s);
    for (const auto* s : sentences)
      if (s->empty()) throw DataError("empty sentence");

    const Matrix sentence = encode(m, sentences);  // sentence_dim x 2*pairs, sorted order

    const int sd = cfg.sentence_dim;
    Matrix joined(2 * sd, static_cast<Eigen::Index>(pairs));
    for (std::size_t i = 0; i < pairs; ++i) {
      joined.col(i).head(sd) = sentence.col(pos_[i]);
      joined.col(i).tail(sd) = sentence.col(pos_[pairs + i]);
    }
    Matrix pre = m[kComparison] * joined;
    pre.colwise() += m[kComparisonBias].col(0);
    const double slope = cfg.leaky_slope;
    Matrix hidden = pre.unaryExpr([slope](double x) { return x > 0 ? x : slope * x; });
    Matrix logits = m[kClassifier] * hidden;
    logits.colwise() += m[kClassifierBias].col(0);

    BatchOutput out;
    out.probabilities.resize(logits.rows(), logits.cols());
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      const double top = logits.col(j).maxCoeff();
      auto e = (logits.col(j).array() - top).exp();
      out.probabilities.col(j) = e / e.sum();
      Eigen::Index arg;
      logits.col(j).maxCoeff(&arg);
      out.predictions.push_back(static_cast<int>(arg));
    }
    const bool labeled = batch.labels.size() == pairs;
    if (labeled) {
      for (std::size_t i = 0; i < pairs; ++i) {
        const int y = batch.labels[i];
        if (y < 0 || y >= cfg.classes) throw DataError("label out of range");
        out.loss -= std::log(std::max(out.probabilities(y, i), 1e-300));
        if (out.predictions[i] == y) ++out.correct;
      }
      out.loss /= static_cast<double>(pairs);
      if (!std::isfinite(out.loss)) throw NumericError("non-finite loss");
    }
    if (!grads) return out;
    if (!labeled) throw DataError("gradients need labels");

    Gradients& g = *grads;
    Matrix d_logits = out.probabilities;
    for (std::size_t i = 0; i < pairs; ++i) d_logits(batch.labels[i], i) -= 1.0;
    d_logits /= static_cast<double>(pairs);
    g[kClassifier].noalias() += d_logits * hidden.transpose();
    g[kClassifierBias] += d_logits.rowwise().sum();
    Matrix d_pre = m[kClassifier].transpose() * d_logits;
    d_pre.array() *= pre.unaryExpr([slope](double x) { return x > 0 ? 1.0 : slope; }).array();
    g[kComparison].noalias() += d_pre * joined.transpose();
    g[kComparisonBias] += d_pre.rowwise().sum();
    const Matrix d_joined = m[kComparison].transpose() * d_pre;
    Matrix d_sentence = Matrix::Zero(sentence.rows(), sentence.cols());
    for (std::size_t i = 0; i < pairs; ++i) {
      d_sentence.col(pos_[i]) += d_joined.col(i).head(sd);
      d_sentence.col(pos_[pairs + i]) += d_joined.col(i).tail(sd);
    }
    backward(m, sentence, d_sentence, g);
    for (const auto& s : g.slots)
      if (!s.allFinite()) throw NumericError("non-finite gradient");
    return out;
  }

  // Sentence vectors (sentence_dim x n), in the order given.
  Matrix encode_sentences(const Model& m, const std::vector<WordIds>& sentences) {
    std::vector<const WordIds*> ptrs;
    for (const auto& s : sentences) ptrs.push_back(&s);
    const Matrix sorted = encode(m, ptrs);
    Matrix out(sorted.rows(), sorted.cols());
    for (std::size_t i = 0; i < ptrs.size(); ++i) out.col(i) = sorted.col(pos_[i]);
    return out;
  }

  // Number of recurrent cell applications in the last encode (one per word).
  std::size_t cell_applications() const { return applications_; }

 private:
  // Returns projected sentence vectors in sorted column order; fills the caches.
  Matrix encode(const Model& m, const std::vector<const WordIds*>& sentences) {
    const auto& cfg = m.config();
    const std::size_t n = sentences.size();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return sentences[a]->size() > sentences[b]->size(); });
    pos_.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) pos_[order_[k]] = static_cast<int>(k);
    const std::size_t steps = sentences[order_[0]]->size();
    ids_.assign(steps, {});
    for (std::size_t t = 0; t < steps; ++t)
      for (std::size_t k = 0; k < n && sentences[order_[k]]->size() > t; ++k)
        ids_[t].push_back((*sentences[order_[k]])[t]);
    applications_ = 0;
    for (const auto& s : ids_) applications_ += s.size();

    const Matrix& emb = m[kEmbedding];
    if (cfg.cell == CellKind::Sum) {
      // Words are added in id order, so any reordering of a sentence gives
      // bit-identical sums.
      final_ = Matrix::Zero(emb.rows(), static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < n; ++k) {
        WordIds bag = *sentences[order_[k]];
        std::sort(bag.begin(), bag.end());
        for (int w : bag) final_.col(static_cast<Eigen::Index>(k)) += emb.col(w);
      }
    } else {
      recur(m);
    }
    Matrix s = m[kProjection] * final_;
    s.colwise() += m[kProjectionBias].col(0);
    return s.array().tanh().matrix();
  }

  void recur(const Model& m) {
    const auto& cfg = m.config();
    const int h = cfg.hidden;
    const auto n = static_cast<Eigen::Index>(order_.size());
    const Matrix& U = m[kU];
    // Input contributions per vocabulary word, bias included.
    input_ = m[kW] * m[kEmbedding];
    input_.colwise() += m[kB].col(0);
    Matrix H = Matrix::Zero(h, n);
    Matrix C;
    if (cfg.cell == CellKind::LSTM) C = Matrix::Zero(h, n);
    const std::size_t steps = ids_.size();
    h_prev_.assign(steps, {});
    gates_.assign(steps, {});
    aux_.assign(steps, {});
    c_prev_.assign(steps, {});
    for (std::size_t t = 0; t < steps; ++t) {
      const auto& ids = ids_[t];
      const auto k = static_cast<Eigen::Index>(ids.size());
      h_prev_[t] = H.leftCols(k);
      const Matrix& hp = h_prev_[t];
      switch (cfg.cell) {
        case CellKind::SRN: {
          Matrix a = input_(Eigen::all, ids);
          a.noalias() += U * hp;
          gates_[t] = a.array().tanh().matrix();
          H.leftCols(k) = gates_[t];
          break;
        }
        case CellKind::GRU: {
          // gates_: [z; r; candidate], aux_: r ⊙ h_prev
          Matrix a = input_(Eigen::all, ids);
          a.topRows(2 * h).noalias() += U.topRows(2 * h) * hp;
          Matrix gt(3 * h, k);
          gt.topRows(2 * h) = detail::sigmoid(a.topRows(2 * h));
          aux_[t] = gt.middleRows(h, h).cwiseProduct(hp);
          Matrix cand = a.bottomRows(h);
          cand.noalias() += U.bottomRows(h) * aux_[t];
          gt.bottomRows(h) = cand.array().tanh().matrix();
          H.leftCols(k) = hp + gt.topRows(h).cwiseProduct(gt.bottomRows(h) - hp);
          gates_[t] = std::move(gt);
          break;
        }
        case CellKind::LSTM: {
          // gates_: [i; f; o; g], aux_: new cell state
          Matrix a = input_(Eigen::all, ids);
          a.noalias() += U * hp;
          Matrix gt(4 * h, k);
          gt.topRows(3 * h) = detail::sigmoid(a.topRows(3 * h));
          gt.bottomRows(h) = a.bottomRows(h).array().tanh().matrix();
          c_prev_[t] = C.leftCols(k);
          aux_[t] = gt.middleRows(h, h).cwiseProduct(c_prev_[t]) + gt.topRows(h).cwiseProduct(gt.bottomRows(h));
          C.leftCols(k) = aux_[t];
          H.leftCols(k) = gt.middleRows(2 * h, h).cwiseProduct(aux_[t].array().tanh().matrix());
          gates_[t] = std::move(gt);
          break;
        }
        case CellKind::Sum: break;
      }
    }
    final_ = std::move(H);
  }

  void backward(const Model& m, const Matrix& sentence, const Matrix& d_sentence, Gradients& g) {
    const auto& cfg = m.config();
    Matrix d_proj = d_sentence.cwiseProduct((1.0 - sentence.array().square()).matrix());
    g[kProjection].noalias() += d_proj * final_.transpose();
    g[kProjectionBias] += d_proj.rowwise().sum();
    Matrix d_final = m[kProjection].transpose() * d_proj;
    const bool train_embeddings = !m.tensors()[kEmbedding].frozen;

    if (cfg.cell == CellKind::Sum) {
      if (train_embeddings)
        for (const auto& step : ids_)
          for (std::size_t j = 0; j < step.size(); ++j) g[kEmbedding].col(step[j]) += d_final.col(j);
      return;
    }

    const int h = cfg.hidden;
    const Matrix& U = m[kU];
    Matrix dH = std::move(d_final);
    Matrix dC;
    if (cfg.cell == CellKind::LSTM) dC = Matrix::Zero(h, dH.cols());
    // Gradient w.r.t. the pre-activations, summed per vocabulary word.
    Matrix per_word = Matrix::Zero(input_.rows(), input_.cols());
    for (std::size_t t = ids_.size(); t-- > 0;) {
      const auto& ids = ids_[t];
      const auto k = static_cast<Eigen::Index>(ids.size());
      const Matrix& hp = h_prev_[t];
      const Matrix& gt = gates_[t];
      const Matrix dh = dH.leftCols(k);
      Matrix da;
      switch (cfg.cell) {
        case CellKind::SRN: {
          da = dh.cwiseProduct((1.0 - gt.array().square()).matrix());
          g[kU].noalias() += da * hp.transpose();
          dH.leftCols(k).noalias() = U.transpose() * da;
          break;
        }
        case CellKind::GRU: {
          const auto z = gt.topRows(h), r = gt.middleRows(h, h), cand = gt.bottomRows(h);
          da.resize(3 * h, k);
          Matrix d_hprev = dh.cwiseProduct((1.0 - z.array()).matrix());
          const Matrix dz = dh.cwiseProduct(cand - hp);
          da.bottomRows(h) = dh.cwiseProduct(z).cwiseProduct((1.0 - cand.array().square()).matrix());
          g[kU].bottomRows(h).noalias() += da.bottomRows(h) * aux_[t].transpose();
          const Matrix d_rh = U.bottomRows(h).transpose() * da.bottomRows(h);
          d_hprev += d_rh.cwiseProduct(r);
          da.topRows(h) = dz.cwiseProduct(z.cwiseProduct((1.0 - z.array()).matrix()));
          da.middleRows(h, h) = d_rh.cwiseProduct(hp).cwiseProduct(r.cwiseProduct((1.0 - r.array()).matrix()));
          g[kU].topRows(2 * h).noalias() += da.topRows(2 * h) * hp.transpose();
          d_hprev.noalias() += U.topRows(2 * h).transpose() * da.topRows(2 * h);
          dH.leftCols(k) = d_hprev;
          break;
        }
        case CellKind::LSTM: {
          const auto i = gt.topRows(h), f = gt.middleRows(h, h), o = gt.middleRows(2 * h, h), gg = gt.bottomRows(h);
          const Matrix tc = aux_[t].array().tanh().matrix();
          const Matrix dc = dC.leftCols(k) + dh.cwiseProduct(o).cwiseProduct((1.0 - tc.array().square()).matrix());
          da.resize(4 * h, k);
          da.topRows(h) = dc.cwiseProduct(gg).cwiseProduct(i.cwiseProduct((1.0 - i.array()).matrix()));
          da.middleRows(h, h) = dc.cwiseProduct(c_prev_[t]).cwiseProduct(f.cwiseProduct((1.0 - f.array()).matrix()));
          da.middleRows(2 * h, h) = dh.cwiseProduct(tc).cwiseProduct(o.cwiseProduct((1.0 - o.array()).matrix()));
          da.bottomRows(h) = dc.cwiseProduct(i).cwiseProduct((1.0 - gg.array().square()).matrix());
          dC.leftCols(k) = dc.cwiseProduct(f);
          g[kU].noalias() += da * hp.transpose();
          dH.leftCols(k).noalias() = U.transpose() * da;
          break;
        }
        case CellKind::Sum: break;
      }
      detail::scatter_add(per_word, da, ids);
    }
    g[kW].noalias() += per_word * m[kEmbedding].transpose();
    g[kB] += per_word.rowwise().sum();
    if (train_embeddings) g[kEmbedding].noalias() += m[kW].transpose() * per_word;
  }

  std::vector<int> order_, pos_;
  std::vector<std::vector<int>> ids_;
  std::size_t applications_ = 0;
  Matrix input_, final_;
  std::vector<Matrix> h_prev_, gates_, aux_, c_prev_;
};

// Single-sentence and single-step conveniences over the batched network.

inline Vector encode_sentence(const Model& m, const WordIds& words) {
  Network net;
  return net.encode_sentences(m, {words}).col(0);
}

// Distribution over the classes for one pair of sentence vectors.
inline Vector classify(const Model& m, const Vector& left, const Vector& right) {
  const int sd = m.config().sentence_dim;
  if (left.size() != sd || right.size() != sd) throw DataError("sentence vectors have the wrong size");
  Vector joined(2 * sd);
  joined << left, right;
  Vector pre = m[kComparison] * joined + m[kComparisonBias].col(0);
  const double slope = m.config().leaky_slope;
  Vector hidden = pre.unaryExpr([slope](double x) { return x > 0 ? x : slope * x; });
  Vector logits = m[kClassifier] * hidden + m[kClassifierBias].col(0);
  Vector e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

struct CellState {
  Vector h, c;  // c only for LSTM
};

// One application of the recurrent cell to input vector x.
inline CellState cell_step(const Model& m, const Vector& x, const CellState& state) {
  const auto& cfg = m.config();
  const int h = cfg.hidden;
  if (x.size() != cfg.embedding_dim || state.h.size() != h) throw DataError("cell_step: shape mismatch");
  const Vector a = m[kW] * x + m[kB].col(0);
  const Matrix& U = m[kU];
  auto sig = [](const Vector& v) { return Vector((1.0 + (-v.array()).exp()).inverse()); };
  CellState out;
  switch (cfg.cell) {
    case CellKind::SRN: out.h = (a + U * state.h).array().tanh(); break;
    case CellKind::GRU: {
      const Vector z = sig(a.head(h) + U.topRows(h) * state.h);
      const Vector r = sig(a.segment(h, h) + U.middleRows(h, h) * state.h);
      const Vector cand = (a.tail(h) + U.bottomRows(h) * r.cwiseProduct(state.h)).array().tanh();
      out.h = (1.0 - z.array()).matrix().cwiseProduct(state.h) + z.cwiseProduct(cand);
      break;
    }
    case CellKind::LSTM: {
      if (state.c.size() != h) throw DataError("cell_step: LSTM needs a cell state");
      const Vector pre = a + U * state.h;
      const Vector i = sig(pre.head(h)), f = sig(pre.segment(h, h)), o = sig(pre.segment(2 * h, h));
      const Vector g = pre.tail(h).array().tanh();
      out.c = f.cwiseProduct(state.c) + i.cwiseProduct(g);
      out.h = o.cwiseProduct(Vector(out.c.array().tanh()));
      break;
    }
    case CellKind::Sum: throw ConfigError("the summing model has no recurrent cell");
  }
  return out;
}

}  // namespace entail::net
