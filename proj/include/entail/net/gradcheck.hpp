#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "entail/net/model.hpp"
#include "entail/net/network.hpp"

namespace entail::net {

struct GradientCheck {
  // ‖numeric − analytic‖ / (‖numeric‖ + ‖analytic‖) per slot; 0 for empty or frozen slots.
  std::array<double, kSlotCount> relative_error{};
  double worst() const { return *std::max_element(relative_error.begin(), relative_error.end()); }
};

// Compares backpropagated gradients of the mean batch loss with central
// differences of step `h` on every parameter.
inline GradientCheck check_gradients(Model m, const Batch& batch, double h = 1e-5) {
  Network net;
  Gradients analytic(m);
  net.run(m, batch, &analytic);
  GradientCheck out;
  for (int s = 0; s < kSlotCount; ++s) {
    auto& tensor = m.tensors()[s];
    if (tensor.value.size() == 0) continue;
    Matrix numeric(tensor.value.rows(), tensor.value.cols());
    for (Eigen::Index i = 0; i < tensor.value.size(); ++i) {
      double& p = tensor.value.data()[i];
      const double old = p;
      p = old + h;
      const double up = net.run(m, batch).loss;
      p = old - h;
      const double down = net.run(m, batch).loss;
      p = old;
      numeric.data()[i] = (up - down) / (2 * h);
    }
    if (tensor.frozen) {
      // Frozen tensors get no gradient.
      out.relative_error[s] = analytic.slots[s].norm() == 0.0 ? 0.0 : 1.0;
      continue;
    }
    const double scale = numeric.norm() + analytic.slots[s].norm();
    out.relative_error[s] = scale > 0 ? (numeric - analytic.slots[s]).norm() / scale : 0.0;
  }
  return out;
}

struct GradientCase {
  Model model;
  Batch batch;
};

// Small random model (hidden size 8) and batch of varied sentence lengths.
inline GradientCase random_gradient_case(CellKind cell, std::uint64_t seed) {
  Random r(seed);
  ModelConfig c;
  c.cell = cell;
  c.hidden = 8;
  c.embedding_dim = 3 + static_cast<int>(r.index(4));
  c.sentence_dim = 3 + static_cast<int>(r.index(3));
  c.comparison_dim = 4 + static_cast<int>(r.index(5));
  c.classes = 7;
  std::vector<std::string> words;
  for (int i = 0; i < 6; ++i) words.push_back("w" + std::to_string(i));
  GradientCase out{Model::init(c, words, r.engine()()), {}};
  const std::size_t pairs = 1 + r.index(4);
  auto sentence = [&] {
    WordIds s(1 + r.index(6));
    for (int& w : s) w = static_cast<int>(r.index(words.size()));
    return s;
  };
  for (std::size_t i = 0; i < pairs; ++i) {
    out.batch.left.push_back(sentence());
    out.batch.right.push_back(sentence());
    out.batch.labels.push_back(static_cast<int>(r.index(7)));
  }
  return out;
}

}  // namespace entail::net
