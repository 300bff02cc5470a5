#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "entail/error.hpp"
#include "entail/net/model.hpp"

namespace entail::net {

struct AdaDelta {
  double rho = 0.95;
  double epsilon = 1e-6;
  // Running averages of squared gradients and squared updates, per slot.
  std::vector<Matrix> grad_sq, update_sq;

  void reset(const Model& m) {
    grad_sq.clear();
    update_sq.clear();
    for (const auto& t : m.tensors()) {
      grad_sq.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
      update_sq.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
    }
  }

  // One step:
  //   E[g²] ← ρE[g²] + (1-ρ)g²
  //   Δ = -sqrt(E[Δ²] + ε) / sqrt(E[g²] + ε) · g
  //   E[Δ²] ← ρE[Δ²] + (1-ρ)Δ²
  // Frozen tensors are left alone.
  void step(Model& m, const Gradients& g) {
    if (grad_sq.size() != m.tensors().size()) reset(m);
    for (std::size_t s = 0; s < m.tensors().size(); ++s) {
      auto& t = m.tensors()[s];
      if (t.frozen || t.value.size() == 0) continue;
      const Matrix& gs = g.slots[s];
      if (gs.rows() != t.value.rows() || gs.cols() != t.value.cols())
        throw NumericError("gradient shape mismatch for " + t.name);
      if (!gs.allFinite()) throw NumericError("non-finite gradient for " + t.name);
      auto eg = grad_sq[s].array();
      auto ed = update_sq[s].array();
      eg = rho * eg + (1.0 - rho) * gs.array().square();
      const Eigen::ArrayXXd delta = -((ed + epsilon).sqrt() / (eg + epsilon).sqrt()) * gs.array();
      ed = rho * ed + (1.0 - rho) * delta.square();
      t.value.array() += delta;
      if (!t.value.allFinite()) throw NumericError("non-finite parameter after update: " + t.name);
    }
  }
};

}  // namespace entail::net
