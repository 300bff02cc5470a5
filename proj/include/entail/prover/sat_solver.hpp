#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <vector>

namespace entail::prover {

// Small DPLL solver with two watched literals and chronological backtracking.
// Literals are nonzero integers: +v / -v for variable v in [1, num_vars].
class SatSolver {
 public:
  explicit SatSolver(int num_vars)
      : num_vars_(num_vars), value_(num_vars + 1, kUnassigned), watches_(2 * (num_vars + 1)) {}

  int num_vars() const { return num_vars_; }

  void add_clause(std::vector<int> lits) {
    if (inconsistent_) return;
    // Drop duplicate literals; tautologies are satisfied trivially.
    std::vector<int> clean;
    for (int l : lits) {
      bool dup = false;
      for (int m : clean) {
        if (m == l) dup = true;
        if (m == -l) return;
      }
      if (!dup) clean.push_back(l);
    }
    if (clean.empty()) {
      inconsistent_ = true;
      return;
    }
    if (clean.size() == 1) {
      units_.push_back(clean[0]);
      return;
    }
    const int id = static_cast<int>(clauses_.size());
    clauses_.push_back(std::move(clean));
    watches_[code(clauses_[id][0])].push_back(id);
    watches_[code(clauses_[id][1])].push_back(id);
  }

  // Returns a satisfying assignment indexed by variable (index 0 unused), or
  // nullopt when the clauses are unsatisfiable.
  std::optional<std::vector<bool>> solve() {
    if (inconsistent_) return std::nullopt;
    for (int u : units_) {
      if (value_of(u) == kFalse) return std::nullopt;
      if (value_of(u) == kUnassigned) assign(u);
    }
    while (true) {
      if (!propagate()) {
        if (!backtrack()) return std::nullopt;
        continue;
      }
      int next_var = 1;
      while (next_var <= num_vars_ && value_[next_var] != kUnassigned) ++next_var;
      if (next_var > num_vars_) break;
      levels_.push_back({trail_.size(), false, -next_var});
      assign(-next_var);
    }
    std::vector<bool> model(num_vars_ + 1, false);
    for (int v = 1; v <= num_vars_; ++v) model[v] = value_[v] == kTrue;
    return model;
  }

 private:
  static constexpr std::int8_t kUnassigned = -1, kFalse = 0, kTrue = 1;

  struct Level {
    std::size_t trail_start;
    bool flipped;
    int decision;
  };

  static std::size_t code(int lit) { return 2 * static_cast<std::size_t>(std::abs(lit)) + (lit < 0); }

  std::int8_t value_of(int lit) const {
    const std::int8_t v = value_[std::abs(lit)];
    if (v == kUnassigned) return kUnassigned;
    return (lit > 0) == (v == kTrue) ? kTrue : kFalse;
  }

  void assign(int lit) {
    value_[std::abs(lit)] = lit > 0 ? kTrue : kFalse;
    trail_.push_back(lit);
  }

  bool propagate() {
    while (head_ < trail_.size()) {
      const int falsified = -trail_[head_++];
      auto& watch_list = watches_[code(falsified)];
      std::size_t keep = 0;
      bool conflict = false;
      for (std::size_t i = 0; i < watch_list.size(); ++i) {
        const int id = watch_list[i];
        if (conflict) {
          watch_list[keep++] = id;
          continue;
        }
        auto& c = clauses_[id];
        if (c[0] == falsified) std::swap(c[0], c[1]);
        // c[1] is the falsified watch.
        if (value_of(c[0]) == kTrue) {
          watch_list[keep++] = id;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k)
          if (value_of(c[k]) != kFalse) {
            std::swap(c[1], c[k]);
            watches_[code(c[1])].push_back(id);
            moved = true;
            break;
          }
        if (moved) continue;
        watch_list[keep++] = id;
        if (value_of(c[0]) == kFalse)
          conflict = true;
        else
          assign(c[0]);
      }
      watch_list.resize(keep);
      if (conflict) return false;
    }
    return true;
  }

  bool backtrack() {
    while (!levels_.empty()) {
      Level level = levels_.back();
      levels_.pop_back();
      for (std::size_t i = level.trail_start; i < trail_.size(); ++i)
        value_[std::abs(trail_[i])] = kUnassigned;
      trail_.resize(level.trail_start);
      head_ = trail_.size();
      if (!level.flipped) {
        levels_.push_back({trail_.size(), true, -level.decision});
        assign(-level.decision);
        return true;
      }
    }
    return false;
  }

  int num_vars_;
  bool inconsistent_ = false;
  std::vector<std::int8_t> value_;
  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<int> units_;
  std::vector<int> trail_;
  std::size_t head_ = 0;
  std::vector<Level> levels_;
};

}  // namespace entail::prover
