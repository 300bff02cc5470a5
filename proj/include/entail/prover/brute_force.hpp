#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "entail/error.hpp"
#include "entail/fol/axioms.hpp"
#include "entail/fol/formula.hpp"
#include "entail/lang/relation.hpp"

namespace entail::prover {

// Every interpretation of a fixed set of predicates over the domain
// {0..n-1}, enumerated as bit masks with one bit per ground atom. Formulas are
// evaluated directly (no clausification) on 64 interpretations at a time.
class InterpretationSpace {
 public:
  InterpretationSpace(const std::map<std::string, int>& predicates, int domain_size) : n_(domain_size) {
    for (const auto& [name, arity] : predicates) {
      base_[name] = bits_;
      int atoms = 1;
      for (int i = 0; i < arity; ++i) atoms *= n_;
      bits_ += atoms;
    }
    if (bits_ > 40) throw ConfigError("interpretation space too large to enumerate");
  }

  int atom_bits() const { return bits_; }
  std::uint64_t count() const { return std::uint64_t{1} << bits_; }
  std::size_t words() const { return bits_ <= 6 ? 1 : std::size_t{1} << (bits_ - 6); }

  // Bitset over interpretations: bit i of word w is the truth value of f in
  // interpretation 64*w + i. Lanes past count() are zero.
  std::vector<std::uint64_t> truth(const fol::Formula& f) const {
    std::vector<Node> nodes;
    compile(f, nodes);
    std::vector<std::uint64_t> out(words());
    std::array<int, 16> env{};
    const std::uint64_t valid = bits_ >= 6 ? ~std::uint64_t{0} : (std::uint64_t{1} << (1u << bits_)) - 1;
    for (std::size_t w = 0; w < out.size(); ++w) out[w] = eval(nodes, 0, env, w) & valid;
    return out;
  }

 private:
  using Kind = fol::Formula::Kind;

  // Flattened formula with predicate offsets resolved.
  struct Node {
    Kind kind;
    int left = -1, right = -1;
    int var = 0;
    int base = 0;
    std::vector<int> args;
  };

  int compile(const fol::Formula& f, std::vector<Node>& nodes) const {
    const int at = static_cast<int>(nodes.size());
    nodes.push_back({f.kind()});
    switch (f.kind()) {
      case Kind::Atom: {
        auto it = base_.find(f.predicate());
        if (it == base_.end()) throw ConfigError("brute force: unknown predicate " + f.predicate());
        nodes[at].base = it->second;
        for (const auto& t : f.args()) {
          if (!t.is_var()) throw ConfigError("brute force evaluation takes function-free formulas");
          if (t.id >= 16) throw ConfigError("brute force: too many variables");
          nodes[at].args.push_back(t.id);
        }
        break;
      }
      case Kind::Not: {
        const int c = compile(f.child(), nodes);
        nodes[at].left = c;
        break;
      }
      case Kind::And:
      case Kind::Or:
      case Kind::Implies: {
        const int l = compile(f.child(0), nodes);
        const int r = compile(f.child(1), nodes);
        nodes[at].left = l;
        nodes[at].right = r;
        break;
      }
      case Kind::Forall:
      case Kind::Exists: {
        if (f.var() >= 16) throw ConfigError("brute force: too many variables");
        nodes[at].var = f.var();
        const int c = compile(f.child(), nodes);
        nodes[at].left = c;
        break;
      }
    }
    return at;
  }

  static std::uint64_t lane_pattern(int k) {
    // Lane i carries bit k of i.
    static const std::uint64_t patterns[6] = {0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull,
                                              0xF0F0F0F0F0F0F0F0ull, 0xFF00FF00FF00FF00ull,
                                              0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
    return patterns[k];
  }

  std::uint64_t eval(const std::vector<Node>& nodes, int i, std::array<int, 16>& env, std::size_t w) const {
    const Node& node = nodes[static_cast<std::size_t>(i)];
    switch (node.kind) {
      case Kind::Atom: {
        int code = 0;
        for (int v : node.args) code = code * n_ + env[static_cast<std::size_t>(v)];
        const int k = node.base + code;
        if (k < 6) return lane_pattern(k);
        return ((w >> (k - 6)) & 1) ? ~std::uint64_t{0} : 0;
      }
      case Kind::Not: return ~eval(nodes, node.left, env, w);
      case Kind::And: return eval(nodes, node.left, env, w) & eval(nodes, node.right, env, w);
      case Kind::Or: return eval(nodes, node.left, env, w) | eval(nodes, node.right, env, w);
      case Kind::Implies: return ~eval(nodes, node.left, env, w) | eval(nodes, node.right, env, w);
      case Kind::Forall:
      case Kind::Exists: {
        auto& slot = env[static_cast<std::size_t>(node.var)];
        const int saved = slot;
        const bool all = node.kind == Kind::Forall;
        std::uint64_t acc = all ? ~std::uint64_t{0} : 0;
        for (int e = 0; e < n_; ++e) {
          slot = e;
          const std::uint64_t v = eval(nodes, node.left, env, w);
          acc = all ? (acc & v) : (acc | v);
        }
        slot = saved;
        return acc;
      }
    }
    return 0;
  }

  int n_;
  int bits_ = 0;
  std::map<std::string, int> base_;
};

// Relation between φ and ψ computed by enumerating every interpretation of
// their predicates (and those of the axioms) over domains of size
// 1..max_domain. Throws ConfigError when the total number of interpretations
// exceeds `max_interpretations`.
class BruteForceOracle {
 public:
  BruteForceOracle(const std::map<std::string, int>& predicates, int max_domain,
                   std::uint64_t max_interpretations = std::uint64_t{1} << 26) {
    std::uint64_t total = 0;
    for (int n = 1; n <= max_domain; ++n) {
      InterpretationSpace space(predicates, n);
      total += space.count();
      if (total > max_interpretations)
        throw ConfigError("brute force: more than " + std::to_string(max_interpretations) +
                          " interpretations up to domain size " + std::to_string(n));
      spaces_.push_back(std::move(space));
    }
  }

  using Table = std::vector<std::vector<std::uint64_t>>;  // per domain size

  Table truth(const fol::Formula& f) const {
    Table t;
    for (const auto& s : spaces_) t.push_back(s.truth(f));
    return t;
  }

  Table all_true() const {
    Table t;
    for (const auto& s : spaces_) {
      t.emplace_back(s.words(), ~std::uint64_t{0});
      if (s.atom_bits() < 6) t.back()[0] = (std::uint64_t{1} << (1u << s.atom_bits())) - 1;
    }
    return t;
  }

  Table truth(const fol::AxiomSet& axioms) const {
    Table t = all_true();
    for (const auto& a : axioms) {
      Table ta = truth(a.formula);
      for (std::size_t n = 0; n < t.size(); ++n)
        for (std::size_t w = 0; w < t[n].size(); ++w) t[n][w] &= ta[n][w];
    }
    return t;
  }

  // Four satisfiability bits from precomputed truth tables. Lanes outside the
  // enumerated range are zero in the axiom table, which masks them out.
  static Relation label(const Table& phi, const Table& psi, const Table& axioms) {
    bool b[4] = {false, false, false, false};
    for (std::size_t n = 0; n < phi.size(); ++n)
      for (std::size_t w = 0; w < phi[n].size(); ++w) {
        const std::uint64_t a = axioms[n][w], x = phi[n][w], y = psi[n][w];
        b[0] |= (a & x & y) != 0;
        b[1] |= (a & x & ~y) != 0;
        b[2] |= (a & ~x & y) != 0;
        b[3] |= (a & ~x & ~y) != 0;
        if (b[0] && b[1] && b[2] && b[3]) return Relation::Independence;
      }
    return relation_from_bits(b[0], b[1], b[2], b[3]);
  }

 private:
  std::vector<InterpretationSpace> spaces_;
};

inline Relation brute_force_label(const fol::Formula& phi, const fol::Formula& psi, const fol::AxiomSet& axioms,
                                  int max_domain, std::uint64_t max_interpretations = std::uint64_t{1} << 26) {
  std::map<std::string, int> preds;
  fol::collect_predicates(phi, preds);
  fol::collect_predicates(psi, preds);
  for (const auto& a : axioms) fol::collect_predicates(a.formula, preds);
  BruteForceOracle oracle(preds, max_domain, max_interpretations);
  return BruteForceOracle::label(oracle.truth(phi), oracle.truth(psi), oracle.truth(axioms));
}

}  // namespace entail::prover
