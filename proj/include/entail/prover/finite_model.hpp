#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "entail/fol/clausify.hpp"

namespace entail::prover {

// Interpretation over the domain {0, ..., size-1}. Predicate and function
// tables are indexed by the mixed-radix encoding of the argument tuple.
struct FiniteModel {
  int domain_size = 1;
  std::map<std::string, int> predicate_arity;
  std::map<std::string, std::vector<bool>> predicates;
  std::map<int, int> function_arity;
  std::map<int, std::vector<int>> functions;

  std::size_t encode(const std::vector<int>& args) const {
    std::size_t code = 0;
    for (int a : args) code = code * domain_size + a;
    return code;
  }

  int value(const fol::Term& t, const std::vector<int>& assignment) const {
    if (t.is_var()) return assignment.at(t.id);
    std::vector<int> args;
    for (const auto& a : t.args) args.push_back(value(a, assignment));
    return functions.at(t.id).at(encode(args));
  }

  bool holds(const fol::Literal& l, const std::vector<int>& assignment) const {
    std::vector<int> args;
    for (const auto& a : l.args) args.push_back(value(a, assignment));
    auto it = predicates.find(l.predicate);
    // Predicates the model never mentions are empty.
    const bool atom = it != predicates.end() && it->second.at(encode(args));
    return atom == l.positive;
  }

  // True when every assignment of the clause's variables satisfies some literal.
  bool satisfies(const fol::Clause& c) const {
    std::set<int> vars;
    for (const auto& l : c.literals)
      for (const auto& t : l.args) fol::collect_vars(t, vars);
    int max_var = vars.empty() ? -1 : *vars.rbegin();
    std::vector<int> assignment(max_var + 1, 0);
    std::vector<int> order(vars.begin(), vars.end());
    while (true) {
      bool ok = false;
      for (const auto& l : c.literals)
        if (holds(l, assignment)) {
          ok = true;
          break;
        }
      if (!ok) return false;
      std::size_t k = 0;
      for (; k < order.size(); ++k) {
        if (++assignment[order[k]] < domain_size) break;
        assignment[order[k]] = 0;
      }
      if (k == order.size()) return true;
    }
  }

  bool satisfies(const std::vector<fol::Clause>& cs) const {
    for (const auto& c : cs)
      if (!satisfies(c)) return false;
    return true;
  }

  std::string describe() const {
    std::ostringstream out;
    out << "domain {0.." << domain_size - 1 << "}\n";
    for (const auto& [name, table] : predicates) {
      const int arity = predicate_arity.at(name);
      out << "  " << name << " = {";
      bool first = true;
      for (std::size_t code = 0; code < table.size(); ++code) {
        if (!table[code]) continue;
        out << (first ? "" : ", ");
        first = false;
        std::vector<int> args(arity);
        std::size_t rest = code;
        for (int i = arity - 1; i >= 0; --i) {
          args[i] = static_cast<int>(rest % domain_size);
          rest /= domain_size;
        }
        if (arity == 1) {
          out << args[0];
        } else {
          out << "(";
          for (int i = 0; i < arity; ++i) out << (i ? "," : "") << args[i];
          out << ")";
        }
      }
      out << "}\n";
    }
    for (const auto& [id, table] : functions) {
      const int arity = function_arity.at(id);
      out << "  " << (arity == 0 ? "c" : "f") << id << " = ";
      if (arity == 0) {
        out << table.at(0) << "\n";
        continue;
      }
      out << "[";
      for (std::size_t i = 0; i < table.size(); ++i) out << (i ? " " : "") << table[i];
      out << "]\n";
    }
    return out.str();
  }
};

}  // namespace entail::prover
