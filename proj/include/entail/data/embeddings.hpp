#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "entail/error.hpp"

namespace entail::data {

// Word vectors read from a text file with one word per line followed by its
// components, separated by single spaces.
struct WordVectors {
  std::size_t dim = 0;
  std::map<std::string, std::vector<double>> vectors;

  bool contains(const std::string& w) const { return vectors.count(w) != 0; }
  const std::vector<double>& at(const std::string& w) const {
    auto it = vectors.find(w);
    if (it == vectors.end()) throw DataError("no vector for '" + w + "'");
    return it->second;
  }
};

// Reads the vectors of `wanted` (every word when empty). Lines whose width
// differs from `expected_dim` (when nonzero) are an error. With `require_all`,
// throws DataError listing the wanted words that the file lacks.
inline WordVectors read_word_vectors(const std::string& path, const std::set<std::string>& wanted = {},
                                     std::size_t expected_dim = 50, bool require_all = true) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read embedding file " + path);
  WordVectors out;
  out.dim = expected_dim;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto space = line.find(' ');
    if (space == std::string::npos) continue;
    std::string word = line.substr(0, space);
    if (!wanted.empty() && !wanted.count(word)) continue;
    std::vector<double> v;
    const char* p = line.c_str() + space;
    char* end = nullptr;
    while (true) {
      const double x = std::strtod(p, &end);
      if (end == p) break;
      v.push_back(x);
      p = end;
    }
    if (out.dim == 0) out.dim = v.size();
    if (v.size() != out.dim)
      throw DataError(path + ":" + std::to_string(number) + ": expected " + std::to_string(out.dim) +
                      " components, got " + std::to_string(v.size()));
    out.vectors.emplace(std::move(word), std::move(v));
    if (!wanted.empty() && out.vectors.size() == wanted.size()) break;
  }
  if (!require_all) return out;
  std::string missing;
  for (const auto& w : wanted)
    if (!out.contains(w)) missing += (missing.empty() ? "" : ", ") + w;
  if (!missing.empty()) throw DataError("embedding file " + path + " lacks: " + missing);
  return out;
}

// 1 - cosine similarity.
inline double cos_dist(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DataError("cosine distance of vectors of different sizes");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) throw DataError("cosine distance with a zero vector");
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace entail::data
