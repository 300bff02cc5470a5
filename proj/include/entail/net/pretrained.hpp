#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "entail/data/embeddings.hpp"
#include "entail/error.hpp"
#include "entail/net/model.hpp"

namespace entail::net {

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Vectors for `words` from a pretrained file. A word missing verbatim falls
// back to its lowercase form, since common pretrained files are lowercased.
// Throws DataError naming every word found in neither form. A `dim` of 0
// takes the file's dimension.
inline std::map<std::string, Vector> load_pretrained_embeddings(const std::string& path,
                                                                const std::vector<std::string>& words,
                                                                std::size_t dim = 0) {
  std::set<std::string> wanted;
  for (const auto& w : words) {
    wanted.insert(w);
    wanted.insert(lowercase(w));
  }
  const data::WordVectors file = data::read_word_vectors(path, wanted, dim, false);
  std::map<std::string, Vector> out;
  std::string missing;
  for (const auto& w : words) {
    const std::string* key = file.contains(w) ? &w : nullptr;
    const std::string lower = lowercase(w);
    if (!key && file.contains(lower)) key = &lower;
    if (!key) {
      missing += (missing.empty() ? "" : ", ") + w;
      continue;
    }
    const auto& v = file.at(*key);
    out.emplace(w, Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  if (!missing.empty()) throw DataError("embedding file " + path + " lacks: " + missing);
  return out;
}

inline double cos_dist(const Vector& a, const Vector& b) {
  return data::cos_dist(std::vector<double>(a.data(), a.data() + a.size()),
                        std::vector<double>(b.data(), b.data() + b.size()));
}

// Fresh model whose embedding table is the given pretrained vectors, frozen.
inline Model init_with_pretrained(ModelConfig config, const std::vector<std::string>& words,
                                  const std::map<std::string, Vector>& vectors, std::uint64_t seed) {
  if (vectors.empty()) throw DataError("no pretrained vectors");
  config.embedding_dim = static_cast<int>(vectors.begin()->second.size());
  config.frozen_embeddings = true;
  Model m = Model::init(config, words, seed);
  for (const auto& w : words) {
    auto it = vectors.find(w);
    if (it == vectors.end()) throw DataError("no pretrained vector for '" + w + "'");
    m.set_embedding(w, it->second);
  }
  return m;
}

}  // namespace entail::net
