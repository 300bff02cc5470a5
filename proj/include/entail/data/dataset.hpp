#pragma once

#include <array>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "entail/error.hpp"
#include "entail/lang/relation.hpp"
#include "entail/lang/sentence.hpp"
#include "entail/lang/vocabulary.hpp"

namespace entail::data {

struct LabeledPair {
  Relation relation = Relation::Independence;
  Sentence left;
  Sentence right;

  bool operator==(const LabeledPair&) const = default;
};

using Dataset = std::vector<LabeledPair>;

inline std::string format_record(const LabeledPair& p) {
  std::string out(symbol(p.relation));
  out += '\t';
  out += render(p.left);
  out += '\t';
  out += render(p.right);
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

// Parses one `relation<TAB>left<TAB>right` line. Spaces around fields are
// ignored. With a vocabulary the sentences must use its words; without one
// any word fits a slot (substituted test sets).
inline LabeledPair parse_record(std::string_view line, const Vocabulary* vocab = nullptr) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(detail::trim(line.substr(start, tab == std::string_view::npos ? tab : tab - start)));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (fields.size() != 3)
    throw DataError("expected 3 tab-separated fields, got " + std::to_string(fields.size()));
  LabeledPair p;
  p.relation = parse_relation(fields[0]);
  try {
    p.left = vocab ? parse(fields[1], *vocab) : parse_shape(fields[1]);
    p.right = vocab ? parse(fields[2], *vocab) : parse_shape(fields[2]);
  } catch (const ParseError& e) {
    throw DataError(std::string("bad sentence: ") + e.what());
  }
  return p;
}

inline void write_dataset(const Dataset& ds, std::ostream& out) {
  for (const auto& p : ds) out << format_record(p) << '\n';
}

inline void write_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  write_dataset(ds, out);
  if (!out) throw DataError("write failed: " + path);
}

inline Dataset read_dataset(std::istream& in, const std::string& name = "<stream>",
                            const Vocabulary* vocab = nullptr) {
  Dataset ds;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (detail::trim(line).empty()) continue;
    try {
      ds.push_back(parse_record(line, vocab));
    } catch (const DataError& e) {
      throw DataError(name + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return ds;
}

inline Dataset read_dataset(const std::string& path, const Vocabulary* vocab = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  return read_dataset(in, path, vocab);
}

using Distribution = std::array<double, kRelationCount>;

// Relative frequency of each relation, indexed by index_of(Relation).
inline Distribution class_distribution(const Dataset& ds) {
  if (ds.empty()) throw DataError("class distribution of an empty dataset");
  Distribution d{};
  for (const auto& p : ds) d[index_of(p.relation)] += 1.0;
  for (auto& x : d) x /= static_cast<double>(ds.size());
  return d;
}

inline std::array<std::size_t, kRelationCount> class_counts(const Dataset& ds) {
  std::array<std::size_t, kRelationCount> c{};
  for (const auto& p : ds) ++c[index_of(p.relation)];
  return c;
}

// relation<TAB>train_freq<TAB>test_freq, one row per relation.
inline std::string format_distribution(const Distribution& train, const Distribution& test) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(6);
  out << "relation\ttrain_freq\ttest_freq\n";
  for (std::size_t k = 0; k < kRelationCount; ++k)
    out << symbol(relation_at(k)) << '\t' << train[k] << '\t' << test[k] << '\n';
  return out.str();
}

}  // namespace entail::data
