#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "entail/error.hpp"
#include "entail/net/adadelta.hpp"
#include "entail/net/model.hpp"

namespace entail::net {

inline constexpr int kCheckpointVersion = 1;
inline constexpr char kCheckpointMagic[8] = {'E', 'N', 'T', 'A', 'I', 'L', 'C', 'K'};

struct Checkpoint {
  Model model;
  AdaDelta optimizer;
  int epoch = 0;
  std::string rng_state;   // textual engine state of the shuffling stream
  nlohmann::json config;   // echo of the run configuration
};

inline nlohmann::json config_to_json(const ModelConfig& c) {
  return {{"cell", std::string(cell_name(c.cell))},
          {"hidden", c.hidden},
          {"embedding_dim", c.embedding_dim},
          {"sentence_dim", c.sentence_dim},
          {"comparison_dim", c.comparison_dim},
          {"classes", c.classes},
          {"leaky_slope", c.leaky_slope},
          {"frozen_embeddings", c.frozen_embeddings}};
}

inline ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.cell = parse_cell(j.at("cell").get<std::string>());
  c.hidden = j.at("hidden");
  c.embedding_dim = j.at("embedding_dim");
  c.sentence_dim = j.at("sentence_dim");
  c.comparison_dim = j.at("comparison_dim");
  c.classes = j.at("classes");
  c.leaky_slope = j.at("leaky_slope");
  c.frozen_embeddings = j.at("frozen_embeddings");
  return c;
}

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw DataError("truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

// Column-major doubles, little-endian.
inline void put_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index k = 0; k < m.size(); ++k) put_u64(out, std::bit_cast<std::uint64_t>(m.data()[k]));
}

inline void get_matrix(std::istream& in, Matrix& m) {
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = std::bit_cast<double>(get_u64(in));
}

}  // namespace detail

// Layout: 8-byte magic, u64 header length, JSON header, then every tensor and
// (when present) both optimizer accumulators per tensor, in slot order.
inline void save_checkpoint(const Checkpoint& ck, std::ostream& out) {
  const Model& m = ck.model;
  nlohmann::json header;
  header["version"] = kCheckpointVersion;
  header["model"] = config_to_json(m.config());
  header["words"] = m.words();
  header["epoch"] = ck.epoch;
  header["rng_state"] = ck.rng_state;
  header["config"] = ck.config;
  const bool has_opt = ck.optimizer.grad_sq.size() == m.tensors().size();
  header["optimizer"] = has_opt ? nlohmann::json{{"kind", "adadelta"}, {"rho", ck.optimizer.rho}, {"epsilon", ck.optimizer.epsilon}}
                                : nlohmann::json(nullptr);
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& t : m.tensors())
    tensors.push_back({{"name", t.name}, {"rows", t.value.rows()}, {"cols", t.value.cols()}, {"frozen", t.frozen}});
  header["tensors"] = tensors;
  const std::string text = header.dump();
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  detail::put_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& t : m.tensors()) detail::put_matrix(out, t.value);
  if (has_opt)
    for (std::size_t s = 0; s < m.tensors().size(); ++s) {
      detail::put_matrix(out, ck.optimizer.grad_sq[s]);
      detail::put_matrix(out, ck.optimizer.update_sq[s]);
    }
}

inline void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  save_checkpoint(ck, out);
  if (!out) throw DataError("write failed: " + path);
}

inline Checkpoint load_checkpoint(std::istream& in) {
  char magic[sizeof kCheckpointMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw DataError("not a checkpoint file");
  const std::uint64_t length = detail::get_u64(in);
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length))) throw DataError("truncated checkpoint header");
  Checkpoint ck;
  try {
    const auto header = nlohmann::json::parse(text);
    if (header.at("version") != kCheckpointVersion) throw DataError("unsupported checkpoint version");
    const ModelConfig config = config_from_json(header.at("model"));
    std::vector<Tensor> tensors;
    for (const auto& t : header.at("tensors")) {
      Tensor x;
      x.name = t.at("name");
      x.frozen = t.at("frozen");
      x.value.resize(t.at("rows").get<Eigen::Index>(), t.at("cols").get<Eigen::Index>());
      detail::get_matrix(in, x.value);
      tensors.push_back(std::move(x));
    }
    ck.model = Model::assemble(config, header.at("words").get<std::vector<std::string>>(), std::move(tensors));
    ck.epoch = header.at("epoch");
    ck.rng_state = header.at("rng_state");
    ck.config = header.at("config");
    if (!header.at("optimizer").is_null()) {
      ck.optimizer.rho = header["optimizer"].at("rho");
      ck.optimizer.epsilon = header["optimizer"].at("epsilon");
      ck.optimizer.reset(ck.model);
      for (std::size_t s = 0; s < ck.model.tensors().size(); ++s) {
        detail::get_matrix(in, ck.optimizer.grad_sq[s]);
        detail::get_matrix(in, ck.optimizer.update_sq[s]);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad checkpoint header: ") + e.what());
  }
  return ck;
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  return load_checkpoint(in);
}

}  // namespace entail::net
