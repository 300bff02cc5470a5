#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "entail/data/dataset.hpp"
#include "entail/data/generate.hpp"
#include "entail/data/substitution.hpp"
#include "entail/error.hpp"
#include "entail/fol/axioms.hpp"
#include "entail/fol/translate.hpp"
#include "entail/lang/taxonomy.hpp"
#include "entail/net/checkpoint.hpp"
#include "entail/net/pretrained.hpp"
#include "entail/net/train.hpp"
#include "entail/prover/classify.hpp"

namespace entail::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kData = 3, kUndecided = 4, kNumeric = 5 };

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kConfig;
  if (dynamic_cast<const ParseError*>(&e)) return kData;
  if (dynamic_cast<const DataError*>(&e)) return kData;
  if (dynamic_cast<const UndecidedError*>(&e)) return kUndecided;
  if (dynamic_cast<const NumericError*>(&e)) return kNumeric;
  return kFailure;
}

inline Taxonomy load_taxonomy(const std::string& path) {
  return path.empty() ? Taxonomy::default_taxonomy() : Taxonomy::load(path);
}

inline std::filesystem::path prepare_out(const std::string& dir) {
  if (dir.empty()) throw ConfigError("--out is required");
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

// The full configuration of a run, written next to its outputs.
inline void write_run_config(const std::filesystem::path& dir, const nlohmann::json& config) {
  write_text(dir / "run_config.json", config.dump(2) + "\n");
}

inline nlohmann::json limits_json(const prover::ProverLimits& l) {
  return {{"max_domain", l.max_domain},
          {"max_resolution_steps", l.max_resolution_steps},
          {"early_domain", l.early_domain},
          {"early_resolution_steps", l.early_resolution_steps}};
}

// ---- generate ---------------------------------------------------------------

struct GenerateOptions {
  std::string taxonomy;  // empty: built-in default
  data::SplitSpec spec;
  prover::ProverLimits limits;
  double max_undecided_rate = 0.001;
  std::string out;
};

inline nlohmann::json to_json(const GenerateOptions& o) {
  auto lengths = [](const std::optional<std::set<int>>& l) {
    return l ? nlohmann::json(std::vector<int>(l->begin(), l->end())) : nlohmann::json(nullptr);
  };
  return {{"subcommand", "generate"},
          {"taxonomy", o.taxonomy.empty() ? "<default>" : o.taxonomy},
          {"train", o.spec.train_size},
          {"test", o.spec.test_size},
          {"train_lengths", lengths(o.spec.train_lengths)},
          {"test_lengths", lengths(o.spec.test_lengths)},
          {"seed", o.spec.seed},
          {"independence_cap", o.spec.independence_cap},
          {"five_neg_slots", o.spec.policy.object_determiner_negation},
          {"prover", limits_json(o.limits)},
          {"max_undecided_rate", o.max_undecided_rate}};
}

inline int cmd_generate(const GenerateOptions& o, std::ostream& log) {
  const Taxonomy taxonomy = load_taxonomy(o.taxonomy);
  const auto dir = prepare_out(o.out);
  write_run_config(dir, to_json(o));
  auto splits = data::generate_dataset(o.spec, taxonomy, o.limits, [&log](const std::string& m) { log << m << '\n'; });
  data::write_dataset(splits.train, (dir / "train.tsv").string());
  data::write_dataset(splits.test, (dir / "test.tsv").string());
  write_text(dir / "distribution.tsv",
             data::format_distribution(data::class_distribution(splits.train), data::class_distribution(splits.test)));
  const auto& r = splits.report;
  std::ostringstream g;
  g << "candidates\t" << r.candidates << "\nduplicates\t" << r.duplicates << "\ncapped_independent\t" << r.capped
    << "\nundecided\t" << r.undecided.size() << "\nseconds\t" << std::fixed << std::setprecision(1) << r.seconds << '\n';
  for (const auto& u : r.undecided)
    g << "UNDECIDED\t" << render(u.left) << '\t' << render(u.right) << '\t' << u.left_formula << '\t'
      << u.right_formula << '\t' << u.reason << '\n';
  write_text(dir / "generation.log", g.str());
  log << "train " << splits.train.size() << ", test " << splits.test.size() << ", undecided " << r.undecided.size()
      << " of " << (r.candidates - r.duplicates) << " labeled candidates\n";
  if (r.undecided_rate() > o.max_undecided_rate)
    throw UndecidedError("undecided rate " + std::to_string(r.undecided_rate()) + " exceeds " +
                         std::to_string(o.max_undecided_rate));
  return kOk;
}

// ---- prove ------------------------------------------------------------------

struct ProveOptions {
  std::string taxonomy;
  std::string left, right;
  bool explain = false;
  prover::ProverLimits limits;
};

inline int cmd_prove(const ProveOptions& o, std::ostream& out) {
  const Taxonomy taxonomy = load_taxonomy(o.taxonomy);
  auto parse_side = [&](const std::string& text, const char* side) {
    try {
      return parse(text, taxonomy.vocabulary());
    } catch (const ParseError& e) {
      const std::string what = e.what();
      throw ParseError(e.position(), std::string(side) + " sentence: " + what.substr(what.find(": ") + 2));
    }
  };
  const Sentence left = parse_side(o.left, "left"), right = parse_side(o.right, "right");
  const fol::Formula phi = fol::translate(left), psi = fol::translate(right);
  const fol::AxiomSet axioms = fol::filter_axioms(fol::compile_axioms(taxonomy), phi, psi);
  const auto d = prover::classify_pair(phi, psi, axioms, o.limits);
  if (o.explain) {
    out << "phi: " << fol::to_string(phi) << "\npsi: " << fol::to_string(psi) << "\naxioms:\n";
    for (const auto& a : axioms) out << "  " << fol::to_string(a.formula) << '\n';
    static const char* names[4] = {"b1 SAT(A, phi, psi)", "b2 SAT(A, phi, -psi)", "b3 SAT(A, -phi, psi)",
                                   "b4 SAT(A, -phi, -psi)"};
    for (int b = 0; b < 4; ++b) {
      out << names[b] << " = " << prover::status_name(d.bits[b]) << '\n';
      if (!d.verdicts[b]) continue;
      const auto& v = *d.verdicts[b];
      if (v.model) {
        std::istringstream lines(v.model->describe());
        for (std::string line; std::getline(lines, line);) out << "    " << line << '\n';
      } else if (v.refutation) {
        std::istringstream lines(prover::to_string(*v.refutation));
        for (std::string line; std::getline(lines, line);) out << "    " << line << '\n';
      } else {
        out << "    " << v.exhausted << '\n';
      }
    }
  }
  if (!d.relation) throw UndecidedError("the prover could not decide this pair within its limits");
  out << symbol(*d.relation) << '\n';
  return kOk;
}

// ---- train ------------------------------------------------------------------

struct TrainOptions {
  std::string train_path, test_path;
  net::ModelConfig model;
  net::TrainConfig train;
  int runs = 1;
  unsigned jobs = 1;
  std::string embeddings;  // pretrained vectors; frozen when given
  std::string out;
};

inline nlohmann::json to_json(const TrainOptions& o) {
  return {{"subcommand", "train"},
          {"train_file", o.train_path},
          {"test_file", o.test_path},
          {"model", net::config_to_json(o.model)},
          {"epochs", o.train.epochs},
          {"batch", o.train.batch_size},
          {"seed", o.train.seed},
          {"rho", o.train.rho},
          {"epsilon", o.train.epsilon},
          {"runs", o.runs},
          {"embeddings", o.embeddings}};
}

struct RunSummary {
  std::uint64_t seed = 0;
  double train_acc = 0.0, test_acc = 0.0;
};

inline std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
  return {mean, sd};
}

inline void write_eval(const std::filesystem::path& dir, const std::string& prefix, const net::EvalResult& r) {
  write_text(dir / (prefix + "confusion_normalized.tsv"), r.confusion.format_row_normalized());
  write_text(dir / (prefix + "confusion_errors.tsv"), r.confusion.format_errors());
}

// Trains `runs` models with seeds seed, seed+1, ... Each run gets its own
// directory with a metrics log, checkpoint and confusion matrices; summary.tsv
// holds the per-run accuracies and their mean and standard deviation.
inline std::vector<RunSummary> cmd_train(const TrainOptions& o, std::ostream& log) {
  if (o.runs < 1) throw ConfigError("--runs must be at least 1");
  const auto dir = prepare_out(o.out);
  write_run_config(dir, to_json(o));
  const data::Dataset train = data::read_dataset(o.train_path);
  data::Dataset test;
  if (!o.test_path.empty()) test = data::read_dataset(o.test_path);
  const auto words = net::dataset_words({&train, &test});
  std::map<std::string, net::Vector> pretrained;
  if (!o.embeddings.empty()) pretrained = net::load_pretrained_embeddings(o.embeddings, words);

  std::vector<RunSummary> runs(static_cast<std::size_t>(o.runs));
  std::mutex log_mutex;
  auto run_one = [&](int k) {
    net::TrainConfig tc = o.train;
    tc.seed = o.train.seed + static_cast<std::uint64_t>(k);
    const auto run_dir = dir / ("run_" + std::to_string(tc.seed));
    std::filesystem::create_directories(run_dir);
    net::Model model = pretrained.empty() ? net::Model::init(o.model, words, tc.seed)
                                          : net::init_with_pretrained(o.model, words, pretrained, tc.seed);
    std::ofstream metrics(run_dir / "metrics.tsv", std::ios::binary);
    metrics << net::metrics_header();
    auto result = net::train(std::move(model), train, test.empty() ? nullptr : &test, tc,
                             [&](const net::EpochMetrics& m) {
                               metrics << net::format_metrics(m) << std::flush;
                               std::ostringstream line;
                               line << cell_name(o.model.cell) << " seed " << tc.seed << " epoch " << m.epoch
                                    << std::fixed << std::setprecision(4) << " loss " << m.loss << " train "
                                    << m.train_acc << " test " << m.test_acc << std::setprecision(1) << " ("
                                    << m.seconds << "s)\n";
                               std::lock_guard lock(log_mutex);
                               log << line.str();
                             });
    result.checkpoint.config = to_json(o);
    result.checkpoint.config["seed"] = tc.seed;
    net::save_checkpoint(result.checkpoint, (run_dir / "checkpoint.bin").string());
    write_eval(run_dir, "train_", result.train);
    if (!test.empty()) write_eval(run_dir, "test_", result.test);
    runs[k] = {tc.seed, result.train.accuracy, test.empty() ? std::nan("") : result.test.accuracy};
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(o.jobs, static_cast<unsigned>(o.runs)));
  if (jobs == 1) {
    for (int k = 0; k < o.runs; ++k) run_one(k);
  } else {
    data::detail::parallel_for(static_cast<std::size_t>(o.runs), jobs, [&](std::size_t k) { run_one(static_cast<int>(k)); });
  }

  std::vector<double> tr, te;
  std::ostringstream s;
  s << "run\tseed\ttrain_acc\ttest_acc\n" << std::fixed << std::setprecision(4);
  for (std::size_t k = 0; k < runs.size(); ++k) {
    s << k << '\t' << runs[k].seed << '\t' << 100 * runs[k].train_acc << '\t' << 100 * runs[k].test_acc << '\n';
    tr.push_back(100 * runs[k].train_acc);
    te.push_back(100 * runs[k].test_acc);
  }
  const auto [trm, trs] = mean_sd(tr);
  const auto [tem, tes] = mean_sd(te);
  s << "mean\t-\t" << trm << '\t' << tem << "\nsd\t-\t" << trs << '\t' << tes << '\n';
  write_text(dir / "summary.tsv", s.str());
  std::ostringstream line;
  line << std::fixed << std::setprecision(1) << cell_name(o.model.cell) << ": train " << trm << " ± " << trs
       << ", test " << tem << " ± " << tes << " over " << runs.size() << " run(s)\n";
  log << line.str();
  return runs;
}

// ---- eval -------------------------------------------------------------------

struct EvalOptions {
  std::string checkpoint, data, out;
};

inline net::EvalResult cmd_eval(const EvalOptions& o, std::ostream& log) {
  const auto ck = net::load_checkpoint(o.checkpoint);
  const auto ds = data::read_dataset(o.data);
  const auto r = net::evaluate(ck.model, ds);
  if (!o.out.empty()) {
    const auto dir = prepare_out(o.out);
    write_run_config(dir, {{"subcommand", "eval"}, {"checkpoint", o.checkpoint}, {"data", o.data}});
    write_eval(dir, "", r);
    write_text(dir / "eval.json",
               nlohmann::json{{"accuracy", r.accuracy}, {"loss", r.loss}, {"pairs", ds.size()}}.dump(2) + "\n");
  }
  std::ostringstream line;
  line << "accuracy " << std::fixed << std::setprecision(2) << 100 * r.accuracy << "% on " << ds.size() << " pairs\n";
  log << line.str();
  return r;
}

// ---- zeroshot ---------------------------------------------------------------

struct ZeroshotOptions {
  std::string checkpoint, test, sub, embeddings, taxonomy, out;
};

struct ZeroshotRow {
  std::string name;
  std::size_t pairs = 0;
  std::vector<double> cos_dist;  // per mapped word, in mapping order
  double before = 0.0, after = 0.0;
};

// Evaluates a model trained with frozen pretrained embeddings on the test
// pairs that mention the substituted words, before and after substitution.
inline std::vector<ZeroshotRow> cmd_zeroshot(const ZeroshotOptions& o, std::ostream& log) {
  const auto ck = net::load_checkpoint(o.checkpoint);
  if (!ck.model.config().frozen_embeddings)
    throw ConfigError("zero-shot evaluation needs a model trained on frozen pretrained embeddings");
  const Taxonomy taxonomy = load_taxonomy(o.taxonomy);
  const auto spec = data::load_substitution_spec(o.sub);
  const std::string path = o.embeddings.empty() ? spec.embedding_path : o.embeddings;
  if (path.empty()) throw ConfigError("no embedding file given");
  std::vector<std::string> needed;
  for (const auto& s : spec.substitutions)
    for (const auto& [from, to] : s.mapping) {
      needed.push_back(from);
      needed.push_back(to);
    }
  const auto vectors = net::load_pretrained_embeddings(path, needed, static_cast<std::size_t>(ck.model.config().embedding_dim));
  std::set<std::string> known;
  for (const auto& [w, v] : vectors) known.insert(w);
  const auto test = data::read_dataset(o.test);

  std::vector<ZeroshotRow> rows;
  for (const auto& sub : spec.substitutions) {
    const auto fragment = data::apply_substitution(test, sub, taxonomy.vocabulary(), &known);
    ZeroshotRow row;
    row.name = sub.name;
    row.pairs = fragment.original.size();
    net::Model extended = ck.model;
    for (const auto& [from, to] : sub.mapping) {
      row.cos_dist.push_back(net::cos_dist(vectors.at(from), vectors.at(to)));
      extended.set_embedding(to, vectors.at(to));
    }
    if (row.pairs) {
      row.before = net::evaluate(ck.model, fragment.original).accuracy;
      row.after = net::evaluate(extended, fragment.substituted).accuracy;
    }
    log << sub.name << ": " << row.pairs << " pairs, before " << 100 * row.before << ", after " << 100 * row.after
        << '\n';
    rows.push_back(std::move(row));
  }
  if (!o.out.empty()) {
    const auto dir = prepare_out(o.out);
    write_run_config(dir, {{"subcommand", "zeroshot"},
                           {"checkpoint", o.checkpoint},
                           {"test", o.test},
                           {"substitutions", o.sub},
                           {"embeddings", path}});
    std::ostringstream t;
    t << "substitution\tpairs\tcos_dist\tacc_before\tacc_after\n" << std::fixed;
    for (const auto& r : rows) {
      t << r.name << '\t' << r.pairs << '\t';
      for (std::size_t k = 0; k < r.cos_dist.size(); ++k) t << (k ? ";" : "") << std::setprecision(3) << r.cos_dist[k];
      t << '\t' << std::setprecision(2) << 100 * r.before << '\t' << 100 * r.after << '\n';
    }
    write_text(dir / "zeroshot.tsv", t.str());
  }
  return rows;
}

}  // namespace entail::cli
