#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entail/cli/commands.hpp"

namespace {

using namespace entail;

void add_limits(CLI::App* app, prover::ProverLimits& limits) {
  app->add_option("--max-domain", limits.max_domain, "largest domain size tried by model search")
      ->check(CLI::Range(1, 6));
  app->add_option("--max-steps", limits.max_resolution_steps, "resolution step budget per problem");
}

std::optional<std::set<int>> length_set(const std::vector<int>& v) {
  if (v.empty()) return std::nullopt;
  return std::set<int>(v.begin(), v.end());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logical entailment corpus generation, prover and neural classifiers"};
  app.require_subcommand(1);

  cli::GenerateOptions gen;
  std::vector<int> train_lengths, test_lengths;
  auto* g = app.add_subcommand("generate", "label random sentence pairs and write train/test splits");
  g->add_option("--taxonomy", gen.taxonomy, "taxonomy JSON (default: built-in)")->check(CLI::ExistingFile);
  g->add_option("--train", gen.spec.train_size, "training pairs");
  g->add_option("--test", gen.spec.test_size, "test pairs");
  g->add_option("--seed", gen.spec.seed, "sampling seed");
  g->add_option("--train-lengths", train_lengths, "allowed sentence lengths for training pairs")->delimiter(',');
  g->add_option("--test-lengths", test_lengths, "allowed sentence lengths for test pairs")->delimiter(',');
  g->add_flag("--five-neg-slots", gen.spec.policy.object_determiner_negation,
              "also negate the object determiner");
  g->add_option("--independence-cap", gen.spec.independence_cap,
                "largest fraction of each split labeled # (1 = unrestricted)")
      ->check(CLI::Range(0.0, 1.0));
  g->add_option("--workers", gen.spec.workers, "labeling threads (0 = hardware concurrency)");
  g->add_option("--max-undecided-rate", gen.max_undecided_rate, "fail when more candidates stay undecided");
  g->add_option("--out", gen.out, "output directory")->required();
  add_limits(g, gen.limits);

  cli::ProveOptions prove;
  auto* p = app.add_subcommand("prove", "print the relation between two sentences");
  p->add_option("left", prove.left, "left sentence")->required();
  p->add_option("right", prove.right, "right sentence")->required();
  p->add_option("--taxonomy", prove.taxonomy, "taxonomy JSON (default: built-in)")->check(CLI::ExistingFile);
  p->add_flag("--explain", prove.explain, "show axioms, the four satisfiability checks and their witnesses");
  add_limits(p, prove.limits);

  cli::TrainOptions train;
  std::string data_dir, cell = "gru";
  auto* t = app.add_subcommand("train", "train entailment classifiers");
  t->add_option("--data", data_dir, "directory holding train.tsv and test.tsv");
  t->add_option("--train-file", train.train_path, "training pairs");
  t->add_option("--test-file", train.test_path, "test pairs");
  t->add_option("--model", cell, "srn, gru, lstm or sum");
  t->add_option("--epochs", train.train.epochs)->check(CLI::PositiveNumber);
  t->add_option("--batch", train.train.batch_size)->check(CLI::PositiveNumber);
  t->add_option("--seed", train.train.seed, "seed of the first run");
  t->add_option("--runs", train.runs, "independent runs with consecutive seeds")->check(CLI::PositiveNumber);
  t->add_option("--jobs", train.jobs, "runs trained at the same time")->check(CLI::PositiveNumber);
  t->add_option("--hidden", train.model.hidden, "recurrent state size")->check(CLI::PositiveNumber);
  t->add_option("--embedding-dim", train.model.embedding_dim)->check(CLI::PositiveNumber);
  t->add_option("--embeddings", train.embeddings, "pretrained word vectors; kept frozen")->check(CLI::ExistingFile);
  t->add_option("--out", train.out, "output directory")->required();

  cli::EvalOptions ev;
  auto* e = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  e->add_option("--checkpoint", ev.checkpoint)->required()->check(CLI::ExistingFile);
  e->add_option("--data", ev.data, "pairs to evaluate")->required()->check(CLI::ExistingFile);
  e->add_option("--out", ev.out, "directory for the confusion matrices");

  cli::ZeroshotOptions zs;
  auto* z = app.add_subcommand("zeroshot", "evaluate unseen words substituted into test pairs");
  z->add_option("--checkpoint", zs.checkpoint)->required()->check(CLI::ExistingFile);
  z->add_option("--test", zs.test, "test pairs")->required()->check(CLI::ExistingFile);
  z->add_option("--sub", zs.sub, "substitution spec JSON")->required()->check(CLI::ExistingFile);
  z->add_option("--embeddings", zs.embeddings, "word vectors (overrides the spec)");
  z->add_option("--taxonomy", zs.taxonomy, "taxonomy JSON (default: built-in)")->check(CLI::ExistingFile);
  z->add_option("--out", zs.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : cli::kConfig;
  }

  try {
    if (*g) {
      gen.spec.train_lengths = length_set(train_lengths);
      gen.spec.test_lengths = length_set(test_lengths);
      return cli::cmd_generate(gen, std::cerr);
    }
    if (*p) return cli::cmd_prove(prove, std::cout);
    if (*t) {
      train.model.cell = net::parse_cell(cell);
      if (!data_dir.empty()) {
        if (train.train_path.empty()) train.train_path = data_dir + "/train.tsv";
        if (train.test_path.empty()) train.test_path = data_dir + "/test.tsv";
      }
      if (train.train_path.empty()) throw ConfigError("give --data or --train-file");
      cli::cmd_train(train, std::cout);
      return cli::kOk;
    }
    if (*e) {
      cli::cmd_eval(ev, std::cout);
      return cli::kOk;
    }
    if (*z) {
      cli::cmd_zeroshot(zs, std::cout);
      return cli::kOk;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return cli::exit_code_for(err);
  }
  return cli::kFailure;
}
