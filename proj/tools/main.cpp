#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clonedet/log.hpp"
#include "clonedet/pipeline.hpp"
#include "clonedet/util.hpp"

namespace {

using clonedet::RunConfig;

// --config is applied before the regular parse so explicit flags win over
// values from the file.
std::optional<std::string> find_config_flag(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return std::nullopt;
}

void add_model_options(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--dim", config.embedding.dim, "Token vector size");
  cmd->add_option("--window", config.embedding.window, "Skip-gram context radius");
  cmd->add_option("--epochs", config.embedding.epochs, "Skip-gram training epochs");
  cmd->add_option("--learning-rate", config.embedding.learning_rate, "Initial learning rate");
  cmd->add_option("--negative-samples", config.embedding.negative_samples,
                  "Negative samples per pair (0 = exact softmax)");
  cmd->add_option("--min-count", config.embedding.min_count, "Vocabulary frequency cutoff");
  cmd->add_option("--target-ratio", config.sampling.target_ratio,
                  "Over-sampling target minority ratio");
  cmd->add_option("--strategy", [&config](const std::vector<std::string>& values) {
        const auto strategy = clonedet::oversample_strategy_from_string(values.front());
        if (!strategy) return false;
        config.sampling.strategy = *strategy;
        return true;
      },
      "Over-sampling strategy: random | duplicate-all");
  cmd->add_option("--trees", config.forest.n_trees, "Number of trees");
  cmd->add_option("--max-depth", config.forest.max_depth, "Tree depth limit (0 = unbounded)");
  cmd->add_option("--min-samples-leaf", config.forest.min_samples_leaf, "Leaf size parameter");
  cmd->add_option("--bootstrap-size", config.forest.bootstrap_size, "Bootstrap draws per tree");
  cmd->add_option("--bootstrap-cap-multiple", config.forest.bootstrap_cap_multiple,
                  "Cap bootstrap size at this multiple of the dataset (0 = no cap)");
  cmd->add_option("--features-per-split", config.forest.features_per_split,
                  "Candidate features per node (0 = sqrt of feature count)");
  cmd->add_option("--threads", config.forest.threads, "Worker threads for tree building");
}

// One master --seed plus per-component overrides.
struct SeedFlags {
  std::optional<std::uint64_t> master;

  void attach(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--seed", [this](const std::vector<std::string>& values) {
          master = std::stoull(values.front());
          return true;
        },
        "Master seed applied to every component");
    cmd->add_option("--embedding-seed", config.embedding.seed, "Skip-gram seed");
    cmd->add_option("--sampling-seed", config.sampling.seed, "Over-sampling seed");
    cmd->add_option("--forest-seed", config.forest.seed, "Forest seed");
    cmd->add_option("--cv-seed", config.cv.seed, "Cross-validation seed");
  }

  void resolve(const CLI::App* cmd, RunConfig& config) const {
    if (!master) return;
    if (cmd->count("--embedding-seed") == 0) config.embedding.seed = *master;
    if (cmd->count("--sampling-seed") == 0) config.sampling.seed = *master;
    if (cmd->count("--forest-seed") == 0) config.forest.seed = *master;
    if (cmd->count("--cv-seed") == 0) config.cv.seed = *master;
  }
};

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  std::string config_path;

  try {
    if (auto preset = find_config_flag(argc, argv)) {
      clonedet::apply_config_file(*preset, config);
    }
  } catch (const clonedet::InputError& e) {
    clonedet::log::error(e.what());
    return clonedet::kExitInput;
  }

  CLI::App app{"Semantic code clone detector: skip-gram token embeddings + "
               "bagged decision trees"};
  app.require_subcommand(1);
  app.add_option("--config", config_path,
                 "JSON config file; explicit flags override its values");
  app.footer("Set CLONEDET_LOG_LEVEL=error|warn|info|debug to control logging.");

  CLI::App* synth = app.add_subcommand("synth", "Generate a labeled synthetic corpus");
  synth->add_option("--out-dir", config.out_dir, "Output directory");
  synth->add_option("--families", config.synth.families, "Functionality families");
  synth->add_option("--per-family", config.synth.per_family, "Fragments per family");
  synth->add_option("--cross-pairs", config.synth.cross_pairs, "Non-clone pairs to sample");
  synth->add_option("--seed", config.synth.seed, "Generator seed");

  CLI::App* train = app.add_subcommand("train", "Train embedding + forest, write a model bundle");
  train->add_option("--fragments", config.fragments_path, "Fragments file (JSON lines)");
  train->add_option("--pairs", config.pairs_path, "Labeled pairs file (CSV)");
  train->add_option("--out-dir", config.out_dir, "Bundle output directory");
  SeedFlags train_seeds;
  train_seeds.attach(train, config);
  add_model_options(train, config);

  CLI::App* predict = app.add_subcommand("predict", "Classify pairs with a trained bundle");
  predict->add_option("--model-dir", config.model_dir, "Bundle directory from train");
  predict->add_option("--fragments", config.fragments_path, "Fragments file (JSON lines)");
  predict->add_option("--pairs", config.pairs_path, "Pairs file (CSV, id_a,id_b,...)");
  predict->add_option("--out", config.output_path, "Predictions CSV path");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Stratified k-fold cross-validation");
  evaluate->add_option("--fragments", config.fragments_path, "Fragments file (JSON lines)");
  evaluate->add_option("--pairs", config.pairs_path, "Labeled pairs file (CSV)");
  evaluate->add_option("--out-dir", config.out_dir, "Report output directory");
  evaluate->add_option("--folds", config.cv.folds, "Number of folds");
  evaluate->add_option("--repeats", config.cv.repeats, "Cross-validation repeats");
  SeedFlags evaluate_seeds;
  evaluate_seeds.attach(evaluate, config);
  add_model_options(evaluate, config);

  CLI::App* stats = app.add_subcommand("stats", "Compare two evaluation reports");
  stats->add_option("--report-a", config.report_a, "First report.json");
  stats->add_option("--report-b", config.report_b, "Second report.json");
  stats->add_option("--out", config.output_path, "Comparison JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return clonedet::kExitUsage;
  }

  if (synth->parsed()) return clonedet::run_synth(config);
  if (train->parsed()) {
    train_seeds.resolve(train, config);
    return clonedet::run_train(config);
  }
  if (predict->parsed()) return clonedet::run_predict(config);
  if (evaluate->parsed()) {
    evaluate_seeds.resolve(evaluate, config);
    return clonedet::run_evaluate(config);
  }
  if (stats->parsed()) return clonedet::run_stats(config);
  return clonedet::kExitUsage;
}
