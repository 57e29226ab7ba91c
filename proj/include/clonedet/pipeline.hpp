#pragma once

#include <string>

#include "clonedet/embedding.hpp"
#include "clonedet/eval.hpp"
#include "clonedet/forest.hpp"
#include "clonedet/sampling.hpp"
#include "clonedet/synth.hpp"

namespace clonedet {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitMismatch = 3;
inline constexpr int kExitUsage = 4;

struct RunConfig {
  std::string fragments_path;
  std::string pairs_path;
  std::string out_dir;
  std::string model_dir;
  std::string output_path;  // predict: predictions csv; stats: output stem
  std::string report_a;     // stats inputs
  std::string report_b;

  SkipGramConfig embedding;
  SamplingConfig sampling;
  ForestConfig forest;
  CvConfig cv;
  SynthSpec synth;
};

// Loads a JSON config file into `config` (missing keys keep their current
// values). Flags parsed afterwards win over the file.
void apply_config_file(const std::string& path, RunConfig& config);
std::string config_to_json(const RunConfig& config);

// Each command returns a process exit code and reports errors on stderr.
int run_synth(const RunConfig& config);
int run_train(const RunConfig& config);
int run_predict(const RunConfig& config);
int run_evaluate(const RunConfig& config);
int run_stats(const RunConfig& config);

// Shared by train/predict/evaluate: tokenizes every fragment and returns
// features for the given pairs, in pair order.
Dataset build_pair_dataset(const FragmentStore& store, const PairSet& pairs,
                           const EmbeddingModel& model);

}  // namespace clonedet
