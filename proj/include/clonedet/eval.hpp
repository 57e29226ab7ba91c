#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "clonedet/corpus.hpp"
#include "clonedet/forest.hpp"
#include "clonedet/sampling.hpp"

namespace clonedet {

struct ConfusionCounts {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& other) {
    tp += other.tp;
    fp += other.fp;
    tn += other.tn;
    fn += other.fn;
    return *this;
  }
  std::int64_t total() const { return tp + fp + tn + fn; }
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// P = tp/(tp+fp), R = tp/(tp+fn), F1 = 2PR/(P+R); every 0/0 is 0.
Prf prf(const ConfusionCounts& counts);

// Report row names in table order; WT3T4 pairs are reported under "T4".
std::string report_row_name(CloneType type);
const std::vector<CloneType>& report_type_order();

// Per-type tallies: [0] true pairs of the type, [1] of those, predicted clone.
using TypeTally = std::array<std::int64_t, 2>;

// Counting core shared by per_type_report and cross-validation.
struct EvalCounter {
  ConfusionCounts overall;
  std::map<CloneType, TypeTally> per_type;

  void add(PairLabel predicted, PairLabel truth, CloneType type);
};

// Rows in table order (absent types omitted) plus an "overall" row. Recall
// for type X is over true pairs of type X; precision for type X is taken on
// {type-X true pairs} plus all non-clone pairs, so FP is shared across types.
std::vector<std::pair<std::string, Prf>> metric_rows(const EvalCounter& counter);

struct PairPrediction {
  std::string id_a;
  std::string id_b;
  PairLabel predicted = PairLabel::NonClone;
};

// Matches predictions against labeled pairs by (id_a, id_b); throws on a pair
// that is not in the labeled set.
std::vector<std::pair<std::string, Prf>> per_type_report(
    const std::vector<PairPrediction>& predictions, const PairSet& pairs);

struct KFoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per repeat, each class is shuffled independently and dealt round-robin into
// k folds; returns k*repeats splits. Throws when a class has < k members.
std::vector<KFoldSplit> stratified_kfold(const std::vector<PairLabel>& labels, int k,
                                         int repeats, std::uint64_t seed);

struct CvConfig {
  int folds = 10;
  int repeats = 10;
  std::uint64_t seed = 0;
};

struct RepeatResult {
  EvalCounter pooled;                       // counts pooled across the k folds
  std::vector<ConfusionCounts> folds;       // fold-level overall counts
  std::vector<std::pair<std::string, Prf>> rows;
};

struct EvalReport {
  int folds = 0;
  int repeats = 0;
  std::uint64_t seed = 0;
  std::size_t dataset_size = 0;
  std::vector<std::pair<std::string, Prf>> rows;  // averaged across repeats
  std::vector<RepeatResult> repeat_results;
  // per row name, one value per repeat (for the comparison statistics)
  std::map<std::string, std::vector<double>> f1_traces;
  std::map<std::string, std::vector<double>> precision_traces;
  std::map<std::string, std::vector<double>> recall_traces;
  // wall-clock, reported separately so report bytes stay seed-deterministic
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
};

// Per fold: oversample the training split only, train a forest, predict the
// test split. Counts are pooled across folds, then metrics are averaged
// across repeats. Deterministic for fixed seeds.
EvalReport cross_validate(const Dataset& data, const SamplingConfig& sampling,
                          const ForestConfig& forest, const CvConfig& cv);

std::string report_to_json(const EvalReport& report);   // deterministic bytes
std::string report_to_table(const EvalReport& report);  // aligned text table

struct WilcoxonResult {
  double w = 0.0;        // min(W+, W-)
  double p_value = 1.0;  // two-sided
  std::size_t n = 0;     // nonzero differences
  bool exact = false;    // exact distribution vs normal approximation
};

// Paired signed-rank test. Zero differences are dropped; |d| ranks use mean
// ranks on ties. Exact distribution for n <= 25, normal approximation with
// tie correction beyond. Throws when every difference is zero.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& x, const std::vector<double>& y);

enum class EffectivenessLevel { Negligible = 1, Small = 2, Medium = 3, Large = 4 };

const char* to_string(EffectivenessLevel level);

// delta in [-1, 0.147) -> 1, [0.147, 0.33) -> 2, [0.33, 0.474) -> 3,
// [0.474, 1] -> 4.
EffectivenessLevel effectiveness_level(double delta);

struct CliffsDeltaResult {
  double delta = 0.0;
  EffectivenessLevel level = EffectivenessLevel::Negligible;
};

// delta = (#{x_i > y_j} - #{x_i < y_j}) / (|x|*|y|), by direct enumeration.
CliffsDeltaResult cliffs_delta(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace clonedet
