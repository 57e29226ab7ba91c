#include "clonedet/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "clonedet/rng.hpp"
#include "clonedet/util.hpp"

namespace clonedet {

namespace {

double safe_ratio(std::int64_t numerator, std::int64_t denominator) {
  return denominator == 0 ? 0.0
                          : static_cast<double>(numerator) / static_cast<double>(denominator);
}

double harmonic_f1(double precision, double recall) {
  const double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

}  // namespace

Prf prf(const ConfusionCounts& counts) {
  Prf result;
  result.precision = safe_ratio(counts.tp, counts.tp + counts.fp);
  result.recall = safe_ratio(counts.tp, counts.tp + counts.fn);
  result.f1 = harmonic_f1(result.precision, result.recall);
  return result;
}

std::string report_row_name(CloneType type) {
  return type == CloneType::WT3T4 ? "T4" : to_string(type);
}

const std::vector<CloneType>& report_type_order() {
  static const std::vector<CloneType> order = {CloneType::T1, CloneType::T2, CloneType::ST3,
                                               CloneType::MT3, CloneType::WT3T4};
  return order;
}

void EvalCounter::add(PairLabel predicted, PairLabel truth, CloneType type) {
  const bool predicted_clone = predicted == PairLabel::Clone;
  if (truth == PairLabel::Clone) {
    predicted_clone ? ++overall.tp : ++overall.fn;
    TypeTally& tally = per_type[type];
    ++tally[0];
    if (predicted_clone) ++tally[1];
  } else {
    predicted_clone ? ++overall.fp : ++overall.tn;
  }
}

std::vector<std::pair<std::string, Prf>> metric_rows(const EvalCounter& counter) {
  std::vector<std::pair<std::string, Prf>> rows;
  for (CloneType type : report_type_order()) {
    auto it = counter.per_type.find(type);
    if (it == counter.per_type.end() || it->second[0] == 0) continue;
    const std::int64_t pairs = it->second[0];
    const std::int64_t detected = it->second[1];
    Prf metrics;
    metrics.recall = safe_ratio(detected, pairs);
    metrics.precision = safe_ratio(detected, detected + counter.overall.fp);
    metrics.f1 = harmonic_f1(metrics.precision, metrics.recall);
    rows.emplace_back(report_row_name(type), metrics);
  }
  rows.emplace_back("overall", prf(counter.overall));
  return rows;
}

std::vector<std::pair<std::string, Prf>> per_type_report(
    const std::vector<PairPrediction>& predictions, const PairSet& pairs) {
  std::unordered_map<std::string, const LabeledPair*> by_key;
  by_key.reserve(pairs.size());
  for (const LabeledPair& pair : pairs) {
    by_key.emplace(pair.id_a + "\x1f" + pair.id_b, &pair);
  }
  EvalCounter counter;
  for (const PairPrediction& prediction : predictions) {
    auto it = by_key.find(prediction.id_a + "\x1f" + prediction.id_b);
    if (it == by_key.end()) {
      // accept the swapped order as well; pairs are unordered
      it = by_key.find(prediction.id_b + "\x1f" + prediction.id_a);
    }
    if (it == by_key.end()) {
      throw std::invalid_argument("per_type_report: unknown pair id (" + prediction.id_a + ", " +
                                  prediction.id_b + ")");
    }
    counter.add(prediction.predicted, it->second->label, it->second->clone_type);
  }
  return metric_rows(counter);
}

std::vector<KFoldSplit> stratified_kfold(const std::vector<PairLabel>& labels, int k,
                                         int repeats, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_kfold: k must be >= 2");
  if (repeats < 1) throw std::invalid_argument("stratified_kfold: repeats must be >= 1");

  std::vector<std::size_t> clones, non_clones;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == PairLabel::Clone ? clones : non_clones).push_back(i);
  }
  for (const auto* cls : {&clones, &non_clones}) {
    if (cls->size() < static_cast<std::size_t>(k)) {
      throw std::invalid_argument("stratified_kfold: class with " + std::to_string(cls->size()) +
                                  " members cannot fill k=" + std::to_string(k) + " folds");
    }
  }

  std::vector<KFoldSplit> splits;
  splits.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(repeats));
  for (int repeat = 0; repeat < repeats; ++repeat) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(repeat)));
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    for (auto* cls : {&clones, &non_clones}) {
      std::vector<std::size_t> shuffled = *cls;
      for (std::size_t i = shuffled.size(); i > 1; --i) {
        std::swap(shuffled[i - 1], shuffled[rng.next_below(i)]);
      }
      for (std::size_t i = 0; i < shuffled.size(); ++i) {
        folds[i % static_cast<std::size_t>(k)].push_back(shuffled[i]);
      }
    }
    for (int fold = 0; fold < k; ++fold) {
      KFoldSplit split;
      split.test = folds[static_cast<std::size_t>(fold)];
      std::sort(split.test.begin(), split.test.end());
      for (int other = 0; other < k; ++other) {
        if (other == fold) continue;
        split.train.insert(split.train.end(), folds[static_cast<std::size_t>(other)].begin(),
                           folds[static_cast<std::size_t>(other)].end());
      }
      std::sort(split.train.begin(), split.train.end());
      splits.push_back(std::move(split));
    }
  }
  return splits;
}

EvalReport cross_validate(const Dataset& data, const SamplingConfig& sampling,
                          const ForestConfig& forest, const CvConfig& cv) {
  using clock = std::chrono::steady_clock;

  std::vector<PairLabel> labels;
  labels.reserve(data.size());
  for (const Sample& sample : data) labels.push_back(sample.label);
  const auto splits = stratified_kfold(labels, cv.folds, cv.repeats, cv.seed);

  EvalReport report;
  report.folds = cv.folds;
  report.repeats = cv.repeats;
  report.seed = cv.seed;
  report.dataset_size = data.size();

  for (int repeat = 0; repeat < cv.repeats; ++repeat) {
    RepeatResult result;
    for (int fold = 0; fold < cv.folds; ++fold) {
      const std::size_t split_index =
          static_cast<std::size_t>(repeat) * static_cast<std::size_t>(cv.folds) +
          static_cast<std::size_t>(fold);
      const KFoldSplit& split = splits[split_index];

      Dataset train_set;
      train_set.reserve(split.train.size());
      for (std::size_t row : split.train) train_set.push_back(data[row]);

      SamplingConfig fold_sampling = sampling;
      fold_sampling.seed = mix_seed(sampling.seed, split_index);
      ForestConfig fold_forest = forest;
      fold_forest.seed = mix_seed(forest.seed, split_index);

      const auto t0 = clock::now();
      const Dataset balanced = oversample(train_set, fold_sampling);
      const Forest model = train_forest(balanced, fold_forest);
      const auto t1 = clock::now();

      ConfusionCounts fold_counts;
      EvalCounter fold_counter;
      for (std::size_t row : split.test) {
        const Prediction prediction = predict(model, data[row].features);
        fold_counter.add(prediction.label, data[row].label, data[row].clone_type);
      }
      const auto t2 = clock::now();

      report.train_seconds += std::chrono::duration<double>(t1 - t0).count();
      report.predict_seconds += std::chrono::duration<double>(t2 - t1).count();

      fold_counts = fold_counter.overall;
      result.folds.push_back(fold_counts);
      result.pooled.overall += fold_counter.overall;
      for (const auto& [type, tally] : fold_counter.per_type) {
        TypeTally& pooled = result.pooled.per_type[type];
        pooled[0] += tally[0];
        pooled[1] += tally[1];
      }
    }
    result.rows = metric_rows(result.pooled);
    for (const auto& [name, metrics] : result.rows) {
      report.f1_traces[name].push_back(metrics.f1);
      report.precision_traces[name].push_back(metrics.precision);
      report.recall_traces[name].push_back(metrics.recall);
    }
    report.repeat_results.push_back(std::move(result));
  }

  // headline rows: mean across repeats, on the first repeat's row set
  for (const auto& [name, trace] : report.f1_traces) {
    (void)name;
    if (trace.size() != static_cast<std::size_t>(cv.repeats)) {
      throw std::logic_error("cross_validate: inconsistent trace length");
    }
  }
  for (const auto& [name, metrics] : report.repeat_results.front().rows) {
    (void)metrics;
    Prf mean;
    const auto& ps = report.precision_traces[name];
    const auto& rs = report.recall_traces[name];
    const auto& fs = report.f1_traces[name];
    mean.precision = std::accumulate(ps.begin(), ps.end(), 0.0) / static_cast<double>(ps.size());
    mean.recall = std::accumulate(rs.begin(), rs.end(), 0.0) / static_cast<double>(rs.size());
    mean.f1 = std::accumulate(fs.begin(), fs.end(), 0.0) / static_cast<double>(fs.size());
    report.rows.emplace_back(name, mean);
  }
  return report;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json rows_to_json(const std::vector<std::pair<std::string, Prf>>& rows) {
  ordered_json j = ordered_json::object();
  for (const auto& [name, metrics] : rows) {
    j[name] = {{"precision", metrics.precision},
               {"recall", metrics.recall},
               {"f1", metrics.f1}};
  }
  return j;
}

ordered_json confusion_to_json(const ConfusionCounts& counts) {
  return {{"tp", counts.tp}, {"fp", counts.fp}, {"tn", counts.tn}, {"fn", counts.fn}};
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  ordered_json j;
  j["schema"] = "clone-eval-report/1";
  j["folds"] = report.folds;
  j["repeats"] = report.repeats;
  j["seed"] = report.seed;
  j["dataset_size"] = report.dataset_size;
  j["rows"] = rows_to_json(report.rows);

  ordered_json repeats = ordered_json::array();
  for (const RepeatResult& result : report.repeat_results) {
    ordered_json r;
    r["overall"] = confusion_to_json(result.pooled.overall);
    ordered_json per_type = ordered_json::object();
    for (CloneType type : report_type_order()) {
      auto it = result.pooled.per_type.find(type);
      if (it == result.pooled.per_type.end()) continue;
      per_type[report_row_name(type)] = {{"pairs", it->second[0]}, {"detected", it->second[1]}};
    }
    r["per_type"] = std::move(per_type);
    r["rows"] = rows_to_json(result.rows);
    ordered_json folds = ordered_json::array();
    for (const ConfusionCounts& fold : result.folds) folds.push_back(confusion_to_json(fold));
    r["folds"] = std::move(folds);
    repeats.push_back(std::move(r));
  }
  j["repeats_detail"] = std::move(repeats);

  ordered_json traces;
  auto traces_to_json = [](const std::map<std::string, std::vector<double>>& traces_map) {
    ordered_json out = ordered_json::object();
    for (const auto& [name, values] : traces_map) out[name] = values;
    return out;
  };
  traces["precision"] = traces_to_json(report.precision_traces);
  traces["recall"] = traces_to_json(report.recall_traces);
  traces["f1"] = traces_to_json(report.f1_traces);
  j["traces"] = std::move(traces);

  return j.dump(2) + "\n";
}

std::string report_to_table(const EvalReport& report) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-8s %10s %10s %10s\n", "Type", "Precision", "Recall", "F1");
  out += line;
  for (const auto& [name, metrics] : report.rows) {
    std::snprintf(line, sizeof(line), "%-8s %10.4f %10.4f %10.4f\n", name.c_str(),
                  metrics.precision, metrics.recall, metrics.f1);
    out += line;
  }
  std::snprintf(line, sizeof(line), "(%d-fold cross-validation, %d repeats, seed %llu, %zu pairs)\n",
                report.folds, report.repeats, static_cast<unsigned long long>(report.seed),
                report.dataset_size);
  out += line;
  return out;
}

namespace {

// Ranks of |values| with mean ranks on ties, doubled so they stay integral.
std::vector<std::int64_t> doubled_ranks(const std::vector<double>& magnitudes) {
  const std::size_t n = magnitudes.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return magnitudes[a] < magnitudes[b]; });

  std::vector<std::int64_t> ranks2(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && magnitudes[order[j + 1]] == magnitudes[order[i]]) ++j;
    // mean rank of positions i..j (1-based), doubled: (i+1 + j+1)
    const std::int64_t doubled = static_cast<std::int64_t>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) ranks2[order[k]] = doubled;
    i = j + 1;
  }
  return ranks2;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) {
    throw std::invalid_argument("wilcoxon_signed_rank: samples must be paired and nonempty");
  }
  std::vector<double> magnitudes;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d == 0.0) continue;
    magnitudes.push_back(std::fabs(d));
    positive.push_back(d > 0.0);
  }
  const std::size_t n = magnitudes.size();
  if (n == 0) throw std::runtime_error("wilcoxon_signed_rank: no nonzero pairs");

  const std::vector<std::int64_t> ranks2 = doubled_ranks(magnitudes);
  std::int64_t w_plus2 = 0;
  std::int64_t total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += ranks2[i];
    if (positive[i]) w_plus2 += ranks2[i];
  }
  const std::int64_t w_minus2 = total2 - w_plus2;
  const std::int64_t w2 = std::min(w_plus2, w_minus2);

  WilcoxonResult result;
  result.n = n;
  result.w = static_cast<double>(w2) / 2.0;

  if (n <= 25) {
    // exact: distribution of the positive-rank sum over all 2^n sign
    // assignments, as a convolution over the (doubled, integral) ranks
    result.exact = true;
    std::vector<double> dist(static_cast<std::size_t>(total2) + 1, 0.0);
    dist[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto step = static_cast<std::size_t>(ranks2[i]);
      reach += step;
      for (std::size_t s = reach + 1; s-- > step;) {
        dist[s] += dist[s - step];
      }
    }
    double favourable = 0.0;
    for (std::size_t s = 0; s <= reach; ++s) {
      const std::int64_t sum2 = static_cast<std::int64_t>(s);
      if (std::min(sum2, total2 - sum2) <= w2) favourable += dist[s];
    }
    result.p_value = favourable / std::pow(2.0, static_cast<double>(n));
  } else {
    const double nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    double tie_term = 0.0;
    std::size_t i = 0;
    std::vector<std::int64_t> sorted = ranks2;
    std::sort(sorted.begin(), sorted.end());
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += (t * t * t - t);
      i = j + 1;
    }
    const double variance = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    const double z = (result.w - mean) / std::sqrt(variance);
    result.p_value = std::min(1.0, 2.0 * normal_cdf(z));
  }
  return result;
}

const char* to_string(EffectivenessLevel level) {
  switch (level) {
    case EffectivenessLevel::Negligible: return "Negligible";
    case EffectivenessLevel::Small: return "Small";
    case EffectivenessLevel::Medium: return "Medium";
    case EffectivenessLevel::Large: return "Large";
  }
  return "Negligible";
}

EffectivenessLevel effectiveness_level(double delta) {
  if (delta < 0.147) return EffectivenessLevel::Negligible;
  if (delta < 0.33) return EffectivenessLevel::Small;
  if (delta < 0.474) return EffectivenessLevel::Medium;
  return EffectivenessLevel::Large;
}

CliffsDeltaResult cliffs_delta(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty()) {
    throw std::invalid_argument("cliffs_delta: samples must be nonempty");
  }
  std::int64_t greater = 0, less = 0;
  for (double xi : x) {
    for (double yj : y) {
      if (xi > yj) ++greater;
      else if (xi < yj) ++less;
    }
  }
  CliffsDeltaResult result;
  result.delta = static_cast<double>(greater - less) /
                 (static_cast<double>(x.size()) * static_cast<double>(y.size()));
  result.level = effectiveness_level(result.delta);
  return result;
}

}  // namespace clonedet
