#include "clonedet/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "clonedet/log.hpp"
#include "clonedet/util.hpp"

namespace clonedet {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

int guarded(const char* command, int (*body)(const RunConfig&), const RunConfig& config) {
  try {
    return body(config);
  } catch (const InputError& e) {
    log::error(std::string(command) + ": " + e.what());
    return kExitInput;
  } catch (const MismatchError& e) {
    log::error(std::string(command) + ": " + e.what());
    return kExitMismatch;
  } catch (const UsageError& e) {
    log::error(std::string(command) + ": " + e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    log::error(std::string(command) + ": " + e.what());
    return kExitInternal;
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  out << content;
}

}  // namespace

void apply_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("config file not found: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InputError(path + ": malformed config JSON");

  maybe_get(j, "fragments", config.fragments_path);
  maybe_get(j, "pairs", config.pairs_path);
  maybe_get(j, "out_dir", config.out_dir);
  maybe_get(j, "model_dir", config.model_dir);
  maybe_get(j, "output", config.output_path);

  if (j.contains("embedding")) {
    const json& e = j.at("embedding");
    maybe_get(e, "dim", config.embedding.dim);
    maybe_get(e, "window", config.embedding.window);
    maybe_get(e, "epochs", config.embedding.epochs);
    maybe_get(e, "learning_rate", config.embedding.learning_rate);
    maybe_get(e, "min_learning_rate", config.embedding.min_learning_rate);
    maybe_get(e, "negative_samples", config.embedding.negative_samples);
    maybe_get(e, "seed", config.embedding.seed);
    maybe_get(e, "min_count", config.embedding.min_count);
  }
  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    maybe_get(s, "target_ratio", config.sampling.target_ratio);
    maybe_get(s, "seed", config.sampling.seed);
    if (s.contains("strategy")) {
      const auto text = s.at("strategy").get<std::string>();
      const auto strategy = oversample_strategy_from_string(text);
      if (!strategy) throw InputError(path + ": unknown sampling strategy \"" + text + "\"");
      config.sampling.strategy = *strategy;
    }
  }
  if (j.contains("forest")) {
    const json& f = j.at("forest");
    maybe_get(f, "n_trees", config.forest.n_trees);
    maybe_get(f, "max_depth", config.forest.max_depth);
    maybe_get(f, "min_samples_leaf", config.forest.min_samples_leaf);
    maybe_get(f, "min_impurity_decrease", config.forest.min_impurity_decrease);
    maybe_get(f, "bootstrap_size", config.forest.bootstrap_size);
    maybe_get(f, "bootstrap_cap_multiple", config.forest.bootstrap_cap_multiple);
    maybe_get(f, "seed", config.forest.seed);
    maybe_get(f, "features_per_split", config.forest.features_per_split);
    maybe_get(f, "threads", config.forest.threads);
  }
  if (j.contains("cv")) {
    const json& c = j.at("cv");
    maybe_get(c, "folds", config.cv.folds);
    maybe_get(c, "repeats", config.cv.repeats);
    maybe_get(c, "seed", config.cv.seed);
  }
  if (j.contains("synth")) {
    const json& s = j.at("synth");
    maybe_get(s, "families", config.synth.families);
    maybe_get(s, "per_family", config.synth.per_family);
    maybe_get(s, "cross_pairs", config.synth.cross_pairs);
    maybe_get(s, "seed", config.synth.seed);
  }
}

std::string config_to_json(const RunConfig& config) {
  ordered_json j;
  j["fragments"] = config.fragments_path;
  j["pairs"] = config.pairs_path;
  j["out_dir"] = config.out_dir;
  j["model_dir"] = config.model_dir;
  j["output"] = config.output_path;
  j["embedding"] = {{"dim", config.embedding.dim},
                    {"window", config.embedding.window},
                    {"epochs", config.embedding.epochs},
                    {"learning_rate", config.embedding.learning_rate},
                    {"min_learning_rate", config.embedding.min_learning_rate},
                    {"negative_samples", config.embedding.negative_samples},
                    {"seed", config.embedding.seed},
                    {"min_count", config.embedding.min_count}};
  j["sampling"] = {{"target_ratio", config.sampling.target_ratio},
                   {"seed", config.sampling.seed},
                   {"strategy", to_string(config.sampling.strategy)}};
  j["forest"] = {{"n_trees", config.forest.n_trees},
                 {"max_depth", config.forest.max_depth},
                 {"min_samples_leaf", config.forest.min_samples_leaf},
                 {"min_impurity_decrease", config.forest.min_impurity_decrease},
                 {"bootstrap_size", config.forest.bootstrap_size},
                 {"bootstrap_cap_multiple", config.forest.bootstrap_cap_multiple},
                 {"seed", config.forest.seed},
                 {"features_per_split", config.forest.features_per_split},
                 {"threads", config.forest.threads}};
  j["cv"] = {{"folds", config.cv.folds}, {"repeats", config.cv.repeats}, {"seed", config.cv.seed}};
  j["synth"] = {{"families", config.synth.families},
                {"per_family", config.synth.per_family},
                {"cross_pairs", config.synth.cross_pairs},
                {"seed", config.synth.seed}};
  return j.dump(2) + "\n";
}

namespace {

std::vector<TokenSequence> tokenize_store(const FragmentStore& store) {
  std::vector<TokenSequence> corpus;
  corpus.reserve(store.size());
  for (const CodeFragment& fragment : store.fragments()) {
    corpus.push_back(tokenize(fragment.source));
  }
  return corpus;
}

// Fragment vectors by id; fragments with no in-vocabulary token carry an
// error message instead.
struct VectorCache {
  std::unordered_map<std::string, FragmentVector> vectors;
  std::unordered_map<std::string, std::string> failures;

  const FragmentVector* get(const FragmentStore& store, const EmbeddingModel& model,
                            const std::string& id, std::string* why = nullptr) {
    auto hit = vectors.find(id);
    if (hit != vectors.end()) return &hit->second;
    auto miss = failures.find(id);
    if (miss != failures.end()) {
      if (why != nullptr) *why = miss->second;
      return nullptr;
    }
    try {
      auto inserted =
          vectors.emplace(id, fragment_vector(tokenize(store.at(id).source), model, id));
      return &inserted.first->second;
    } catch (const std::runtime_error& e) {
      failures.emplace(id, e.what());
      if (why != nullptr) *why = e.what();
      return nullptr;
    }
  }
};

int train_body(const RunConfig& config);
int synth_body(const RunConfig& config);
int predict_body(const RunConfig& config);
int evaluate_body(const RunConfig& config);
int stats_body(const RunConfig& config);

int synth_body(const RunConfig& config) {
  if (config.out_dir.empty()) throw UsageError("synth: --out-dir is required");
  fs::create_directories(config.out_dir);
  const SynthOutput output = synthesize_corpus(config.synth);
  const std::string fragments_path = (fs::path(config.out_dir) / "fragments.jsonl").string();
  const std::string pairs_path = (fs::path(config.out_dir) / "pairs.csv").string();
  save_fragments(output.fragments, fragments_path);
  save_pairs(output.pairs, pairs_path);

  std::size_t clones = 0;
  for (const LabeledPair& pair : output.pairs) {
    if (pair.label == PairLabel::Clone) ++clones;
  }
  std::printf("synth: %zu fragments, %zu pairs (%zu clone, %zu non-clone) -> %s\n",
              output.fragments.size(), output.pairs.size(), clones,
              output.pairs.size() - clones, config.out_dir.c_str());
  return kExitOk;
}

int train_body(const RunConfig& config) {
  if (config.fragments_path.empty() || config.pairs_path.empty() || config.out_dir.empty()) {
    throw UsageError("train: --fragments, --pairs and --out-dir are required");
  }
  const FragmentStore store = load_fragments(config.fragments_path);
  const PairSet pairs = load_pairs(config.pairs_path, store);
  if (store.empty()) throw InputError("train: empty fragment store");
  if (pairs.empty()) throw InputError("train: empty pair set");
  fs::create_directories(config.out_dir);

  const auto t_embed = clock_type::now();
  const EmbeddingModel model = train_skipgram(tokenize_store(store), config.embedding);
  const double embedding_seconds = seconds_since(t_embed);

  const Dataset dataset = build_pair_dataset(store, pairs, model);

  const auto t_sample = clock_type::now();
  const Dataset balanced = oversample(dataset, config.sampling);
  const double sampling_seconds = seconds_since(t_sample);

  const auto t_forest = clock_type::now();
  const Forest forest = train_forest(balanced, config.forest);
  const double forest_seconds = seconds_since(t_forest);

  const std::string embedding_path = (fs::path(config.out_dir) / "embedding.txt").string();
  const std::string forest_path = (fs::path(config.out_dir) / "forest.json").string();
  const std::string manifest_path = (fs::path(config.out_dir) / "manifest.json").string();
  save_embedding(model, embedding_path);
  save_forest(forest, forest_path);

  ordered_json manifest;
  manifest["schema"] = "clonedet-manifest/1";
  manifest["config"] = json::parse(config_to_json(config));
  manifest["inputs"] = {{"fragments", {{"path", config.fragments_path},
                                       {"digest", file_digest(config.fragments_path)}}},
                        {"pairs", {{"path", config.pairs_path},
                                   {"digest", file_digest(config.pairs_path)}}}};
  manifest["counts"] = {{"fragments", store.size()},
                        {"pairs", pairs.size()},
                        {"training_rows", balanced.size()},
                        {"vocabulary", model.vocab_size()},
                        {"dim", model.dim}};
  manifest["timings"] = {{"embedding_seconds", embedding_seconds},
                         {"sampling_seconds", sampling_seconds},
                         {"forest_seconds", forest_seconds}};
  write_text_file(manifest_path, manifest.dump(2) + "\n");

  std::printf("train: embedding %.2fs, sampling %.2fs, forest %.2fs (total %.2fs)\n",
              embedding_seconds, sampling_seconds, forest_seconds,
              embedding_seconds + sampling_seconds + forest_seconds);
  return kExitOk;
}

// Prediction input: CSV whose header starts with id_a,id_b; extra columns
// (labels from a labeled pair file) are ignored.
std::vector<std::pair<std::string, std::string>> load_id_pairs(const std::string& path,
                                                               const FragmentStore& store) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("pairs file not found: " + path);
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("id_a,id_b", 0) != 0) {
    throw InputError(path + ": invalid header, expected id_a,id_b,...");
  }
  std::vector<std::pair<std::string, std::string>> ids;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t first = line.find(',');
    if (first == std::string::npos) {
      throw InputError(path + ": line " + std::to_string(line_number) + ": expected >= 2 fields");
    }
    std::size_t second = line.find(',', first + 1);
    if (second == std::string::npos) second = line.size();
    std::string id_a = line.substr(0, first);
    std::string id_b = line.substr(first + 1, second - first - 1);
    for (const std::string& id : {id_a, id_b}) {
      if (store.find(id) == nullptr) {
        throw InputError(path + ": line " + std::to_string(line_number) +
                         ": unknown fragment id \"" + id + "\"");
      }
    }
    ids.emplace_back(std::move(id_a), std::move(id_b));
  }
  return ids;
}

int predict_body(const RunConfig& config) {
  if (config.model_dir.empty() || config.fragments_path.empty() || config.pairs_path.empty() ||
      config.output_path.empty()) {
    throw UsageError("predict: --model-dir, --fragments, --pairs and --out are required");
  }
  const EmbeddingModel model =
      load_embedding((fs::path(config.model_dir) / "embedding.txt").string());
  const Forest forest = load_forest((fs::path(config.model_dir) / "forest.json").string());
  if (forest.dim != 2 * model.dim) {
    throw MismatchError("forest expects dimension " + std::to_string(forest.dim) +
                        " but embedding provides 2x" + std::to_string(model.dim));
  }
  const FragmentStore store = load_fragments(config.fragments_path);
  const auto id_pairs = load_id_pairs(config.pairs_path, store);

  const auto t_predict = clock_type::now();
  VectorCache cache;
  std::string csv = "id_a,id_b,label,vote_fraction,reason\n";
  std::size_t warnings = 0;
  for (const auto& [id_a, id_b] : id_pairs) {
    std::string why;
    const FragmentVector* vec_a = cache.get(store, model, id_a, &why);
    const FragmentVector* vec_b = vec_a ? cache.get(store, model, id_b, &why) : nullptr;
    if (vec_a == nullptr || vec_b == nullptr) {
      csv += id_a + "," + id_b + ",error,," + why + "\n";
      ++warnings;
      continue;
    }
    const Prediction prediction = predict(forest, pair_features(*vec_a, *vec_b));
    csv += id_a + "," + id_b + "," + to_string(prediction.label) + "," +
           format_double(prediction.vote_fraction) + ",\n";
  }
  const double predict_seconds = seconds_since(t_predict);

  write_text_file(config.output_path, csv);
  std::printf("predict: %zu pairs in %.2fs -> %s\n", id_pairs.size(), predict_seconds,
              config.output_path.c_str());
  if (warnings > 0) {
    log::warn("predict: " + std::to_string(warnings) + " pair(s) skipped as unrepresentable");
  }
  return kExitOk;
}

int evaluate_body(const RunConfig& config) {
  if (config.fragments_path.empty() || config.pairs_path.empty() || config.out_dir.empty()) {
    throw UsageError("evaluate: --fragments, --pairs and --out-dir are required");
  }
  const FragmentStore store = load_fragments(config.fragments_path);
  const PairSet pairs = load_pairs(config.pairs_path, store);
  if (pairs.empty()) throw InputError("evaluate: empty pair set");
  fs::create_directories(config.out_dir);

  const auto t_embed = clock_type::now();
  const EmbeddingModel model = train_skipgram(tokenize_store(store), config.embedding);
  const double embedding_seconds = seconds_since(t_embed);

  const Dataset dataset = build_pair_dataset(store, pairs, model);
  const EvalReport report = cross_validate(dataset, config.sampling, config.forest, config.cv);

  const std::string report_json = report_to_json(report);
  const std::string report_table = report_to_table(report);
  write_text_file((fs::path(config.out_dir) / "report.json").string(), report_json);
  write_text_file((fs::path(config.out_dir) / "report.txt").string(), report_table);

  ordered_json timings;
  timings["embedding_seconds"] = embedding_seconds;
  timings["train_seconds"] = report.train_seconds;
  timings["predict_seconds"] = report.predict_seconds;
  write_text_file((fs::path(config.out_dir) / "timings.json").string(), timings.dump(2) + "\n");

  std::fputs(report_table.c_str(), stdout);
  std::printf("evaluate: embedding %.2fs, fold training %.2fs, fold prediction %.2fs\n",
              embedding_seconds, report.train_seconds, report.predict_seconds);
  return kExitOk;
}

int stats_body(const RunConfig& config) {
  if (config.report_a.empty() || config.report_b.empty() || config.output_path.empty()) {
    throw UsageError("stats: --report-a, --report-b and --out are required");
  }
  auto load_traces = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("report file not found: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("traces") || !j.at("traces").contains("f1")) {
      throw InputError(path + ": not an evaluation report (missing traces.f1)");
    }
    return j.at("traces").at("f1").get<std::map<std::string, std::vector<double>>>();
  };
  const auto traces_a = load_traces(config.report_a);
  const auto traces_b = load_traces(config.report_b);

  ordered_json rows = ordered_json::object();
  std::string table;
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %12s %10s %8s %12s\n", "Type", "Wilcoxon-p", "W", "delta",
                "level");
  table += line;

  std::size_t computed = 0;
  std::vector<std::string> names;
  for (const auto& [name, trace] : traces_a) {
    (void)trace;
    names.push_back(name);
  }
  for (const std::string& name : names) {
    auto it_b = traces_b.find(name);
    if (it_b == traces_b.end()) {
      throw UsageError("stats: row \"" + name + "\" missing from " + config.report_b);
    }
    const std::vector<double>& a = traces_a.at(name);
    const std::vector<double>& b = it_b->second;
    if (a.size() != b.size()) {
      throw UsageError("stats: trace length mismatch for \"" + name + "\": " +
                       std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    ordered_json row;
    try {
      const WilcoxonResult wilcoxon = wilcoxon_signed_rank(a, b);
      const CliffsDeltaResult cliffs = cliffs_delta(a, b);
      row["wilcoxon_w"] = wilcoxon.w;
      row["p_value"] = wilcoxon.p_value;
      row["exact"] = wilcoxon.exact;
      row["n"] = wilcoxon.n;
      row["cliffs_delta"] = cliffs.delta;
      row["effectiveness_level"] = static_cast<int>(cliffs.level);
      row["effectiveness"] = to_string(cliffs.level);
      std::snprintf(line, sizeof(line), "%-8s %12.6f %10.1f %8.4f %12s\n", name.c_str(),
                    wilcoxon.p_value, wilcoxon.w, cliffs.delta, to_string(cliffs.level));
      ++computed;
    } catch (const std::runtime_error& e) {
      row["error"] = e.what();
      std::snprintf(line, sizeof(line), "%-8s %12s %10s %8s %12s\n", name.c_str(), "-", "-", "-",
                    "identical");
    }
    table += line;
    rows[name] = std::move(row);
  }

  if (computed == 0) {
    log::error("stats: every trace pair is identical (no nonzero differences); nothing to test");
    return kExitInternal;
  }

  ordered_json out;
  out["schema"] = "clonedet-comparison/1";
  out["report_a"] = config.report_a;
  out["report_b"] = config.report_b;
  out["rows"] = std::move(rows);
  write_text_file(config.output_path, out.dump(2) + "\n");
  const std::string table_path =
      (fs::path(config.output_path).replace_extension(".txt")).string();
  write_text_file(table_path, table);
  std::fputs(table.c_str(), stdout);
  return kExitOk;
}

}  // namespace

Dataset build_pair_dataset(const FragmentStore& store, const PairSet& pairs,
                           const EmbeddingModel& model) {
  VectorCache cache;
  Dataset dataset;
  dataset.reserve(pairs.size());
  std::size_t skipped = 0;
  for (const LabeledPair& pair : pairs) {
    const FragmentVector* vec_a = cache.get(store, model, pair.id_a);
    const FragmentVector* vec_b = cache.get(store, model, pair.id_b);
    if (vec_a == nullptr || vec_b == nullptr) {
      ++skipped;
      continue;
    }
    Sample sample;
    sample.features = pair_features(*vec_a, *vec_b);
    sample.label = pair.label;
    sample.clone_type = pair.clone_type;
    dataset.push_back(std::move(sample));
  }
  if (skipped > 0) {
    log::warn("dropped " + std::to_string(skipped) + " pair(s) with unrepresentable fragments");
  }
  return dataset;
}

int run_synth(const RunConfig& config) { return guarded("synth", synth_body, config); }
int run_train(const RunConfig& config) { return guarded("train", train_body, config); }
int run_predict(const RunConfig& config) { return guarded("predict", predict_body, config); }
int run_evaluate(const RunConfig& config) { return guarded("evaluate", evaluate_body, config); }
int run_stats(const RunConfig& config) { return guarded("stats", stats_body, config); }

}  // namespace clonedet
