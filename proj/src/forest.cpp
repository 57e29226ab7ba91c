#include "clonedet/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "clonedet/util.hpp"

namespace clonedet {

namespace {

std::size_t label_slot(PairLabel label) {
  return label == PairLabel::Clone ? kCloneSlot : kNonCloneSlot;
}

ClassCounts count_labels(const Dataset& data, const std::vector<std::size_t>& rows) {
  ClassCounts counts{0, 0};
  for (std::size_t row : rows) ++counts[label_slot(data[row].label)];
  return counts;
}

// Gini of raw counts without the zero-total guard, for split scoring.
double gini_unchecked(std::int64_t a, std::int64_t b) {
  const double n = static_cast<double>(a + b);
  if (n == 0.0) return 0.0;
  const double pa = static_cast<double>(a) / n;
  const double pb = static_cast<double>(b) / n;
  return 1.0 - (pa * pa + pb * pb);
}

}  // namespace

double gini(const ClassCounts& counts) {
  const std::int64_t total = counts[0] + counts[1];
  if (total <= 0) throw std::invalid_argument("gini: empty counts");
  return gini_unchecked(counts[0], counts[1]);
}

std::optional<Split> best_split(const Dataset& data, const std::vector<std::size_t>& rows,
                                const std::vector<int>& candidate_features) {
  if (rows.size() < 2) return std::nullopt;

  const ClassCounts parent = count_labels(data, rows);
  const double parent_gini = gini_unchecked(parent[0], parent[1]);
  const double n = static_cast<double>(rows.size());

  // ascending feature order so the strict improvement test realizes the
  // lowest-feature, lowest-threshold tie-break
  std::vector<int> features = candidate_features;
  std::sort(features.begin(), features.end());

  std::optional<Split> best;
  std::vector<std::pair<double, std::size_t>> ordered(rows.size());  // (value, label slot)

  for (int feature : features) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Sample& sample = data[rows[i]];
      ordered[i] = {sample.features[static_cast<std::size_t>(feature)],
                    label_slot(sample.label)};
    }
    std::sort(ordered.begin(), ordered.end());

    ClassCounts left{0, 0};
    ClassCounts right = parent;
    for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
      ++left[ordered[i].second];
      --right[ordered[i].second];
      const double a = ordered[i].first;
      const double b = ordered[i + 1].first;
      if (a == b) continue;
      double threshold = a + (b - a) / 2.0;
      if (!(threshold < b)) threshold = a;  // midpoint rounded up to b: keep b on the right

      const double n_left = static_cast<double>(i + 1);
      const double n_right = n - n_left;
      const double child_gini = (n_left / n) * gini_unchecked(left[0], left[1]) +
                                (n_right / n) * gini_unchecked(right[0], right[1]);
      const double decrease = parent_gini - child_gini;
      if (decrease > 0.0 && (!best || decrease > best->impurity_decrease)) {
        best = Split{feature, threshold, decrease};
      }
    }
  }
  return best;
}

namespace {

PairLabel majority_label(const ClassCounts& counts) {
  // tie goes to non-clone
  return counts[kCloneSlot] > counts[kNonCloneSlot] ? PairLabel::Clone : PairLabel::NonClone;
}

struct TreeBuilder {
  const Dataset& data;
  const ForestConfig& config;
  int n_features;
  int features_per_split;
  Rng& rng;
  Tree tree;
  std::vector<int> feature_pool;

  TreeBuilder(const Dataset& d, const ForestConfig& c, int nf, int fps, Rng& r)
      : data(d), config(c), n_features(nf), features_per_split(fps), rng(r) {
    feature_pool.resize(static_cast<std::size_t>(n_features));
    std::iota(feature_pool.begin(), feature_pool.end(), 0);
  }

  // Uniform random subset via partial Fisher-Yates, returned in ascending
  // order so the tie-break in best_split sees features lowest-index first.
  std::vector<int> draw_candidates() {
    if (features_per_split >= n_features) return feature_pool;
    for (int i = 0; i < features_per_split; ++i) {
      const std::size_t j =
          static_cast<std::size_t>(i) +
          rng.next_below(static_cast<std::uint64_t>(n_features - i));
      std::swap(feature_pool[static_cast<std::size_t>(i)], feature_pool[j]);
    }
    std::vector<int> candidates(feature_pool.begin(), feature_pool.begin() + features_per_split);
    std::sort(candidates.begin(), candidates.end());
    return candidates;
  }

  std::int32_t build(std::vector<std::size_t>&& rows, int depth) {
    const std::int32_t index = static_cast<std::int32_t>(tree.size());
    tree.emplace_back();
    const ClassCounts counts = count_labels(data, rows);
    tree[index].counts = counts;
    tree[index].label = majority_label(counts);

    const bool pure = counts[0] == 0 || counts[1] == 0;
    const bool too_small =
        rows.size() < 2 * static_cast<std::size_t>(config.min_samples_leaf);
    const bool too_deep = config.max_depth > 0 && depth >= config.max_depth;
    if (pure || too_small || too_deep) return index;

    const auto split = best_split(data, rows, draw_candidates());
    if (!split || split->impurity_decrease < config.min_impurity_decrease) return index;

    std::vector<std::size_t> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (std::size_t row : rows) {
      const double value = data[row].features[static_cast<std::size_t>(split->feature)];
      (value <= split->threshold ? left_rows : right_rows).push_back(row);
    }
    rows.clear();
    rows.shrink_to_fit();

    const std::int32_t left = build(std::move(left_rows), depth + 1);
    const std::int32_t right = build(std::move(right_rows), depth + 1);
    tree[index].feature = split->feature;
    tree[index].threshold = split->threshold;
    tree[index].left = left;
    tree[index].right = right;
    return index;
  }
};

}  // namespace

Tree grow_tree(const Dataset& data, std::vector<std::size_t> rows, const ForestConfig& config,
               int n_features, Rng& rng) {
  if (rows.empty()) throw std::invalid_argument("grow_tree: no samples");
  int fps = config.features_per_split;
  if (fps <= 0) {
    fps = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n_features))));
  }
  fps = std::min(fps, n_features);
  TreeBuilder builder(data, config, n_features, fps, rng);
  builder.build(std::move(rows), 0);
  return std::move(builder.tree);
}

std::vector<std::size_t> bootstrap_sample(std::size_t dataset_size, std::size_t size, Rng& rng) {
  if (dataset_size == 0) throw std::invalid_argument("bootstrap_sample: empty dataset");
  std::vector<std::size_t> rows(size);
  for (std::size_t i = 0; i < size; ++i) {
    rows[i] = static_cast<std::size_t>(rng.next_below(dataset_size));
  }
  return rows;
}

std::size_t effective_bootstrap_size(const ForestConfig& config, std::size_t dataset_size) {
  std::size_t size = config.bootstrap_size;
  if (config.bootstrap_cap_multiple > 0.0) {
    const auto cap = static_cast<std::size_t>(
        config.bootstrap_cap_multiple * static_cast<double>(dataset_size));
    size = std::min(size, std::max<std::size_t>(1, cap));
  }
  return size;
}

Forest train_forest(const Dataset& data, ForestConfig config) {
  if (config.n_trees < 1) throw std::invalid_argument("train_forest: n_trees must be >= 1");
  if (config.min_samples_leaf < 1) {
    throw std::invalid_argument("train_forest: min_samples_leaf must be >= 1");
  }
  if (config.bootstrap_size < 1) {
    throw std::invalid_argument("train_forest: bootstrap_size must be >= 1");
  }
  if (data.empty()) throw std::invalid_argument("train_forest: empty dataset");

  const std::size_t n_features = data[0].features.size();
  ClassCounts counts{0, 0};
  for (const Sample& sample : data) {
    if (sample.features.size() != n_features) {
      throw std::invalid_argument("train_forest: inconsistent feature dimensions");
    }
    ++counts[label_slot(sample.label)];
  }
  if (counts[0] == 0 || counts[1] == 0) {
    throw std::invalid_argument("train_forest: dataset must contain both classes");
  }

  const std::size_t sample_size = effective_bootstrap_size(config, data.size());

  Forest forest;
  forest.config = config;
  forest.dim = static_cast<int>(n_features);
  forest.trees.resize(static_cast<std::size_t>(config.n_trees));

  auto train_one = [&](std::size_t i) {
    Rng rng(mix_seed(config.seed, i));
    auto rows = bootstrap_sample(data.size(), sample_size, rng);
    forest.trees[i] = grow_tree(data, std::move(rows), config, static_cast<int>(n_features), rng);
  };

  const int threads = std::max(1, config.threads);
  if (threads == 1 || config.n_trees == 1) {
    for (std::size_t i = 0; i < forest.trees.size(); ++i) train_one(i);
  } else {
    std::vector<std::thread> workers;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= forest.trees.size()) break;
          train_one(i);
        }
      });
    }
    for (std::thread& worker : workers) worker.join();
  }
  return forest;
}

Prediction predict(const Forest& forest, const PairFeatures& features) {
  if (static_cast<int>(features.size()) != forest.dim) {
    throw std::invalid_argument("predict: feature dimension " + std::to_string(features.size()) +
                                " does not match forest dimension " + std::to_string(forest.dim));
  }
  std::int64_t clone_votes = 0;
  for (const Tree& tree : forest.trees) {
    std::size_t node = 0;
    while (!tree[node].is_leaf()) {
      const TreeNode& current = tree[node];
      node = features[static_cast<std::size_t>(current.feature)] <= current.threshold
                 ? static_cast<std::size_t>(current.left)
                 : static_cast<std::size_t>(current.right);
    }
    if (tree[node].label == PairLabel::Clone) ++clone_votes;
  }
  const auto n_trees = static_cast<std::int64_t>(forest.trees.size());
  Prediction prediction;
  prediction.vote_fraction = static_cast<double>(clone_votes) / static_cast<double>(n_trees);
  prediction.label = 2 * clone_votes > n_trees ? PairLabel::Clone : PairLabel::NonClone;
  return prediction;
}

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr int kForestFormatVersion = 1;

ordered_json config_to_json(const ForestConfig& config) {
  ordered_json j;
  j["n_trees"] = config.n_trees;
  j["max_depth"] = config.max_depth;
  j["min_samples_leaf"] = config.min_samples_leaf;
  j["min_impurity_decrease"] = config.min_impurity_decrease;
  j["bootstrap_size"] = config.bootstrap_size;
  j["bootstrap_cap_multiple"] = config.bootstrap_cap_multiple;
  j["seed"] = config.seed;
  j["features_per_split"] = config.features_per_split;
  j["threads"] = config.threads;
  return j;
}

ForestConfig config_from_json(const json& j) {
  ForestConfig config;
  config.n_trees = j.at("n_trees").get<int>();
  config.max_depth = j.at("max_depth").get<int>();
  config.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  config.min_impurity_decrease = j.at("min_impurity_decrease").get<double>();
  config.bootstrap_size = j.at("bootstrap_size").get<std::size_t>();
  config.bootstrap_cap_multiple = j.at("bootstrap_cap_multiple").get<double>();
  config.seed = j.at("seed").get<std::uint64_t>();
  config.features_per_split = j.at("features_per_split").get<int>();
  config.threads = j.value("threads", 1);
  return config;
}

}  // namespace

void save_forest(const Forest& forest, const std::string& path) {
  ordered_json j;
  j["version"] = kForestFormatVersion;
  j["n_trees"] = forest.trees.size();
  j["dim"] = forest.dim;
  j["config"] = config_to_json(forest.config);
  ordered_json trees = ordered_json::array();
  for (const Tree& tree : forest.trees) {
    ordered_json nodes = ordered_json::array();
    for (const TreeNode& node : tree) {
      ordered_json n;
      if (node.is_leaf()) {
        n["label"] = to_string(node.label);
        n["counts"] = node.counts;
      } else {
        n["f"] = node.feature;
        n["t"] = node.threshold;
        n["l"] = node.left;
        n["r"] = node.right;
      }
      nodes.push_back(std::move(n));
    }
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write forest file: " + path);
  out << j.dump() << '\n';
}

Forest load_forest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("forest file not found: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw InputError(path + ": malformed forest JSON");

  try {
    if (j.at("version").get<int>() != kForestFormatVersion) {
      throw InputError(path + ": unsupported forest format version");
    }
    Forest forest;
    forest.dim = j.at("dim").get<int>();
    forest.config = config_from_json(j.at("config"));
    const auto& trees = j.at("trees");
    forest.trees.reserve(trees.size());
    for (const auto& nodes : trees) {
      Tree tree;
      tree.reserve(nodes.size());
      for (const auto& n : nodes) {
        TreeNode node;
        if (n.contains("f")) {
          node.feature = n.at("f").get<std::int32_t>();
          node.threshold = n.at("t").get<double>();
          node.left = n.at("l").get<std::int32_t>();
          node.right = n.at("r").get<std::int32_t>();
          if (node.feature < 0 || node.feature >= forest.dim) {
            throw InputError(path + ": node feature index out of range");
          }
          if (node.left < 0 || node.right < 0 ||
              static_cast<std::size_t>(node.left) >= nodes.size() ||
              static_cast<std::size_t>(node.right) >= nodes.size()) {
            throw InputError(path + ": node child index out of range");
          }
        } else {
          auto label = pair_label_from_string(n.at("label").get<std::string>());
          if (!label) throw InputError(path + ": invalid leaf label");
          node.label = *label;
          node.counts = n.at("counts").get<ClassCounts>();
        }
        tree.push_back(node);
      }
      if (tree.empty()) throw InputError(path + ": empty tree");
      forest.trees.push_back(std::move(tree));
    }
    if (forest.trees.size() != j.at("n_trees").get<std::size_t>()) {
      throw InputError(path + ": tree count mismatch");
    }
    return forest;
  } catch (const json::exception& e) {
    throw InputError(path + ": invalid forest file: " + e.what());
  }
}

}  // namespace clonedet
