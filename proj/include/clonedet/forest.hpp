#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clonedet/rng.hpp"
#include "clonedet/sampling.hpp"

namespace clonedet {

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 0;                    // 0 = unbounded
  int min_samples_leaf = 2;             // nodes with < 2*min_samples_leaf become leaves
  double min_impurity_decrease = 0.0;   // any positive decrease is accepted at 0
  std::size_t bootstrap_size = 100000;
  double bootstrap_cap_multiple = 1.0;  // clamp bootstrap_size to this multiple of |dataset|; 0 = no cap
  std::uint64_t seed = 0;
  int features_per_split = 0;           // 0 = floor(sqrt(feature count))
  int threads = 1;                      // trees are independent; seeds keep any count deterministic
};

// Class counts are indexed [non-clone, clone].
inline constexpr std::size_t kNonCloneSlot = 0;
inline constexpr std::size_t kCloneSlot = 1;
using ClassCounts = std::array<std::int64_t, 2>;

struct TreeNode {
  std::int32_t feature = -1;  // internal when >= 0
  double threshold = 0.0;     // x[feature] <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  PairLabel label = PairLabel::NonClone;  // leaf fields
  ClassCounts counts{0, 0};

  bool is_leaf() const { return feature < 0; }
};

using Tree = std::vector<TreeNode>;  // root at index 0

struct Forest {
  ForestConfig config;
  int dim = 0;
  std::vector<Tree> trees;
};

// 1 - sum_c (n_c/n)^2. Throws when the total count is zero.
double gini(const ClassCounts& counts);

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity_decrease = 0.0;
};

// Evaluates every midpoint between consecutive distinct sorted values of each
// candidate feature; returns the split with the largest weighted Gini
// decrease (ties: lowest feature index, then lowest threshold), or nullopt
// when no split yields a positive decrease.
std::optional<Split> best_split(const Dataset& data, const std::vector<std::size_t>& rows,
                                const std::vector<int>& candidate_features);

// CART recursion: a node becomes a leaf when it is pure, has fewer than
// 2*min_samples_leaf rows, hits max_depth, or no candidate split helps. At
// each node, candidate features are a uniform random subset of size
// features_per_split. Leaf label is the majority class; ties go non-clone.
Tree grow_tree(const Dataset& data, std::vector<std::size_t> rows, const ForestConfig& config,
               int n_features, Rng& rng);

// `size` uniform draws with replacement from [0, dataset_size).
std::vector<std::size_t> bootstrap_sample(std::size_t dataset_size, std::size_t size, Rng& rng);

// Effective per-tree sample size after the cap multiple is applied.
std::size_t effective_bootstrap_size(const ForestConfig& config, std::size_t dataset_size);

// Tree i is grown from seed mix_seed(config.seed, i), so serial and threaded
// training produce identical forests. Throws on a single-class dataset.
Forest train_forest(const Dataset& data, ForestConfig config);

struct Prediction {
  PairLabel label = PairLabel::NonClone;
  double vote_fraction = 0.0;  // clone votes / n_trees
};

// Majority vote over the trees; a tie goes non-clone. Throws on dimension
// mismatch.
Prediction predict(const Forest& forest, const PairFeatures& features);

// Versioned JSON: header plus one flat node array per tree.
void save_forest(const Forest& forest, const std::string& path);
Forest load_forest(const std::string& path);

}  // namespace clonedet
