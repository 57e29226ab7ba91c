#include "clonedet/sampling.hpp"

#include <stdexcept>

#include "clonedet/rng.hpp"

namespace clonedet {

const char* to_string(OversampleStrategy strategy) {
  return strategy == OversampleStrategy::Random ? "random" : "duplicate-all";
}

std::optional<OversampleStrategy> oversample_strategy_from_string(std::string_view text) {
  if (text == "random") return OversampleStrategy::Random;
  if (text == "duplicate-all") return OversampleStrategy::DuplicateAll;
  return std::nullopt;
}

Dataset oversample(const Dataset& dataset, const SamplingConfig& config) {
  if (!(config.target_ratio > 0.0) || config.target_ratio > 0.5) {
    throw std::invalid_argument("oversample: target_ratio must be in (0, 0.5]");
  }

  std::size_t clones = 0;
  for (const Sample& sample : dataset) {
    if (sample.label == PairLabel::Clone) ++clones;
  }
  const std::size_t non_clones = dataset.size() - clones;
  if (clones == 0 || non_clones == 0) {
    throw std::invalid_argument("oversample: dataset must contain both classes");
  }

  const PairLabel minority_label =
      clones < non_clones ? PairLabel::Clone : PairLabel::NonClone;
  std::size_t minority = std::min(clones, non_clones);
  std::size_t total = dataset.size();

  auto ratio_met = [&] {
    return static_cast<double>(minority) >=
           config.target_ratio * static_cast<double>(total);
  };

  Dataset result = dataset;
  if (ratio_met()) return result;

  std::vector<std::size_t> minority_indices;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].label == minority_label) minority_indices.push_back(i);
  }

  Rng rng(config.seed);
  if (config.strategy == OversampleStrategy::Random) {
    while (!ratio_met()) {
      const std::size_t pick = minority_indices[rng.next_below(minority_indices.size())];
      result.push_back(dataset[pick]);
      ++minority;
      ++total;
    }
  } else {
    while (!ratio_met()) {
      for (std::size_t index : minority_indices) result.push_back(dataset[index]);
      minority += minority_indices.size();
      total += minority_indices.size();
    }
  }
  return result;
}

}  // namespace clonedet
