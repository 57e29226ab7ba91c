#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clonedet/corpus.hpp"
#include "clonedet/embedding.hpp"

namespace clonedet {

// One training instance: pair features plus label; clone_type rides along for
// per-type evaluation.
struct Sample {
  PairFeatures features;
  PairLabel label = PairLabel::NonClone;
  CloneType clone_type = CloneType::NONE;
};

using Dataset = std::vector<Sample>;

enum class OversampleStrategy { Random, DuplicateAll };

const char* to_string(OversampleStrategy strategy);
std::optional<OversampleStrategy> oversample_strategy_from_string(std::string_view text);

struct SamplingConfig {
  double target_ratio = 0.5;  // minority / total, in (0, 0.5]
  std::uint64_t seed = 0;
  OversampleStrategy strategy = OversampleStrategy::Random;
};

// Appends copies of minority-class instances until minority/total >= the
// target ratio. Random: one uniformly chosen original minority instance per
// step. DuplicateAll: one full copy of the original minority per round.
// Original instances are always retained; the majority class is never
// duplicated. Throws when the dataset holds a single class.
Dataset oversample(const Dataset& dataset, const SamplingConfig& config);

}  // namespace clonedet
