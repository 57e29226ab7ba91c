#pragma once

#include <cstdint>
#include <string>

#include "clonedet/corpus.hpp"

namespace clonedet {

// Desk-scale corpus generator. Each family is one functionality; fragments
// within a family are clones of a base function at controlled tiers:
// comment/layout variants (T1), renamed variants (T2), and statement-replace
// variants whose shared-line fraction lands in the ST3/MT3/WT3T4 intervals.
// Cross-family pairs are non-clones. Labels are produced by running
// classify_clone_type on every emitted pair, and the generator verifies the
// advertised tier properties before returning.
struct SynthSpec {
  int families = 10;
  int per_family = 20;
  int cross_pairs = 200;  // non-clone pairs sampled across families
  std::uint64_t seed = 0;
};

struct SynthOutput {
  FragmentStore fragments;
  PairSet pairs;
};

SynthOutput synthesize_corpus(const SynthSpec& spec);

}  // namespace clonedet
