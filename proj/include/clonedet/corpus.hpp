#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace clonedet {

// T1/T2: textually identical after the respective normalization.
// ST3/MT3/WT3T4: tiers of line-based syntactic similarity for pairs known to
// implement the same functionality. NONE marks non-clone pairs.
enum class CloneType { T1, T2, ST3, MT3, WT3T4, NONE };

enum class PairLabel { Clone, NonClone };

const char* to_string(CloneType type);
const char* to_string(PairLabel label);
std::optional<CloneType> clone_type_from_string(std::string_view text);
std::optional<PairLabel> pair_label_from_string(std::string_view text);

// Similarity interval [lo, hi) owned by a Type-3/4 tier; nullopt for T1, T2
// and NONE. ST3 = [0.7, 1), MT3 = [0.5, 0.7), WT3T4 = [0, 0.5).
std::optional<std::pair<double, double>> similarity_interval(CloneType type);

// Tier for a similarity value in [0, 1]. A value of exactly 1 with unequal
// normalized text (pure statement reordering) lands in ST3.
CloneType tier_for_similarity(double similarity);

struct CodeFragment {
  std::string id;
  std::string source;
  std::string functionality;  // optional tag, empty when absent
};

class FragmentStore {
 public:
  // Throws on empty or duplicate id, or empty source.
  void add(CodeFragment fragment);
  const CodeFragment* find(const std::string& id) const;
  const CodeFragment& at(const std::string& id) const;  // throws when missing
  std::size_t size() const { return fragments_.size(); }
  bool empty() const { return fragments_.empty(); }
  const std::vector<CodeFragment>& fragments() const { return fragments_; }

 private:
  std::vector<CodeFragment> fragments_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct LabeledPair {
  std::string id_a;
  std::string id_b;
  PairLabel label = PairLabel::NonClone;
  CloneType clone_type = CloneType::NONE;  // NONE iff label == NonClone

  bool operator==(const LabeledPair&) const = default;
};

using PairSet = std::vector<LabeledPair>;

// JSON-lines, one object per line: {"id": ..., "source": ..., "functionality"?: ...}.
FragmentStore load_fragments(const std::string& path);
void save_fragments(const FragmentStore& store, const std::string& path);

// CSV with header id_a,id_b,label,clone_type. Every id must exist in store.
PairSet load_pairs(const std::string& path, const FragmentStore& store);
void save_pairs(const PairSet& pairs, const std::string& path);

// Comment removal plus strict pretty-printing: one space between tokens, one
// statement per line (a line ends after `;`, `{` or `}`). Idempotent.
std::string normalize_type1(std::string_view source);

// Expects Type-1-normalized input. Renames identifiers to id0, id1, ... in
// first-seen order, numeric literals to 0, string literals to "", char
// literals to ''. Keywords and operators are untouched. Idempotent.
std::string normalize_type2(std::string_view type1_normalized);

// |multiset intersection of lines| / max(line count of a, line count of b),
// computed over nonempty lines. Symmetric. Throws when either side has none.
double line_similarity(std::string_view a, std::string_view b);

// T1 if Type-1 forms are equal, else T2 if Type-2 forms are equal, else the
// similarity tier when the pair is known functionally equivalent, else NONE.
CloneType classify_clone_type(const CodeFragment& a, const CodeFragment& b,
                              bool functionally_same);

}  // namespace clonedet
