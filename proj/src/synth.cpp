#include "clonedet/synth.hpp"

#include <array>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "clonedet/rng.hpp"

namespace clonedet {

namespace {

// Binary operator alphabet used to encode line structures. Type-2
// normalization erases identifiers and literals, so operator patterns are
// what keeps generated statements distinguishable after normalization.
const std::array<const char*, 16> kOps = {"+",  "-",  "*",  "/",  "%", "&",  "|",  "^",
                                          "<<", ">>", "==", "!=", "<", ">", "<=", ">="};

struct FamilyLexicon {
  std::string stem;
  std::string functionality;
};

const std::array<FamilyLexicon, 16> kFamilies = {{
    {"download", "Web Download"},
    {"digest", "Secure Hash"},
    {"filecopy", "Copy File"},
    {"unzip", "Decompress Archive"},
    {"ftplogin", "FTP Login"},
    {"bubblesort", "Bubble Sort"},
    {"gridinit", "Grid Init"},
    {"gridevent", "Grid Event Handler"},
    {"mkproject", "Create Project"},
    {"sqlupdate", "SQL Update"},
    {"jsonparse", "Parse JSON"},
    {"imgresize", "Resize Image"},
    {"tcprelay", "TCP Relay"},
    {"logrotate", "Rotate Logs"},
    {"cachesync", "Cache Sync"},
    {"uuidgen", "Generate UUID"},
}};

const std::array<const char*, 15> kVarWords = {"buf", "idx", "tmp", "cnt", "val",
                                               "len", "pos", "acc", "key", "res",
                                               "sum", "off", "arr", "dst", "src"};

constexpr int kBodyLines = 21;   // plus header, return, closing brace = 24 lines
constexpr int kTotalLines = 24;

// Shared-line counts (out of kBodyLines) that put a variant-vs-base pair
// into a given tier: similarity = (kept + 3) / kTotalLines.
const std::array<int, 3> kSt3Kept = {20, 17, 15};          // 0.958, 0.833, 0.750
const std::array<int, 4> kMt3Kept = {13, 12, 11, 10};      // 0.667 .. 0.542
const std::array<int, 6> kWt3Kept = {8, 7, 5, 4, 2, 0};    // 0.458 .. 0.125

enum class Role { Base, CommentsOnly, Renamed, EditSt3, EditMt3, EditWt3 };

Role role_for_index(int index) {
  if (index == 0) return Role::Base;
  switch ((index - 1) % 6) {
    case 0: return Role::CommentsOnly;
    case 1: return Role::Renamed;
    case 2: return Role::EditSt3;
    case 3: return Role::EditMt3;
    default: return Role::EditWt3;
  }
}

// Fixed helper-call pattern per body position; every fragment of every
// family uses the same pattern, so Type-2 identifier numbering of kept
// lines never shifts when other lines are replaced.
int helper_for_position(int position) { return position % 4; }
int template_for_position(int position) { return position % 4; }

struct LineStructure {
  int op0, op1, op2;
};

// Injective (family, generation) -> operator digits per position. Base
// lines use generation 0; each edit variant replaces lines with its own
// generation, so replaced lines never collide with any base line.
LineStructure structure_for(int family, int generation) {
  const int m = family * 32 + generation;
  return {m % 16, (m / 16) % 16, (m / 256) % 16};
}

class FragmentWriter {
 public:
  FragmentWriter(const FamilyLexicon& lexicon, Rng& rng, int name_salt)
      : lexicon_(lexicon), rng_(rng), name_salt_(name_salt) {}

  std::string fresh_var() {
    const std::string word = kVarWords[rng_.next_below(kVarWords.size())];
    return word + std::to_string(name_salt_ * 200 + counter_++);
  }

  std::string helper(int index) {
    static const std::array<const char*, 4> suffixes = {"_open", "_step", "_read", "_close"};
    return lexicon_.stem + suffixes[static_cast<std::size_t>(index)];
  }

  std::string body_line(int position, int generation) {
    const LineStructure s = structure_for(family_index_, generation);
    const std::string h = helper(helper_for_position(position));
    const char* op0 = kOps[static_cast<std::size_t>(s.op0)];
    const char* op1 = kOps[static_cast<std::size_t>(s.op1)];
    const char* op2 = kOps[static_cast<std::size_t>(s.op2)];
    // draw names in a defined order; chained + would leave it unspecified
    std::array<std::string, 7> v;
    const int t = template_for_position(position);
    const int var_count = t == 1 ? 7 : (t == 2 ? 4 : 5);
    for (int i = 0; i < var_count; ++i) v[static_cast<std::size_t>(i)] = fresh_var();
    switch (template_for_position(position)) {
      case 0:
        return "int " + v[0] + " = " + h + "(" + v[1] + ") " + op0 + " " + v[2] + " " + op1 +
               " " + v[3] + " " + op2 + " " + v[4] + ";";
      case 1:
        return v[0] + " = " + h + "(" + v[1] + " " + op0 + " " + v[2] + ", " + v[3] + " " + op1 +
               " " + v[4] + ", " + v[5] + " " + op2 + " " + v[6] + ");";
      case 2: {
        const std::string number = std::to_string(1 + rng_.next_below(999));
        return "long " + v[0] + " = " + v[1] + " " + op0 + " " + h + "(" + v[2] + " " + op1 +
               " " + v[3] + ") " + op2 + " " + number + ";";
      }
      default:
        return v[0] + "[" + v[1] + " " + op0 + " " + v[2] + "] = " + h + "(" + v[3] + ") " +
               op1 + " " + v[4] + " " + op2 + " \"" + lexicon_.stem + " log " +
               std::to_string(position) + "\";";
    }
  }

  void set_family_index(int family_index) { family_index_ = family_index; }

 private:
  const FamilyLexicon& lexicon_;
  Rng& rng_;
  int name_salt_;
  int counter_ = 0;
  int family_index_ = 0;
};

// content_rng drives tokens (names, numbers); layout_rng drives comments and
// indentation only. Comment-only variants replay the base's content stream
// with a different layout stream, which keeps their token sequence identical.
std::string render_fragment(const FamilyLexicon& lexicon, int family_index, int member_index,
                            const std::vector<int>& generations, bool with_comments,
                            Rng& content_rng, Rng& layout_rng) {
  FragmentWriter writer(lexicon, content_rng, member_index);
  writer.set_family_index(family_index);

  static const std::array<const char*, 8> kCommentWords = {"check", "todo", "note", "guard",
                                                           "loop", "flush", "retry", "skip"};
  auto maybe_comment = [&](std::string& out) {
    if (!with_comments || layout_rng.next_below(3) != 0) return;
    out += "  // ";
    out += kCommentWords[layout_rng.next_below(kCommentWords.size())];
    out += ' ';
    out += std::to_string(layout_rng.next_below(100));
    out += '\n';
  };

  std::string out;
  if (with_comments) {
    out += "/* " + lexicon.functionality + " variant */\n";
  }
  out += "static int " + lexicon.stem + "_run" + std::to_string(member_index) +
         "(int n, int m) {\n";
  for (int position = 0; position < kBodyLines; ++position) {
    maybe_comment(out);
    const std::string indent(with_comments && layout_rng.next_below(2) == 0 ? 4 : 2, ' ');
    out += indent + writer.body_line(position, generations[static_cast<std::size_t>(position)]) +
           "\n";
  }
  maybe_comment(out);
  out += "  return n;\n";
  out += "}\n";
  return out;
}

}  // namespace

SynthOutput synthesize_corpus(const SynthSpec& spec) {
  if (spec.families < 2 || spec.families > static_cast<int>(kFamilies.size())) {
    throw std::invalid_argument("synthesize_corpus: families must be in [2, " +
                                std::to_string(kFamilies.size()) + "]");
  }
  if (spec.per_family < 7) {
    throw std::invalid_argument("synthesize_corpus: per_family must be >= 7 to cover all tiers");
  }
  if (spec.cross_pairs < 1) {
    throw std::invalid_argument("synthesize_corpus: cross_pairs must be >= 1");
  }

  Rng rng(spec.seed);
  SynthOutput output;

  // Base token stream per family member 0 is re-rendered for comment-only
  // variants, so their token sequences match the base exactly.
  std::vector<std::vector<std::string>> member_ids(static_cast<std::size_t>(spec.families));

  for (int family = 0; family < spec.families; ++family) {
    const FamilyLexicon& lexicon = kFamilies[static_cast<std::size_t>(family)];
    const std::vector<int> base_generations(kBodyLines, 0);

    // Deterministic sub-stream per family so families are independent.
    Rng family_rng(mix_seed(spec.seed, 1000 + static_cast<std::uint64_t>(family)));
    Rng layout_rng(mix_seed(spec.seed, 3000 + static_cast<std::uint64_t>(family)));
    Rng base_rng(mix_seed(spec.seed, 2000 + static_cast<std::uint64_t>(family)));
    const std::string base_source =
        render_fragment(lexicon, family, 0, base_generations, false, base_rng, layout_rng);

    int st3_cursor = 0, mt3_cursor = 0, wt3_cursor = 0;
    for (int member = 0; member < spec.per_family; ++member) {
      const Role role = role_for_index(member);
      std::string source;
      switch (role) {
        case Role::Base:
          source = base_source;
          break;
        case Role::CommentsOnly: {
          // same tokens as the base: replay the base's naming stream
          Rng replay(mix_seed(spec.seed, 2000 + static_cast<std::uint64_t>(family)));
          source = render_fragment(lexicon, family, 0, base_generations, true, replay, layout_rng);
          break;
        }
        case Role::Renamed: {
          // fresh names and literals, identical structure -> Type-2 equal
          source = render_fragment(lexicon, family, member, base_generations, false, family_rng,
                                   layout_rng);
          break;
        }
        case Role::EditSt3:
        case Role::EditMt3:
        case Role::EditWt3: {
          int kept = 0;
          if (role == Role::EditSt3) {
            kept = kSt3Kept[static_cast<std::size_t>(st3_cursor++ % kSt3Kept.size())];
          } else if (role == Role::EditMt3) {
            kept = kMt3Kept[static_cast<std::size_t>(mt3_cursor++ % kMt3Kept.size())];
          } else {
            kept = kWt3Kept[static_cast<std::size_t>(wt3_cursor++ % kWt3Kept.size())];
          }
          // keep the first `kept` body positions at generation 0, replace the
          // rest with this member's own generation
          std::vector<int> generations(kBodyLines, 0);
          const int generation = 1 + (member % 30);
          for (int position = kept; position < kBodyLines; ++position) {
            generations[static_cast<std::size_t>(position)] = generation;
          }
          source = render_fragment(lexicon, family, member, generations, false, family_rng,
                                   layout_rng);
          break;
        }
      }

      CodeFragment fragment;
      fragment.id = lexicon.stem + "_" + std::to_string(member);
      fragment.source = std::move(source);
      fragment.functionality = lexicon.functionality;
      member_ids[static_cast<std::size_t>(family)].push_back(fragment.id);
      output.fragments.add(std::move(fragment));
    }
  }

  // within-family pairs: label honestly via the corpus classifier
  for (int family = 0; family < spec.families; ++family) {
    const auto& ids = member_ids[static_cast<std::size_t>(family)];
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        const CloneType type = classify_clone_type(output.fragments.at(ids[a]),
                                                   output.fragments.at(ids[b]), true);
        if (type == CloneType::NONE) {
          throw std::logic_error("synthesize_corpus: within-family pair classified NONE");
        }
        output.pairs.push_back({ids[a], ids[b], PairLabel::Clone, type});
      }
    }
  }

  // cross-family pairs: distinct, and verified non-clones
  std::set<std::pair<std::string, std::string>> chosen;
  int produced = 0;
  int attempts = 0;
  while (produced < spec.cross_pairs) {
    if (++attempts > spec.cross_pairs * 50) {
      throw std::logic_error("synthesize_corpus: cannot sample enough cross-family pairs");
    }
    const int family_a = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(spec.families)));
    int family_b = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(spec.families)));
    if (family_a == family_b) continue;
    const auto& ids_a = member_ids[static_cast<std::size_t>(family_a)];
    const auto& ids_b = member_ids[static_cast<std::size_t>(family_b)];
    std::string id_a = ids_a[rng.next_below(ids_a.size())];
    std::string id_b = ids_b[rng.next_below(ids_b.size())];
    if (id_b < id_a) std::swap(id_a, id_b);
    if (!chosen.emplace(id_a, id_b).second) continue;
    if (classify_clone_type(output.fragments.at(id_a), output.fragments.at(id_b), false) !=
        CloneType::NONE) {
      throw std::logic_error("synthesize_corpus: cross-family pair is not a non-clone");
    }
    output.pairs.push_back({id_a, id_b, PairLabel::NonClone, CloneType::NONE});
    ++produced;
  }

  // tier self-check: every ST3 pair's measured similarity must sit in the
  // advertised interval
  for (const LabeledPair& pair : output.pairs) {
    if (pair.clone_type != CloneType::ST3) continue;
    const std::string t2_a =
        normalize_type2(normalize_type1(output.fragments.at(pair.id_a).source));
    const std::string t2_b =
        normalize_type2(normalize_type1(output.fragments.at(pair.id_b).source));
    const double similarity = line_similarity(t2_a, t2_b);
    if (similarity < 0.7 || similarity >= 1.0) {
      throw std::logic_error("synthesize_corpus: ST3 pair similarity out of range");
    }
  }
  return output;
}

}  // namespace clonedet
