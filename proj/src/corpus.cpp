#include "clonedet/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "clonedet/lexer.hpp"
#include "clonedet/log.hpp"
#include "clonedet/util.hpp"

namespace clonedet {

namespace {

using nlohmann::json;

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.emplace_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

const char* to_string(CloneType type) {
  switch (type) {
    case CloneType::T1: return "T1";
    case CloneType::T2: return "T2";
    case CloneType::ST3: return "ST3";
    case CloneType::MT3: return "MT3";
    case CloneType::WT3T4: return "WT3T4";
    case CloneType::NONE: return "NONE";
  }
  return "NONE";
}

const char* to_string(PairLabel label) {
  return label == PairLabel::Clone ? "clone" : "non-clone";
}

std::optional<CloneType> clone_type_from_string(std::string_view text) {
  if (text == "T1") return CloneType::T1;
  if (text == "T2") return CloneType::T2;
  if (text == "ST3") return CloneType::ST3;
  if (text == "MT3") return CloneType::MT3;
  if (text == "WT3T4") return CloneType::WT3T4;
  if (text == "NONE") return CloneType::NONE;
  return std::nullopt;
}

std::optional<PairLabel> pair_label_from_string(std::string_view text) {
  if (text == "clone") return PairLabel::Clone;
  if (text == "non-clone") return PairLabel::NonClone;
  return std::nullopt;
}

std::optional<std::pair<double, double>> similarity_interval(CloneType type) {
  switch (type) {
    case CloneType::ST3: return std::pair{0.7, 1.0};
    case CloneType::MT3: return std::pair{0.5, 0.7};
    case CloneType::WT3T4: return std::pair{0.0, 0.5};
    default: return std::nullopt;
  }
}

CloneType tier_for_similarity(double similarity) {
  if (similarity >= 0.7) return CloneType::ST3;
  if (similarity >= 0.5) return CloneType::MT3;
  return CloneType::WT3T4;
}

void FragmentStore::add(CodeFragment fragment) {
  if (fragment.id.empty()) throw std::invalid_argument("fragment id must be nonempty");
  if (fragment.source.empty()) {
    throw std::invalid_argument("fragment \"" + fragment.id + "\" has empty source");
  }
  if (by_id_.count(fragment.id) > 0) {
    throw std::invalid_argument("duplicate fragment id \"" + fragment.id + "\"");
  }
  by_id_.emplace(fragment.id, fragments_.size());
  fragments_.push_back(std::move(fragment));
}

const CodeFragment* FragmentStore::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &fragments_[it->second];
}

const CodeFragment& FragmentStore::at(const std::string& id) const {
  const CodeFragment* fragment = find(id);
  if (fragment == nullptr) throw std::out_of_range("unknown fragment id \"" + id + "\"");
  return *fragment;
}

FragmentStore load_fragments(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("fragments file not found: " + path);

  FragmentStore store;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      throw InputError(path + ": line " + std::to_string(line_number) + ": malformed record");
    }
    for (const char* field : {"id", "source"}) {
      if (!record.contains(field) || !record[field].is_string()) {
        throw InputError(path + ": line " + std::to_string(line_number) +
                         ": missing field \"" + field + "\"");
      }
    }
    CodeFragment fragment;
    fragment.id = record["id"].get<std::string>();
    fragment.source = record["source"].get<std::string>();
    if (record.contains("functionality") && record["functionality"].is_string()) {
      fragment.functionality = record["functionality"].get<std::string>();
    }
    try {
      store.add(std::move(fragment));
    } catch (const std::invalid_argument& e) {
      throw InputError(path + ": line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  if (store.empty()) log::warn("fragments file is empty: " + path);
  log::info("loaded " + std::to_string(store.size()) + " fragments from " + path);
  return store;
}

void save_fragments(const FragmentStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write fragments file: " + path);
  for (const CodeFragment& fragment : store.fragments()) {
    nlohmann::ordered_json record;
    record["id"] = fragment.id;
    record["source"] = fragment.source;
    if (!fragment.functionality.empty()) record["functionality"] = fragment.functionality;
    out << record.dump() << '\n';
  }
}

PairSet load_pairs(const std::string& path, const FragmentStore& store) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("pairs file not found: " + path);

  std::string line;
  if (!std::getline(in, line)) {
    log::warn("pairs file is empty: " + path);
    return {};
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "id_a,id_b,label,clone_type") {
    throw InputError(path + ": invalid header, expected id_a,id_b,label,clone_type");
  }

  PairSet pairs;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ": line " + std::to_string(line_number);
    auto fields = split_csv_row(line);
    if (fields.size() != 4) throw InputError(where + ": expected 4 fields");

    LabeledPair pair;
    pair.id_a = fields[0];
    pair.id_b = fields[1];
    for (const std::string& id : {pair.id_a, pair.id_b}) {
      if (store.find(id) == nullptr) {
        throw InputError(where + ": unknown fragment id \"" + id + "\"");
      }
    }
    if (pair.id_a == pair.id_b) throw InputError(where + ": id_a equals id_b");
    auto label = pair_label_from_string(fields[2]);
    if (!label) throw InputError(where + ": invalid label \"" + fields[2] + "\"");
    auto type = clone_type_from_string(fields[3]);
    if (!type) throw InputError(where + ": invalid clone_type \"" + fields[3] + "\"");
    pair.label = *label;
    pair.clone_type = *type;
    const bool is_none = pair.clone_type == CloneType::NONE;
    if (is_none != (pair.label == PairLabel::NonClone)) {
      throw InputError(where + ": type/label mismatch (" + fields[2] + " with " + fields[3] + ")");
    }
    pairs.push_back(std::move(pair));
  }
  log::info("loaded " + std::to_string(pairs.size()) + " pairs from " + path);
  return pairs;
}

void save_pairs(const PairSet& pairs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write pairs file: " + path);
  out << "id_a,id_b,label,clone_type\n";
  for (const LabeledPair& pair : pairs) {
    out << pair.id_a << ',' << pair.id_b << ',' << to_string(pair.label) << ','
        << to_string(pair.clone_type) << '\n';
  }
}

namespace {

// Shared pretty-printer: one space between tokens, line break after ; { }.
std::string layout_tokens(const TokenSequence& tokens) {
  std::string out;
  bool line_start = true;
  for (const std::string& token : tokens) {
    if (!line_start) out += ' ';
    out += token;
    line_start = false;
    if (token == ";" || token == "{" || token == "}") {
      out += '\n';
      line_start = true;
    }
  }
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

bool is_identifier_token(const std::string& token) {
  return !token.empty() && (std::isalpha(static_cast<unsigned char>(token[0])) || token[0] == '_') &&
         !is_keyword(token);
}

bool is_numeric_token(const std::string& token) {
  if (token.empty()) return false;
  if (std::isdigit(static_cast<unsigned char>(token[0]))) return true;
  return token.size() >= 2 && token[0] == '.' && std::isdigit(static_cast<unsigned char>(token[1]));
}

}  // namespace

std::string normalize_type1(std::string_view source) {
  return layout_tokens(tokenize(source));
}

std::string normalize_type2(std::string_view type1_normalized) {
  TokenSequence tokens = tokenize(type1_normalized);
  std::unordered_map<std::string, std::string> renames;
  for (std::string& token : tokens) {
    if (is_identifier_token(token)) {
      auto it = renames.emplace(token, "id" + std::to_string(renames.size())).first;
      token = it->second;
    } else if (is_numeric_token(token)) {
      token = "0";
    } else if (token[0] == '"') {
      token = "\"\"";
    } else if (token[0] == '\'') {
      token = "''";
    }
  }
  return layout_tokens(tokens);
}

double line_similarity(std::string_view a, std::string_view b) {
  const std::vector<std::string> lines_a = split_lines(a);
  const std::vector<std::string> lines_b = split_lines(b);
  if (lines_a.empty() || lines_b.empty()) {
    throw std::invalid_argument("line_similarity: input has no lines");
  }
  std::unordered_map<std::string, std::size_t> counts;
  for (const std::string& line : lines_a) ++counts[line];
  std::size_t shared = 0;
  for (const std::string& line : lines_b) {
    auto it = counts.find(line);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++shared;
    }
  }
  return static_cast<double>(shared) / static_cast<double>(std::max(lines_a.size(), lines_b.size()));
}

CloneType classify_clone_type(const CodeFragment& a, const CodeFragment& b,
                              bool functionally_same) {
  const std::string t1_a = normalize_type1(a.source);
  const std::string t1_b = normalize_type1(b.source);
  if (t1_a == t1_b) return CloneType::T1;
  const std::string t2_a = normalize_type2(t1_a);
  const std::string t2_b = normalize_type2(t1_b);
  if (t2_a == t2_b) return CloneType::T2;
  if (!functionally_same) return CloneType::NONE;
  if (t2_a.empty() || t2_b.empty()) return CloneType::WT3T4;
  return tier_for_similarity(line_similarity(t2_a, t2_b));
}

}  // namespace clonedet
