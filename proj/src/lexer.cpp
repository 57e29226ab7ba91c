#include "clonedet/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>
#include <unordered_set>

namespace clonedet {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }
bool is_hex_digit(char c) { return std::isxdigit(static_cast<unsigned char>(c)); }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

bool is_number_suffix(char c) {
  switch (c) {
    case 'f': case 'F': case 'l': case 'L': case 'u': case 'U': case 'd': case 'D':
      return true;
    default:
      return false;
  }
}

const std::unordered_set<std::string_view>& two_char_operators() {
  static const std::unordered_set<std::string_view> table = {
      "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=",
      "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "->", "::",
  };
  return table;
}

// Consumes a string or character literal starting at `i` (which points at the
// opening quote). The literal ends at the matching unescaped quote, at an
// unescaped newline, or at end of input, whichever comes first.
std::size_t scan_quoted(std::string_view s, std::size_t i) {
  const char quote = s[i];
  std::size_t j = i + 1;
  while (j < s.size()) {
    const char c = s[j];
    if (c == '\n' || c == '\r') break;
    if (c == '\\' && j + 1 < s.size() && s[j + 1] != '\n' && s[j + 1] != '\r') {
      j += 2;
      continue;
    }
    ++j;
    if (c == quote) break;
  }
  return j;
}

std::size_t scan_number(std::string_view s, std::size_t i) {
  std::size_t j = i;
  if (s[j] == '0' && j + 1 < s.size() && (s[j + 1] == 'x' || s[j + 1] == 'X')) {
    j += 2;
    while (j < s.size() && is_hex_digit(s[j])) ++j;
  } else {
    while (j < s.size() && is_digit(s[j])) ++j;
    if (j < s.size() && s[j] == '.') {
      ++j;
      while (j < s.size() && is_digit(s[j])) ++j;
    }
    if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
      std::size_t k = j + 1;
      if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
      if (k < s.size() && is_digit(s[k])) {
        j = k;
        while (j < s.size() && is_digit(s[j])) ++j;
      }
    }
  }
  while (j < s.size() && is_number_suffix(s[j])) ++j;
  return j;
}

}  // namespace

TokenSequence tokenize(std::string_view source) {
  TokenSequence tokens;
  std::size_t i = 0;
  const std::size_t n = source.size();
  while (i < n) {
    const char c = source[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && source[i + 1] == '/') {
      while (i < n && source[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && source[i + 1] == '*') {
      i += 2;
      while (i + 1 < n && !(source[i] == '*' && source[i + 1] == '/')) ++i;
      i = (i + 1 < n) ? i + 2 : n;
      continue;
    }
    if (c == '"' || c == '\'') {
      const std::size_t j = scan_quoted(source, i);
      tokens.emplace_back(source.substr(i, j - i));
      i = j;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < n && is_ident_char(source[j])) ++j;
      tokens.emplace_back(source.substr(i, j - i));
      i = j;
      continue;
    }
    if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(source[i + 1]))) {
      const std::size_t j = scan_number(source, i);
      tokens.emplace_back(source.substr(i, j - i));
      i = j;
      continue;
    }
    if (i + 1 < n) {
      const std::string_view pair = source.substr(i, 2);
      if (two_char_operators().count(pair) > 0) {
        tokens.emplace_back(pair);
        i += 2;
        continue;
      }
    }
    tokens.emplace_back(source.substr(i, 1));
    ++i;
  }
  return tokens;
}

bool is_keyword(std::string_view token) {
  static const std::unordered_set<std::string_view> keywords = {
      // Java
      "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
      "class", "const", "continue", "default", "do", "double", "else", "enum",
      "extends", "final", "finally", "float", "for", "goto", "if", "implements",
      "import", "instanceof", "int", "interface", "long", "native", "new",
      "package", "private", "protected", "public", "return", "short", "static",
      "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
      "transient", "try", "void", "volatile", "while", "var", "record", "yield",
      "sealed", "permits", "true", "false", "null",
      // C/C++ additions
      "auto", "bool", "constexpr", "decltype", "delete", "explicit", "extern",
      "friend", "inline", "mutable", "namespace", "nullptr", "operator",
      "register", "signed", "sizeof", "struct", "template", "typedef",
      "typename", "union", "unsigned", "using", "virtual", "wchar_t",
  };
  return keywords.count(token) > 0;
}

Vocabulary build_vocabulary(const std::vector<TokenSequence>& corpus, std::uint64_t min_count) {
  if (corpus.empty()) throw std::invalid_argument("build_vocabulary: empty corpus");
  if (min_count < 1) throw std::invalid_argument("build_vocabulary: min_count must be >= 1");

  std::unordered_map<std::string, std::uint64_t> counts;
  for (const TokenSequence& sequence : corpus) {
    for (const std::string& token : sequence) ++counts[token];
  }

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  kept.reserve(counts.size());
  for (auto& entry : counts) {
    if (entry.second >= min_count) kept.emplace_back(entry.first, entry.second);
  }
  if (kept.empty()) {
    throw std::runtime_error("build_vocabulary: no token reaches min_count=" +
                             std::to_string(min_count));
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary vocab;
  vocab.tokens.reserve(kept.size());
  vocab.frequencies.reserve(kept.size());
  vocab.index.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    vocab.tokens.push_back(kept[i].first);
    vocab.frequencies.push_back(kept[i].second);
    vocab.index.emplace(kept[i].first, static_cast<std::uint32_t>(i));
  }
  return vocab;
}

}  // namespace clonedet
