#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace clonedet {

using TokenSequence = std::vector<std::string>;

// Splits source text into tokens with C-family lexical rules:
//   - identifiers/keywords: [A-Za-z_][A-Za-z0-9_]*
//   - numeric literals: ints, floats, hex, exponents, single-letter suffixes
//   - string/char literals: one token each, quotes kept, escapes respected;
//     an unescaped newline ends the literal
//   - operators: maximal munch, two characters then one, from a fixed table
//   - // and /* */ comments are dropped
// Any other byte becomes a single-character token. Never emits empty tokens.
TokenSequence tokenize(std::string_view source);

// True for tokens the Type-2 normalizer must leave alone.
bool is_keyword(std::string_view token);

struct Vocabulary {
  std::vector<std::string> tokens;                        // index -> token
  std::vector<std::uint64_t> frequencies;                 // index -> corpus count
  std::unordered_map<std::string, std::uint32_t> index;   // token -> index

  std::size_t size() const { return tokens.size(); }

  // Index of the token, or -1 when absent.
  std::int64_t lookup(const std::string& token) const {
    auto it = index.find(token);
    return it == index.end() ? -1 : static_cast<std::int64_t>(it->second);
  }
};

// Tokens whose corpus frequency is >= min_count, indexed by descending
// frequency with ties broken by token text. Throws when nothing survives.
Vocabulary build_vocabulary(const std::vector<TokenSequence>& corpus, std::uint64_t min_count);

}  // namespace clonedet
