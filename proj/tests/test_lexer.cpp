#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "clonedet/lexer.hpp"
#include "clonedet/rng.hpp"

using namespace clonedet;

namespace {

std::string join_with_spaces(const TokenSequence& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

TEST_CASE("tokenize splits statements into expected tokens") {
  CHECK(tokenize("int x = 0;") == TokenSequence{"int", "x", "=", "0", ";"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("a>=b // cmp") == TokenSequence{"a", ">=", "b"});
  CHECK(tokenize("x+=1") == TokenSequence{"x", "+=", "1"});
  CHECK(tokenize("a->b::c") == TokenSequence{"a", "->", "b", "::", "c"});
}

TEST_CASE("tokenize drops comments and keeps literals whole") {
  CHECK(tokenize("x /* a long\ncomment */ y") == TokenSequence{"x", "y"});
  CHECK(tokenize("s = \"a b\";") == TokenSequence{"s", "=", "\"a b\"", ";"});
  CHECK(tokenize("s = \"q\\\"w\";") == TokenSequence{"s", "=", "\"q\\\"w\"", ";"});
  CHECK(tokenize("c = 'x';") == TokenSequence{"c", "=", "'x'", ";"});
  // an unescaped newline terminates the literal
  const TokenSequence broken = tokenize("s = \"abc\ndef\"");
  CHECK(broken[2] == "\"abc");
  CHECK(std::find(broken.begin(), broken.end(), "def") != broken.end());
}

TEST_CASE("tokenize handles numeric literal shapes") {
  CHECK(tokenize("0x1F 12L 1.5e-3f .5 3.") ==
        TokenSequence{"0x1F", "12L", "1.5e-3f", ".5", "3."});
  // dangling exponent letters belong to the next identifier
  CHECK(tokenize("1e") == TokenSequence{"1", "e"});
}

TEST_CASE("unknown bytes become single-character tokens") {
  CHECK(tokenize("a $ b") == TokenSequence{"a", "$", "b"});
  CHECK(tokenize("@#") == TokenSequence{"@", "#"});
}

TEST_CASE("tokenize is idempotent through space-joined round trips") {
  const std::vector<std::string> sources = {
      "int x = 0;",
      "for (int i=0;i<n;++i) { sum += arr[i]; }",
      "s = \"a b\" + 'c' + 0x1F; // trailing",
      "a>=b && c||d /*x*/ <<= \"q\\\"w\"",
      "weird $$ @@ bytes 1.5e10L",
  };
  for (const std::string& source : sources) {
    const TokenSequence once = tokenize(source);
    const TokenSequence twice = tokenize(join_with_spaces(once));
    CHECK(once == twice);
  }
}

TEST_CASE("build_vocabulary counts, filters and orders") {
  const std::vector<TokenSequence> corpus = {{"a", "a", "b"}};
  const Vocabulary v1 = build_vocabulary(corpus, 1);
  REQUIRE(v1.size() == 2);
  CHECK(v1.tokens[0] == "a");
  CHECK(v1.tokens[1] == "b");
  CHECK(v1.frequencies[0] == 2);
  CHECK(v1.frequencies[1] == 1);
  CHECK(v1.lookup("a") == 0);
  CHECK(v1.lookup("zz") == -1);

  const Vocabulary v2 = build_vocabulary(corpus, 2);
  REQUIRE(v2.size() == 1);
  CHECK(v2.tokens[0] == "a");

  CHECK_THROWS(build_vocabulary({{}, {}}, 1));
  CHECK_THROWS(build_vocabulary({}, 1));
  CHECK_THROWS(build_vocabulary(corpus, 3));
}

TEST_CASE("vocabulary ties break lexicographically and indices are a permutation") {
  const std::vector<TokenSequence> corpus = {{"beta", "alpha", "gamma", "alpha", "beta", "gamma"}};
  const Vocabulary v = build_vocabulary(corpus, 1);
  REQUIRE(v.size() == 3);
  CHECK(v.tokens == std::vector<std::string>{"alpha", "beta", "gamma"});
  std::vector<bool> seen(v.size(), false);
  for (const auto& [token, index] : v.index) {
    (void)token;
    REQUIRE(index < v.size());
    CHECK(!seen[index]);
    seen[index] = true;
  }
}

TEST_CASE("build_vocabulary is invariant to corpus ordering") {
  std::vector<TokenSequence> corpus;
  Rng rng(9);
  for (int i = 0; i < 40; ++i) {
    TokenSequence sequence;
    for (int j = 0; j < 12; ++j) {
      sequence.push_back(std::string(1, static_cast<char>('a' + rng.next_below(6))));
    }
    corpus.push_back(sequence);
  }
  const Vocabulary base = build_vocabulary(corpus, 2);

  std::vector<TokenSequence> shuffled = corpus;
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[rng.next_below(i)]);
  }
  const Vocabulary again = build_vocabulary(shuffled, 2);
  CHECK(base.tokens == again.tokens);
  CHECK(base.frequencies == again.frequencies);
}
