#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clonedet/lexer.hpp"

namespace clonedet {

struct SkipGramConfig {
  int dim = 100;                    // vector size d
  int window = 5;                   // context radius
  int epochs = 5;
  double learning_rate = 0.025;     // decays linearly to min_learning_rate
  double min_learning_rate = 1e-4;
  int negative_samples = 5;         // 0 = exact softmax
  std::uint64_t seed = 0;
  std::uint64_t min_count = 1;
};

// Token vectors: input_vectors holds the center-word representations used for
// fragment features, output_vectors the context-side parameters of the
// conditional probability. Both are V x dim, row-major.
struct EmbeddingModel {
  Vocabulary vocabulary;
  int dim = 0;
  std::vector<double> input_vectors;
  std::vector<double> output_vectors;

  std::size_t vocab_size() const { return vocabulary.size(); }
  double* input_row(std::size_t index) { return input_vectors.data() + index * dim; }
  const double* input_row(std::size_t index) const { return input_vectors.data() + index * dim; }
  double* output_row(std::size_t index) { return output_vectors.data() + index * dim; }
  const double* output_row(std::size_t index) const { return output_vectors.data() + index * dim; }
};

// p(context | center) = exp(u_ctx . v_cen) / sum_t exp(u_t . v_cen), computed
// with max-subtraction. The denominator runs over the whole vocabulary,
// including the center token itself.
double softmax_probability(const EmbeddingModel& model, std::uint32_t context,
                           std::uint32_t center);

// Sum over all (center, context-in-window) pairs of log p(context | center).
// Tokens absent from the vocabulary are dropped before windows are formed.
double corpus_objective(const EmbeddingModel& model, const std::vector<TokenSequence>& corpus,
                        int window);

// Gradient of log p(context | center) with respect to every entry of the two
// matrices. grad_input / grad_output are resized to V*dim and zero-filled.
// The exact-softmax training step applies exactly these gradients.
void log_probability_gradients(const EmbeddingModel& model, std::uint32_t context,
                               std::uint32_t center, std::vector<double>& grad_input,
                               std::vector<double>& grad_output);

// SGD over (center, context) pairs in corpus order. negative_samples = 0
// ascends the exact softmax log-likelihood; k > 0 uses the sampled binary
// logistic surrogate with a unigram^0.75 noise distribution. Deterministic
// for a fixed seed (training is single-threaded).
EmbeddingModel train_skipgram(const std::vector<TokenSequence>& corpus,
                              const SkipGramConfig& config);

struct FragmentVector {
  std::string fragment_id;
  std::vector<double> values;
};

// Dimension-wise mean of the input vectors of the fragment's in-vocabulary
// tokens. Throws when no token is in the vocabulary.
FragmentVector fragment_vector(const TokenSequence& fragment, const EmbeddingModel& model,
                               std::string fragment_id = {});

using PairFeatures = std::vector<double>;

// Concatenation [a; b], length 2*dim. Throws on dimension mismatch.
PairFeatures pair_features(const FragmentVector& a, const FragmentVector& b);

// Text format: first line "V d", then V lines "token x1 ... xd" with the
// input vectors in index order, then a "#output" sentinel line and the output
// vectors in the same layout. Floats use shortest round-trip decimals.
void save_embedding(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_embedding(const std::string& path);

}  // namespace clonedet
