#include "clonedet/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "clonedet/kernels.hpp"
#include "clonedet/rng.hpp"
#include "clonedet/util.hpp"

namespace clonedet {

namespace {

void validate_config(const SkipGramConfig& config) {
  if (config.dim < 1) throw std::invalid_argument("skip-gram: dim must be >= 1");
  if (config.window < 1) throw std::invalid_argument("skip-gram: window must be >= 1");
  if (config.epochs < 1) throw std::invalid_argument("skip-gram: epochs must be >= 1");
  if (!(config.learning_rate > 0)) {
    throw std::invalid_argument("skip-gram: learning_rate must be > 0");
  }
  if (config.negative_samples < 0) {
    throw std::invalid_argument("skip-gram: negative_samples must be >= 0");
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Scores u_t . v_center for every vocabulary token; returns the max.
double score_all(const EmbeddingModel& model, const double* center_vector,
                 std::vector<double>& scores) {
  const std::size_t vocab = model.vocab_size();
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < vocab; ++t) {
    scores[t] = kernels::dot(model.output_row(t), center_vector, model.dim);
    max_score = std::max(max_score, scores[t]);
  }
  return max_score;
}

// Maps token sequences to vocabulary indices, dropping out-of-vocabulary
// tokens; empty results are skipped.
std::vector<std::vector<std::uint32_t>> index_corpus(const EmbeddingModel& model,
                                                     const std::vector<TokenSequence>& corpus) {
  std::vector<std::vector<std::uint32_t>> sequences;
  sequences.reserve(corpus.size());
  for (const TokenSequence& tokens : corpus) {
    std::vector<std::uint32_t> indices;
    indices.reserve(tokens.size());
    for (const std::string& token : tokens) {
      const std::int64_t idx = model.vocabulary.lookup(token);
      if (idx >= 0) indices.push_back(static_cast<std::uint32_t>(idx));
    }
    if (!indices.empty()) sequences.push_back(std::move(indices));
  }
  return sequences;
}

// Cumulative unigram^0.75 noise distribution for negative sampling.
class NoiseDistribution {
 public:
  explicit NoiseDistribution(const std::vector<std::uint64_t>& frequencies) {
    cumulative_.reserve(frequencies.size());
    double total = 0.0;
    for (std::uint64_t f : frequencies) {
      total += std::pow(static_cast<double>(f), 0.75);
      cumulative_.push_back(total);
    }
  }

  std::uint32_t sample(Rng& rng) const {
    const double u = rng.next_double() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::uint32_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

// One exact-softmax ascent step on the pair (center, context). All gradients
// are taken at the pre-update parameters.
void exact_softmax_step(EmbeddingModel& model, std::uint32_t center, std::uint32_t context,
                        double lr, std::vector<double>& scores, std::vector<double>& probs,
                        std::vector<double>& center_grad) {
  const std::size_t vocab = model.vocab_size();
  const int dim = model.dim;
  double* center_vector = model.input_row(center);

  const double max_score = score_all(model, center_vector, scores);
  double denom = 0.0;
  for (std::size_t t = 0; t < vocab; ++t) {
    probs[t] = std::exp(scores[t] - max_score);
    denom += probs[t];
  }
  for (std::size_t t = 0; t < vocab; ++t) probs[t] /= denom;

  // center gradient u_ctx - sum_t p_t u_t, before any output row moves
  std::fill(center_grad.begin(), center_grad.end(), 0.0);
  for (std::size_t t = 0; t < vocab; ++t) {
    kernels::axpy(-probs[t], model.output_row(t), center_grad.data(), dim);
  }
  kernels::add(center_grad.data(), model.output_row(context), dim);

  for (std::size_t t = 0; t < vocab; ++t) {
    const double coef = lr * ((t == context ? 1.0 : 0.0) - probs[t]);
    kernels::axpy(coef, center_vector, model.output_row(t), dim);
  }
  kernels::axpy(lr, center_grad.data(), center_vector, dim);
}

void negative_sampling_step(EmbeddingModel& model, std::uint32_t center, std::uint32_t context,
                            double lr, int k, const NoiseDistribution& noise, Rng& rng,
                            std::vector<double>& center_delta) {
  const int dim = model.dim;
  double* center_vector = model.input_row(center);
  std::fill(center_delta.begin(), center_delta.end(), 0.0);

  auto update_target = [&](std::uint32_t target, double label) {
    double* output = model.output_row(target);
    const double score = kernels::dot(output, center_vector, dim);
    const double g = lr * (label - sigmoid(score));
    kernels::axpy(g, output, center_delta.data(), dim);
    kernels::axpy(g, center_vector, output, dim);
  };

  update_target(context, 1.0);
  for (int i = 0; i < k; ++i) {
    const std::uint32_t negative = noise.sample(rng);
    if (negative == context) continue;
    update_target(negative, 0.0);
  }
  kernels::add(center_vector, center_delta.data(), dim);
}

}  // namespace

double softmax_probability(const EmbeddingModel& model, std::uint32_t context,
                           std::uint32_t center) {
  const std::size_t vocab = model.vocab_size();
  if (context >= vocab || center >= vocab) {
    throw std::out_of_range("softmax_probability: token index out of range");
  }
  std::vector<double> scores(vocab);
  const double max_score = score_all(model, model.input_row(center), scores);
  double denom = 0.0;
  for (std::size_t t = 0; t < vocab; ++t) denom += std::exp(scores[t] - max_score);
  return std::exp(scores[context] - max_score) / denom;
}

double corpus_objective(const EmbeddingModel& model, const std::vector<TokenSequence>& corpus,
                        int window) {
  if (window < 1) throw std::invalid_argument("corpus_objective: window must be >= 1");
  const std::size_t vocab = model.vocab_size();
  std::vector<double> scores(vocab);
  double objective = 0.0;
  for (const auto& sequence : index_corpus(model, corpus)) {
    const std::ptrdiff_t length = static_cast<std::ptrdiff_t>(sequence.size());
    for (std::ptrdiff_t pos = 0; pos < length; ++pos) {
      const double max_score = score_all(model, model.input_row(sequence[pos]), scores);
      double denom = 0.0;
      for (std::size_t t = 0; t < vocab; ++t) denom += std::exp(scores[t] - max_score);
      const double log_denom = std::log(denom) + max_score;
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, pos - window);
      const std::ptrdiff_t hi = std::min(length - 1, pos + window);
      for (std::ptrdiff_t j = lo; j <= hi; ++j) {
        if (j == pos) continue;
        objective += scores[sequence[j]] - log_denom;
      }
    }
  }
  return objective;
}

void log_probability_gradients(const EmbeddingModel& model, std::uint32_t context,
                               std::uint32_t center, std::vector<double>& grad_input,
                               std::vector<double>& grad_output) {
  const std::size_t vocab = model.vocab_size();
  const int dim = model.dim;
  if (context >= vocab || center >= vocab) {
    throw std::out_of_range("log_probability_gradients: token index out of range");
  }
  grad_input.assign(vocab * dim, 0.0);
  grad_output.assign(vocab * dim, 0.0);

  std::vector<double> scores(vocab);
  const double* center_vector = model.input_row(center);
  const double max_score = score_all(model, center_vector, scores);
  std::vector<double> probs(vocab);
  double denom = 0.0;
  for (std::size_t t = 0; t < vocab; ++t) {
    probs[t] = std::exp(scores[t] - max_score);
    denom += probs[t];
  }

  double* center_grad = grad_input.data() + static_cast<std::size_t>(center) * dim;
  for (std::size_t t = 0; t < vocab; ++t) {
    probs[t] /= denom;
    kernels::axpy(-probs[t], model.output_row(t), center_grad, dim);
    const double coef = (t == context ? 1.0 : 0.0) - probs[t];
    kernels::axpy(coef, center_vector, grad_output.data() + t * dim, dim);
  }
  kernels::add(center_grad, model.output_row(context), dim);
}

EmbeddingModel train_skipgram(const std::vector<TokenSequence>& corpus,
                              const SkipGramConfig& config) {
  validate_config(config);

  EmbeddingModel model;
  model.vocabulary = build_vocabulary(corpus, config.min_count);
  model.dim = config.dim;
  const std::size_t vocab = model.vocab_size();
  const int dim = config.dim;

  Rng rng(config.seed);
  model.input_vectors.resize(vocab * dim);
  const double half_range = 0.5 / dim;
  for (double& value : model.input_vectors) value = rng.next_double(-half_range, half_range);
  model.output_vectors.assign(vocab * dim, 0.0);

  const auto sequences = index_corpus(model, corpus);
  std::uint64_t total_tokens = 0;
  for (const auto& sequence : sequences) total_tokens += sequence.size();
  const std::uint64_t total_steps =
      std::max<std::uint64_t>(1, total_tokens * static_cast<std::uint64_t>(config.epochs));

  const int k = config.negative_samples;
  NoiseDistribution noise(model.vocabulary.frequencies);
  std::vector<double> scores(vocab), probs(vocab), center_buffer(dim);

  std::uint64_t processed = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& sequence : sequences) {
      const std::ptrdiff_t length = static_cast<std::ptrdiff_t>(sequence.size());
      for (std::ptrdiff_t pos = 0; pos < length; ++pos) {
        const double progress = static_cast<double>(processed) / static_cast<double>(total_steps);
        const double lr =
            std::max(config.min_learning_rate, config.learning_rate * (1.0 - progress));
        ++processed;

        const std::uint32_t center = sequence[pos];
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, pos - config.window);
        const std::ptrdiff_t hi = std::min(length - 1, pos + config.window);
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
          if (j == pos) continue;
          const std::uint32_t context = sequence[j];
          if (k == 0) {
            exact_softmax_step(model, center, context, lr, scores, probs, center_buffer);
          } else {
            negative_sampling_step(model, center, context, lr, k, noise, rng, center_buffer);
          }
        }
      }
    }
  }
  return model;
}

FragmentVector fragment_vector(const TokenSequence& fragment, const EmbeddingModel& model,
                               std::string fragment_id) {
  FragmentVector result;
  result.fragment_id = std::move(fragment_id);
  result.values.assign(model.dim, 0.0);
  std::size_t known = 0;
  for (const std::string& token : fragment) {
    const std::int64_t idx = model.vocabulary.lookup(token);
    if (idx < 0) continue;
    kernels::add(result.values.data(), model.input_row(static_cast<std::size_t>(idx)), model.dim);
    ++known;
  }
  if (known == 0) {
    throw std::runtime_error("unrepresentable fragment" +
                             (result.fragment_id.empty() ? std::string{}
                                                         : " \"" + result.fragment_id + "\"") +
                             ": no token is in the vocabulary");
  }
  kernels::scale(result.values.data(), 1.0 / static_cast<double>(known), model.dim);
  return result;
}

PairFeatures pair_features(const FragmentVector& a, const FragmentVector& b) {
  if (a.values.size() != b.values.size()) {
    throw std::invalid_argument("pair_features: dimension mismatch " +
                                std::to_string(a.values.size()) + " vs " +
                                std::to_string(b.values.size()));
  }
  PairFeatures features;
  features.reserve(a.values.size() * 2);
  features.insert(features.end(), a.values.begin(), a.values.end());
  features.insert(features.end(), b.values.begin(), b.values.end());
  return features;
}

void save_embedding(const EmbeddingModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write embedding file: " + path);
  const std::size_t vocab = model.vocab_size();
  out << vocab << ' ' << model.dim << '\n';
  auto write_block = [&](const std::vector<double>& matrix) {
    for (std::size_t t = 0; t < vocab; ++t) {
      out << model.vocabulary.tokens[t];
      const double* row = matrix.data() + t * model.dim;
      for (int i = 0; i < model.dim; ++i) out << ' ' << format_double(row[i]);
      out << '\n';
    }
  };
  write_block(model.input_vectors);
  out << "#output\n";
  write_block(model.output_vectors);
}

namespace {

// A row is "token x1 ... xd". Tokens may contain spaces (string literals), so
// the d numeric fields are peeled off the right end.
void parse_embedding_row(const std::string& line, int dim, std::string& token,
                         double* row, const std::string& where) {
  std::string_view rest = line;
  for (int i = dim - 1; i >= 0; --i) {
    const std::size_t space = rest.rfind(' ');
    if (space == std::string_view::npos) throw InputError(where + ": too few fields");
    double value = 0.0;
    if (!parse_double(rest.substr(space + 1), value)) {
      throw InputError(where + ": bad float field");
    }
    row[i] = value;
    rest = rest.substr(0, space);
  }
  if (rest.empty()) throw InputError(where + ": empty token");
  token.assign(rest);
}

}  // namespace

EmbeddingModel load_embedding(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("embedding file not found: " + path);

  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty embedding file");
  std::size_t vocab = 0;
  int dim = 0;
  {
    std::size_t space = line.find(' ');
    double v = 0.0, d = 0.0;
    if (space == std::string::npos || !parse_double(line.substr(0, space), v) ||
        !parse_double(line.substr(space + 1), d) || v < 1 || d < 1) {
      throw InputError(path + ": invalid header line");
    }
    vocab = static_cast<std::size_t>(v);
    dim = static_cast<int>(d);
  }

  EmbeddingModel model;
  model.dim = dim;
  model.vocabulary.tokens.reserve(vocab);
  model.vocabulary.frequencies.assign(vocab, 0);  // counts are not persisted
  model.input_vectors.resize(vocab * dim);
  model.output_vectors.assign(vocab * dim, 0.0);

  std::string token;
  for (std::size_t t = 0; t < vocab; ++t) {
    if (!std::getline(in, line)) throw InputError(path + ": truncated input block");
    parse_embedding_row(line, dim, token, model.input_vectors.data() + t * dim,
                        path + ": line " + std::to_string(t + 2));
    if (model.vocabulary.index.count(token) > 0) {
      throw InputError(path + ": duplicate token \"" + token + "\"");
    }
    model.vocabulary.index.emplace(token, static_cast<std::uint32_t>(t));
    model.vocabulary.tokens.push_back(token);
  }

  if (std::getline(in, line) && line == "#output") {
    for (std::size_t t = 0; t < vocab; ++t) {
      if (!std::getline(in, line)) throw InputError(path + ": truncated output block");
      parse_embedding_row(line, dim, token, model.output_vectors.data() + t * dim,
                          path + ": output row " + std::to_string(t));
      if (token != model.vocabulary.tokens[t]) {
        throw InputError(path + ": output block token order mismatch");
      }
    }
  }
  return model;
}

}  // namespace clonedet
