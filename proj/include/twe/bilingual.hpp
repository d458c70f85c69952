// Copyright 2026 The TWE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "twe/embedding_set.hpp"
#include "twe/error.hpp"
#include "twe/io.hpp"
#include "twe/text.hpp"

namespace twe {

/// Sentence-aligned bitext. Line i of the l1 side translates line i of l2.
struct ParallelCorpus {
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> pairs;
  std::string l1;
  std::string l2;
};

/// Reads two line-aligned plain-text files and tokenizes each line like a
/// news document. Pairs where either side tokenizes to nothing are skipped.
inline ParallelCorpus load_parallel(const std::filesystem::path& l1_path, const std::filesystem::path& l2_path,
                                    std::string l1, std::string l2) {
  auto read_lines = [](const std::filesystem::path& p) {
    std::vector<std::string> lines;
    const auto text = io::read_file(p);
    io::for_each_line(text, [&](std::size_t, std::string_view line) { lines.emplace_back(line); });
    return lines;
  };
  const auto a = read_lines(l1_path);
  const auto b = read_lines(l2_path);
  if (a.size() != b.size())
    fail(ErrorCode::kLengthMismatch, "parallel files have " + std::to_string(a.size()) + " and " +
                                         std::to_string(b.size()) + " lines");
  ParallelCorpus corpus{{}, std::move(l1), std::move(l2)};
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto ta = tokenize(a[i]);
    auto tb = tokenize(b[i]);
    if (ta.empty() || tb.empty()) continue;
    corpus.pairs.emplace_back(std::move(ta), std::move(tb));
  }
  if (corpus.pairs.empty()) fail(ErrorCode::kEmptyCorpus, "parallel corpus has no usable sentence pairs");
  return corpus;
}

struct BilingualTrainConfig {
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t min_count = 2;
  double lambda = 1.0;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::size_t negative_samples = 5;
  std::uint64_t seed = 1;
  bool left_only = false;  // context from the left of the centre word only

  void validate() const {
    if (dim < 1) fail(ErrorCode::kInvalidArgument, "dim must be >= 1");
    if (window < 1) fail(ErrorCode::kInvalidArgument, "window must be >= 1");
    if (min_count < 1) fail(ErrorCode::kInvalidArgument, "min_count must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail(ErrorCode::kInvalidArgument, "lambda must be >= 0");
    if (epochs < 1) fail(ErrorCode::kInvalidArgument, "epochs must be >= 1");
    if (!(learning_rate > 0.0)) fail(ErrorCode::kInvalidArgument, "learning rate must be positive");
  }
};

struct TrainReport {
  std::vector<double> monolingual_loss_l1;  // mean per (word, context) pair, per epoch
  std::vector<double> monolingual_loss_l2;
  std::vector<double> regularizer_loss;  // mean per parallel-pair update, per epoch
  std::size_t vocab_l1 = 0;
  std::size_t vocab_l2 = 0;
};

// ---------------------------------------------------------------------------
// Cross-lingual regularizer: (λ/2)·‖mean(V¹) − mean(V²)‖² over the word
// vectors of an aligned sentence pair (rows of the two matrices).

inline void check_regularizer_inputs(const Matrix& s1, const Matrix& s2) {
  if (s1.rows() == 0 || s2.rows() == 0) fail(ErrorCode::kEmptySentence, "regularizer needs two nonempty sentences");
  if (s1.cols() != s2.cols())
    fail(ErrorCode::kDimensionMismatch, "sentence vectors have d=" + std::to_string(s1.cols()) + " and d=" +
                                            std::to_string(s2.cols()));
}

inline double regularizer_loss(const Matrix& s1, const Matrix& s2, double lambda) {
  check_regularizer_inputs(s1, s2);
  const RowVector delta = s1.colwise().mean() - s2.colwise().mean();
  return 0.5 * lambda * delta.squaredNorm();
}

/// Gradient of `regularizer_loss` with respect to every row: (λ/m)·Δ for
/// each row of s1 and −(λ/n)·Δ for each row of s2, Δ = mean(s1) − mean(s2).
struct RegularizerGradient {
  Matrix s1;
  Matrix s2;
};

inline RegularizerGradient regularizer_gradient(const Matrix& s1, const Matrix& s2, double lambda) {
  check_regularizer_inputs(s1, s2);
  const RowVector delta = s1.colwise().mean() - s2.colwise().mean();
  RegularizerGradient g;
  g.s1 = (lambda / static_cast<double>(s1.rows()) * delta).replicate(s1.rows(), 1);
  g.s2 = (-lambda / static_cast<double>(s2.rows()) * delta).replicate(s2.rows(), 1);
  return g;
}

namespace detail {

// Skip-gram with negative sampling for one language. All randomness comes
// from the model's own generator, so two models never perturb each other.
class SkipGram {
 public:
  SkipGram(const std::vector<Document>& corpus, const BilingualTrainConfig& config, std::uint64_t seed)
      : config_(config), rng_(seed) {
    build_vocabulary(corpus);
    const auto v = static_cast<Eigen::Index>(vocab_.size());
    const auto d = static_cast<Eigen::Index>(config_.dim);
    input_.resize(v, d);
    const double half = 0.5 / static_cast<double>(config_.dim);
    std::uniform_real_distribution<double> init(-half, half);
    for (Eigen::Index r = 0; r < v; ++r)
      for (Eigen::Index c = 0; c < d; ++c) input_(r, c) = init(rng_);
    output_ = Matrix::Zero(v, d);

    std::vector<double> weights;
    weights.reserve(counts_.size());
    for (auto c : counts_) weights.push_back(std::pow(static_cast<double>(c), 0.75));
    noise_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());

    for (const auto& doc : corpus) {
      if (doc.dropped) continue;
      std::vector<std::size_t> ids;
      for (const auto& t : doc.tokens)
        if (auto it = index_.find(t); it != index_.end()) ids.push_back(it->second);
      if (!ids.empty()) {
        total_words_ += ids.size();
        sentences_.push_back(std::move(ids));
      }
    }
  }

  std::size_t sentence_count() const noexcept { return sentences_.size(); }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }
  Matrix& input() noexcept { return input_; }

  std::optional<std::size_t> id(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Fraction of all scheduled word visits done so far.
  double progress() const {
    return static_cast<double>(words_seen_) /
           (static_cast<double>(config_.epochs) * static_cast<double>(total_words_) + 1.0);
  }

  double learning_rate() const { return config_.learning_rate * std::max(1e-4, 1.0 - progress()); }

  void train_sentence(std::size_t s) {
    const auto& ids = sentences_[s];
    const double alpha = learning_rate();
    const auto d = static_cast<Eigen::Index>(config_.dim);
    RowVector grad(d);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(ids.size());
    const std::ptrdiff_t w = static_cast<std::ptrdiff_t>(config_.window);
    for (std::ptrdiff_t pos = 0; pos < n; ++pos) {
      const std::size_t centre = ids[static_cast<std::size_t>(pos)];
      const std::ptrdiff_t hi = config_.left_only ? pos - 1 : std::min(n - 1, pos + w);
      for (std::ptrdiff_t ctx = std::max<std::ptrdiff_t>(0, pos - w); ctx <= hi; ++ctx) {
        if (ctx == pos) continue;
        grad.setZero();
        auto h = input_.row(static_cast<Eigen::Index>(centre));
        for (std::size_t k = 0; k <= config_.negative_samples; ++k) {
          std::size_t target = ids[static_cast<std::size_t>(ctx)];
          double label = 1.0;
          if (k > 0) {
            target = noise_(rng_);
            if (target == ids[static_cast<std::size_t>(ctx)]) continue;
            label = 0.0;
          }
          auto o = output_.row(static_cast<Eigen::Index>(target));
          const double score = h.dot(o);
          const double sig = 1.0 / (1.0 + std::exp(-score));
          // -log σ(score) for the positive, -log σ(-score) for negatives.
          loss_sum_ += label > 0.0 ? softplus(-score) : softplus(score);
          const double g = (label - sig) * alpha;
          grad += g * o;
          o += g * h;
        }
        h += grad;
        ++pairs_seen_;
      }
    }
    words_seen_ += ids.size();
  }

  /// Mean pair loss since the last call.
  double take_epoch_loss() {
    const double mean = pairs_seen_ ? loss_sum_ / static_cast<double>(pairs_seen_) : 0.0;
    loss_sum_ = 0.0;
    pairs_seen_ = 0;
    return mean;
  }

  EmbeddingSet embeddings(const std::string& language) const {
    return EmbeddingSet(vocab_, input_, language, Collection::kNews);
  }

 private:
  static double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

  void build_vocabulary(const std::vector<Document>& corpus) {
    std::unordered_map<std::string, std::size_t> count;
    std::vector<std::string> first_seen;
    for (const auto& doc : corpus) {
      if (doc.dropped) continue;
      for (const auto& t : doc.tokens)
        if (count[t]++ == 0) first_seen.push_back(t);
    }
    std::vector<std::string> kept;
    for (const auto& t : first_seen)
      if (count[t] >= config_.min_count) kept.push_back(t);
    if (kept.empty())
      fail(ErrorCode::kEmptyVocabulary, "no token occurs at least " + std::to_string(config_.min_count) + " times");
    std::stable_sort(kept.begin(), kept.end(), [&](const auto& a, const auto& b) { return count[a] > count[b]; });
    for (std::size_t i = 0; i < kept.size(); ++i) {
      index_.emplace(kept[i], i);
      counts_.push_back(count[kept[i]]);
    }
    vocab_ = std::move(kept);
  }

  BilingualTrainConfig config_;
  std::mt19937_64 rng_;
  std::vector<std::string> vocab_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> sentences_;
  std::discrete_distribution<std::size_t> noise_;
  Matrix input_;
  Matrix output_;
  std::size_t total_words_ = 0;
  std::size_t words_seen_ = 0;
  std::size_t pairs_seen_ = 0;
  double loss_sum_ = 0.0;
};

inline void check_loss(double value, const char* what, std::size_t epoch) {
  if (!std::isfinite(value))
    fail(ErrorCode::kNonFiniteLoss, std::string(what) + " loss diverged in epoch " + std::to_string(epoch + 1));
}

}  // namespace detail

/// Seed used for each language's generator: l1 gets `seed`, l2 `seed + 1`.
inline std::uint64_t language_seed(std::uint64_t seed, int language_index) {
  return seed + static_cast<std::uint64_t>(language_index);
}

/// Plain skip-gram training of one language, with the same schedule the
/// bilingual trainer uses for each side.
inline EmbeddingSet train_monolingual(const std::vector<Document>& corpus, const BilingualTrainConfig& config,
                                      const std::string& language, std::uint64_t seed,
                                      std::vector<double>* epoch_losses = nullptr) {
  config.validate();
  detail::SkipGram model(corpus, config, seed);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t s = 0; s < model.sentence_count(); ++s) model.train_sentence(s);
    const double loss = model.take_epoch_loss();
    detail::check_loss(loss, "monolingual", epoch);
    if (epoch_losses) epoch_losses->push_back(loss);
  }
  return model.embeddings(language);
}

struct BilingualResult {
  EmbeddingSet l1;
  EmbeddingSet l2;
  TrainReport report;
};

/// Joint training: one skip-gram objective per language plus the sentence
/// mean regularizer on aligned pairs. After every monolingual sentence the
/// next parallel pair (cycling) receives one regularizer step.
inline BilingualResult train_bilingual(const std::vector<Document>& corpus_l1, const std::vector<Document>& corpus_l2,
                                       const ParallelCorpus& parallel, const BilingualTrainConfig& config) {
  config.validate();
  detail::SkipGram m1(corpus_l1, config, language_seed(config.seed, 0));
  detail::SkipGram m2(corpus_l2, config, language_seed(config.seed, 1));

  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> aligned;
  for (const auto& [a, b] : parallel.pairs) {
    std::vector<std::size_t> ia, ib;
    for (const auto& t : a)
      if (auto i = m1.id(t)) ia.push_back(*i);
    for (const auto& t : b)
      if (auto i = m2.id(t)) ib.push_back(*i);
    if (!ia.empty() && !ib.empty()) aligned.emplace_back(std::move(ia), std::move(ib));
  }
  if (aligned.empty() && config.lambda > 0.0)
    warn("no parallel sentence pair has in-vocabulary words on both sides; regularizer is inactive");

  const auto d = static_cast<Eigen::Index>(config.dim);
  std::size_t cursor = 0;
  double reg_sum = 0.0;
  std::size_t reg_updates = 0;
  auto regularize = [&] {
    if (config.lambda == 0.0 || aligned.empty()) return;
    const auto& [ia, ib] = aligned[cursor++ % aligned.size()];
    RowVector mean1 = RowVector::Zero(d), mean2 = RowVector::Zero(d);
    for (auto i : ia) mean1 += m1.input().row(static_cast<Eigen::Index>(i));
    for (auto i : ib) mean2 += m2.input().row(static_cast<Eigen::Index>(i));
    mean1 /= static_cast<double>(ia.size());
    mean2 /= static_cast<double>(ib.size());
    const RowVector delta = mean1 - mean2;
    reg_sum += 0.5 * config.lambda * delta.squaredNorm();
    ++reg_updates;
    const double alpha = config.learning_rate * std::max(1e-4, 1.0 - 0.5 * (m1.progress() + m2.progress()));
    const RowVector step1 = alpha * config.lambda / static_cast<double>(ia.size()) * delta;
    const RowVector step2 = alpha * config.lambda / static_cast<double>(ib.size()) * delta;
    for (auto i : ia) m1.input().row(static_cast<Eigen::Index>(i)) -= step1;
    for (auto i : ib) m2.input().row(static_cast<Eigen::Index>(i)) += step2;
  };

  TrainReport report;
  report.vocab_l1 = m1.vocab_size();
  report.vocab_l2 = m2.vocab_size();
  const std::size_t steps = std::max(m1.sentence_count(), m2.sentence_count());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t s = 0; s < steps; ++s) {
      if (s < m1.sentence_count()) {
        m1.train_sentence(s);
        regularize();
      }
      if (s < m2.sentence_count()) {
        m2.train_sentence(s);
        regularize();
      }
    }
    report.monolingual_loss_l1.push_back(m1.take_epoch_loss());
    report.monolingual_loss_l2.push_back(m2.take_epoch_loss());
    report.regularizer_loss.push_back(reg_updates ? reg_sum / static_cast<double>(reg_updates) : 0.0);
    reg_sum = 0.0;
    reg_updates = 0;
    detail::check_loss(report.monolingual_loss_l1.back(), "monolingual (l1)", epoch);
    detail::check_loss(report.monolingual_loss_l2.back(), "monolingual (l2)", epoch);
    detail::check_loss(report.regularizer_loss.back(), "regularizer", epoch);
  }
  return BilingualResult{m1.embeddings(parallel.l1), m2.embeddings(parallel.l2), std::move(report)};
}

}  // namespace twe
