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

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "twe/alignment.hpp"
#include "twe/classifier.hpp"
#include "twe/embedding_set.hpp"
#include "twe/error.hpp"
#include "twe/io.hpp"
#include "twe/judgments.hpp"
#include "twe/stats.hpp"
#include "twe/text.hpp"

namespace twe {

enum class TransformMode { kNone, kT2N, kN2T };

inline const char* to_string(TransformMode m) {
  switch (m) {
    case TransformMode::kNone: return "none";
    case TransformMode::kT2N: return "T2N";
    case TransformMode::kN2T: return "N2T";
  }
  return "none";
}

struct PairScore {
  JudgmentRecord gold;
  double similarity = 0.0;
  double tweet_coverage = 0.0;
  double news_coverage = 0.0;
};

struct LanguagePairStats {
  std::size_t n_pairs = 0;
  std::optional<double> pearson_r;
};

struct EvalReport {
  double pearson_r = 0.0;
  std::size_t n_pairs = 0;
  std::size_t skipped = 0;
  std::map<std::string, LanguagePairStats> by_language;
  std::optional<double> accuracy;
  std::size_t folds = 0;
  std::size_t dim = 0;
  TransformMode mode = TransformMode::kNone;
  std::vector<PairScore> pairs;
};

struct EvalOptions {
  ClassifierConfig classifier;
  std::size_t folds = 5;
};

namespace detail {

inline std::unordered_map<std::string, const Document*> index_documents(const std::vector<Document>& docs,
                                                                        std::string_view what) {
  std::unordered_map<std::string, const Document*> index;
  for (const auto& d : docs)
    if (!index.emplace(d.id, &d).second)
      fail(ErrorCode::kInvalidArgument, std::string(what) + " id '" + d.id + "' occurs twice");
  return index;
}

}  // namespace detail

/// Scores every gold pair by the cosine of the two tf-idf document vectors
/// and correlates the scores with the gold judgments. A T2N model is applied
/// to the tweet vectors, an N2T model to the news vectors. Pairs where a side
/// has no usable vector are skipped and counted.
inline EvalReport evaluate_dataset(const std::vector<JudgmentRecord>& gold, const std::vector<Document>& tweet_docs,
                                   const std::vector<Document>& news_docs, const EmbeddingSet& tweet_set,
                                   const EmbeddingSet& news_set, const std::optional<AlignmentModel>& model = {},
                                   const EvalOptions& options = {}) {
  if (tweet_set.dim() != news_set.dim())
    fail(ErrorCode::kDimensionMismatch, "tweet vectors have d=" + std::to_string(tweet_set.dim()) +
                                            ", news vectors have d=" + std::to_string(news_set.dim()));
  const auto tweets = detail::index_documents(tweet_docs, "tweet");
  const auto news = detail::index_documents(news_docs, "news");
  for (const auto& g : gold) {
    if (!tweets.count(g.tweet_id)) fail(ErrorCode::kUnresolvedId, "tweet id '" + g.tweet_id + "' not in tweet corpus");
    if (!news.count(g.news_id)) fail(ErrorCode::kUnresolvedId, "news id '" + g.news_id + "' not in news corpus");
  }

  EvalReport report;
  report.dim = tweet_set.dim();
  std::optional<EmbeddingSet> mapped;
  if (model) {
    report.mode = model->direction == Direction::kT2N ? TransformMode::kT2N : TransformMode::kN2T;
    mapped = apply_alignment(*model, model->direction == Direction::kT2N ? tweet_set : news_set);
  }
  const EmbeddingSet& tweet_vectors = report.mode == TransformMode::kT2N ? *mapped : tweet_set;
  const EmbeddingSet& news_vectors = report.mode == TransformMode::kN2T ? *mapped : news_set;

  // Per-collection idf statistics.
  const auto tweet_weights = tf_idf(tweet_docs);
  const auto news_weights = tf_idf(news_docs);

  std::vector<RowVector> features;
  std::vector<Relevance> labels;
  bool all_labelled = !gold.empty();
  for (const auto& g : gold) {
    const Document& t = *tweets.at(g.tweet_id);
    const Document& n = *news.at(g.news_id);
    if (t.dropped || n.dropped) {
      ++report.skipped;
      continue;
    }
    try {
      const auto tv = doc_embedding(t, tweet_vectors, tweet_weights);
      const auto nv = doc_embedding(n, news_vectors, news_weights);
      PairScore score{g, cosine(tv.vector, nv.vector), tv.coverage, nv.coverage};
      report.pairs.push_back(score);
      if (g.relevant) {
        RowVector f(tv.vector.size() + nv.vector.size());
        f << tv.vector, nv.vector;
        features.push_back(std::move(f));
        labels.push_back(*g.relevant ? Relevance::kRelevant : Relevance::kIrrelevant);
      } else {
        all_labelled = false;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoRepresentableTokens && e.code() != ErrorCode::kZeroVector) throw;
      ++report.skipped;
    }
  }

  report.n_pairs = report.pairs.size();
  if (report.n_pairs < 2)
    fail(ErrorCode::kTooFewPairs, std::to_string(report.n_pairs) + " scorable pairs (" +
                                      std::to_string(report.skipped) + " skipped); need at least 2");
  std::vector<double> predicted, expected;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> grouped;
  for (const auto& p : report.pairs) {
    predicted.push_back(p.similarity);
    expected.push_back(p.gold.score);
    auto& [gp, ge] = grouped[p.gold.tweet_lang + "-" + p.gold.news_lang];
    gp.push_back(p.similarity);
    ge.push_back(p.gold.score);
  }
  report.pearson_r = pearson(predicted, expected);
  for (const auto& [key, values] : grouped) {
    LanguagePairStats stats;
    stats.n_pairs = values.first.size();
    try {
      stats.pearson_r = pearson(values.first, values.second);
    } catch (const Error&) {
      // Too few pairs or constant scores within this language pair.
    }
    report.by_language[key] = stats;
  }

  if (all_labelled && !labels.empty()) {
    const bool both = std::any_of(labels.begin(), labels.end(), [](Relevance r) { return r == Relevance::kRelevant; }) &&
                      std::any_of(labels.begin(), labels.end(), [](Relevance r) { return r == Relevance::kIrrelevant; });
    if (both && labels.size() >= options.folds) {
      Matrix x(static_cast<Eigen::Index>(features.size()), features.front().size());
      for (std::size_t i = 0; i < features.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = features[i];
      report.accuracy = cross_validated_accuracy(x, labels, options.classifier, options.folds);
      report.folds = options.folds;
    }
  }
  return report;
}

/// Key/value text form of a report, one "key<TAB>value" per line.
inline std::string format_report(const EvalReport& r) {
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + '\t' + v + '\n'; };
  kv("pearson_r", io::format_double(r.pearson_r));
  kv("n_pairs", std::to_string(r.n_pairs));
  kv("skipped_pairs", std::to_string(r.skipped));
  kv("dim", std::to_string(r.dim));
  kv("transform", to_string(r.mode));
  kv("doc_vector", "tfidf-weighted-mean");
  kv("similarity", "cosine");
  if (r.accuracy) {
    kv("accuracy", io::format_double(*r.accuracy));
    kv("accuracy_folds", std::to_string(r.folds));
    kv("classifier", "linear-hinge-sgd");
    kv("pair_feature", "concat(tweet,news)");
  }
  for (const auto& [key, s] : r.by_language) {
    kv("pairs[" + key + "]", std::to_string(s.n_pairs));
    kv("pearson_r[" + key + "]", s.pearson_r ? io::format_double(*s.pearson_r) : "NA");
  }
  return out;
}

/// Per-pair TSV for plotting: ids, languages, gold score, cosine, coverages.
inline std::string format_pair_scores(const EvalReport& r) {
  std::string out = "tweet_id\tnews_id\ttweet_lang\tnews_lang\tgold\tcosine\ttweet_coverage\tnews_coverage\n";
  for (const auto& p : r.pairs)
    out += p.gold.tweet_id + '\t' + p.gold.news_id + '\t' + p.gold.tweet_lang + '\t' + p.gold.news_lang + '\t' +
           io::format_double(p.gold.score) + '\t' + io::format_double(p.similarity) + '\t' +
           io::format_double(p.tweet_coverage) + '\t' + io::format_double(p.news_coverage) + '\n';
  return out;
}

}  // namespace twe
