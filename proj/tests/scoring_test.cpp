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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "test_support.hpp"
#include "twe/alignment.hpp"
#include "twe/classifier.hpp"
#include "twe/evaluate.hpp"
#include "twe/judgments.hpp"
#include "twe/stats.hpp"

namespace twe {
namespace {

using testing::random_matrix;

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

// Naive oracles: Pearson through the textbook single formula, Kendall tau-b
// by explicit pair enumeration with tie counting.
double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double sx = std::accumulate(x.begin(), x.end(), 0.0), sy = std::accumulate(y.begin(), y.end(), 0.0);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - sx / n) * (y[i] - sy / n);
    sxx += (x[i] - sx / n) * (x[i] - sx / n);
    syy += (y[i] - sy / n) * (y[i] - sy / n);
  }
  return sxy / std::sqrt(sxx) / std::sqrt(syy);
}

double kendall_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  double c = 0, d = 0, tx = 0, ty = 0, n0 = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j <= i) continue;
      n0 += 1;
      const int sx = (x[i] > x[j]) - (x[i] < x[j]);
      const int sy = (y[i] > y[j]) - (y[i] < y[j]);
      if (sx == 0) tx += 1;
      if (sy == 0) ty += 1;
      if (sx * sy > 0) c += 1;
      if (sx * sy < 0) d += 1;
    }
  return (c - d) / std::sqrt((n0 - tx) * (n0 - ty));
}

TEST(Cosine, Examples) {
  Eigen::RowVector2d a(1, 0), b(1, 1), c(-2, 0);
  EXPECT_NEAR(cosine(a, b), 0.7071067811865475, 1e-15);
  EXPECT_EQ(cosine(a, c), -1.0);
  EXPECT_EQ(cosine(b, b), 1.0);
  EXPECT_EQ(cosine(a, Eigen::RowVector2d(0, 1)), 0.0);
  EXPECT_EQ(code_of([&] { cosine(a, Eigen::RowVector2d(0, 0)); }), ErrorCode::kZeroVector);
  EXPECT_EQ(code_of([&] { cosine(RowVector(a), RowVector(Eigen::RowVector3d(1, 2, 3))); }), ErrorCode::kDimensionMismatch);
}

TEST(Cosine, ScaleInvariantAndBounded) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int i = 0; i < 500; ++i) {
    const RowVector u = random_matrix(1, 7, rng), v = random_matrix(1, 7, rng);
    const double c = cosine(u, v);
    EXPECT_GE(c, -1.0);
    EXPECT_LE(c, 1.0);
    EXPECT_NEAR(cosine(RowVector(scale(rng) * u), RowVector(scale(rng) * v)), c, 1e-12);
    EXPECT_NEAR(cosine(u, v), cosine(v, u), 1e-15);
    EXPECT_EQ(cosine(u, u), 1.0);
  }
}

TEST(Aggregate, MeanOfAnnotators) {
  const std::vector<PairKey> pairs{{"t1", "n1", "en", "en"}, {"t2", "n2", "en", "de"}};
  const auto out = aggregate_judgments(pairs, {{1, 2}, {2, 2}, {0, 1}});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].score, 1.0);
  EXPECT_DOUBLE_EQ(out[1].score, 5.0 / 3.0);
  EXPECT_EQ(out[1].news_lang, "de");
  EXPECT_FALSE(out[0].relevant.has_value());
  EXPECT_EQ(code_of([&] { aggregate_judgments(pairs, {{1, 2}, {2}}); }), ErrorCode::kRaggedRatings);
  EXPECT_EQ(code_of([&] { aggregate_judgments(pairs, {{1, 3}}); }), ErrorCode::kInvalidArgument);
}

TEST(Aggregate, AgreementMatrixIsSymmetric) {
  const auto tau = annotator_agreement({{0, 1, 2, 2}, {0, 1, 2, 1}, {2, 1, 0, 0}});
  EXPECT_EQ(tau[0][0], 1.0);
  EXPECT_EQ(tau[0][1], tau[1][0]);
  EXPECT_NEAR(tau[0][2], -1.0, 1e-12);
}

TEST(Correlation, Examples) {
  const std::vector<double> x{1, 2, 3}, y{1, 3, 2}, rev{3, 2, 1};
  EXPECT_NEAR(pearson(x, y), 0.5, 1e-15);
  EXPECT_NEAR(kendall_tau(x, y), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(pearson(x, rev), -1.0);
  EXPECT_EQ(kendall_tau(x, rev), -1.0);
  EXPECT_EQ(pearson(x, x), 1.0);
  EXPECT_NEAR(pearson(x, std::vector<double>{3, 5, 7}), 1.0, 1e-15);
  EXPECT_EQ(kendall_tau(x, x), 1.0);
}

TEST(Correlation, Errors) {
  const std::vector<double> x{1, 2, 3}, two{1, 2}, one{1}, flat{4, 4, 4};
  EXPECT_EQ(code_of([&] { pearson(x, two); }), ErrorCode::kLengthMismatch);
  EXPECT_EQ(code_of([&] { pearson(one, one); }), ErrorCode::kTooFewPairs);
  EXPECT_EQ(code_of([&] { pearson(x, flat); }), ErrorCode::kZeroVariance);
  EXPECT_EQ(code_of([&] { kendall_tau(x, two); }), ErrorCode::kLengthMismatch);
  EXPECT_EQ(code_of([&] { kendall_tau(flat, x); }), ErrorCode::kAllTied);
}

TEST(Correlation, MatchesOraclesOnRandomInputs) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> len(3, 40), level(0, 4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(len(rng));
    std::vector<double> x(n), y(n);
    const bool ties = trial % 2 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = ties ? level(rng) : g(rng);
      y[i] = ties ? level(rng) : g(rng);
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }) ||
        std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; }))
      continue;
    EXPECT_NEAR(pearson(x, y), pearson_oracle(x, y), 1e-12);
    EXPECT_NEAR(kendall_tau(x, y), kendall_oracle(x, y), 1e-12);
  }
}

TEST(Correlation, Invariances) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> a(0.1, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(25), y(25);
    for (auto& v : x) v = g(rng);
    for (auto& v : y) v = g(rng);
    const double r = pearson(x, y), tau = kendall_tau(x, y);
    std::vector<double> affine(x.size()), monotone(x.size());
    const double s = a(rng), c = g(rng);
    for (std::size_t i = 0; i < x.size(); ++i) {
      affine[i] = s * x[i] + c;
      monotone[i] = std::exp(x[i]);
    }
    EXPECT_NEAR(pearson(affine, y), r, 1e-12);
    EXPECT_NEAR(pearson(y, x), r, 1e-15);
    EXPECT_EQ(kendall_tau(monotone, y), tau);
    EXPECT_GE(r, -1.0);
    EXPECT_LE(r, 1.0);
  }
}

// Two well-separated Gaussian blobs.
std::pair<Matrix, std::vector<Relevance>> blobs(std::size_t n, std::mt19937_64& rng, double gap = 4.0) {
  Matrix x = random_matrix(static_cast<Eigen::Index>(n), 4, rng, 0.5);
  std::vector<Relevance> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % 2 ? Relevance::kRelevant : Relevance::kIrrelevant;
    x(static_cast<Eigen::Index>(i), 0) += y[i] == Relevance::kRelevant ? gap / 2 : -gap / 2;
  }
  return {x, y};
}

TEST(Classifier, SeparatesSeparableData) {
  std::mt19937_64 rng(10);
  const auto [x, y] = blobs(60, rng);
  const auto model = train_relevance_classifier(x, y);
  EXPECT_EQ(accuracy(model, x, y), 1.0);
  EXPECT_EQ(model.dim(), 4u);
  EXPECT_GE(cross_validated_accuracy(x, y, {}, 5), 0.95);
}

TEST(Classifier, IndependentOfExampleOrder) {
  std::mt19937_64 rng(11);
  const auto [x, y] = blobs(40, rng, 1.0);
  std::vector<std::size_t> perm(y.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix xp(x.rows(), x.cols());
  std::vector<Relevance> yp;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    xp.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(perm[i]));
    yp.push_back(y[perm[i]]);
  }
  const auto a = train_relevance_classifier(x, y), b = train_relevance_classifier(xp, yp);
  EXPECT_EQ(a.weights(), b.weights());
  EXPECT_EQ(a.bias(), b.bias());
  EXPECT_EQ(cross_validated_accuracy(x, y), cross_validated_accuracy(xp, yp));
}

TEST(Classifier, Errors) {
  Matrix x = Matrix::Ones(4, 2);
  const std::vector<Relevance> same(4, Relevance::kRelevant);
  EXPECT_EQ(code_of([&] { train_relevance_classifier(x, same); }), ErrorCode::kSingleClass);
  EXPECT_EQ(code_of([&] { train_relevance_classifier(x, {Relevance::kRelevant}); }), ErrorCode::kDimensionMismatch);
  const LinearClassifier model(Eigen::VectorXd::Ones(3), 0.0);
  EXPECT_EQ(code_of([&] { model.decision_value(Eigen::RowVector2d(1, 1)); }), ErrorCode::kDimensionMismatch);
}

TEST(Gold, ParsesScoreAndLabelColumns) {
  const auto scored = parse_gold("tweet_id\tnews_id\ttweet_lang\tnews_lang\tscore\nt1\tn1\ten\tde\t1.5\n");
  ASSERT_EQ(scored.size(), 1u);
  EXPECT_EQ(scored[0].score, 1.5);
  EXPECT_EQ(scored[0].news_lang, "de");
  const auto labelled =
      parse_gold("label\tnews_id\ttweet_id\ttweet_lang\tnews_lang\nrelevant\tn1\tt1\ten\ten\n0\tn2\tt2\ten\ten\n");
  ASSERT_EQ(labelled.size(), 2u);
  EXPECT_EQ(labelled[0].score, 2.0);
  EXPECT_EQ(labelled[0].tweet_id, "t1");
  EXPECT_EQ(labelled[1].relevant, std::optional<bool>(false));
  EXPECT_EQ(parse_gold(format_gold(scored))[0].score, 1.5);
  EXPECT_EQ(code_of([] { parse_gold("tweet_id\tnews_id\n"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_gold("tweet_id\tnews_id\ttweet_lang\tnews_lang\tscore\nt\tn\ten\ten\t3\n"); }),
            ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_gold(""); }), ErrorCode::kEmptyInput);
}

// Synthetic collection: `words` news-space vectors; tweets live in a rotated,
// scaled and shifted copy of that space.
struct Synthetic {
  EmbeddingSet news_set;
  EmbeddingSet tweet_set;
  std::vector<Document> tweets, news;
  std::vector<JudgmentRecord> gold;
};

Synthetic make_synthetic(std::size_t n_pairs, std::uint64_t seed, bool labelled = false) {
  std::mt19937_64 rng(seed);
  const Eigen::Index d = 12, words = 120;
  const Matrix base = random_matrix(words, d, rng);
  const Eigen::MatrixXd rotation = testing::random_orthogonal(d, rng);
  const RowVector shift = random_matrix(1, d, rng, 3.0);
  const Matrix tweet_space = (0.5 * base * rotation).rowwise() + shift;
  const auto tokens = testing::numbered_tokens(static_cast<std::size_t>(words));
  Synthetic s{EmbeddingSet(tokens, base, "en", Collection::kNews),
              EmbeddingSet(tokens, tweet_space, "en", Collection::kTweet), {}, {}, {}};
  std::uniform_int_distribution<std::size_t> pick(0, tokens.size() - 1);
  auto text = [&](std::size_t len) {
    std::string out;
    for (std::size_t k = 0; k < len; ++k) out += tokens[pick(rng)] + " ";
    return out;
  };
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const auto id = std::to_string(i);
    s.tweets.push_back(preprocess(text(5), DocumentKind::kTweet, "en", "t" + id));
    s.news.push_back(preprocess(text(12), DocumentKind::kNews, "en", "n" + id));
  }
  const auto tw = tf_idf(s.tweets), nw = tf_idf(s.news);
  std::normal_distribution<double> noise(0.0, 0.02);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    // Gold: the true news-space similarity, lightly perturbed.
    const double c = cosine(doc_embedding(s.tweets[i], s.news_set, tw).vector,
                            doc_embedding(s.news[i], s.news_set, nw).vector);
    JudgmentRecord r{s.tweets[i].id, s.news[i].id, "en", "en", std::clamp(1.0 + c + noise(rng), 0.0, 2.0), {}};
    if (labelled) {
      r.relevant = c > 0.0;
      r.score = *r.relevant ? 2.0 : 0.0;
    }
    s.gold.push_back(r);
  }
  return s;
}

TEST(Evaluate, IdentityPipelineReproducesExactGold) {
  auto s = make_synthetic(15, 20);
  for (auto& g : s.gold) g.score = 0.0;
  const auto tw = tf_idf(s.tweets), nw = tf_idf(s.news);
  for (std::size_t i = 0; i < s.gold.size(); ++i)
    s.gold[i].score = cosine(doc_embedding(s.tweets[i], s.news_set, tw).vector,
                             doc_embedding(s.news[i], s.news_set, nw).vector);
  const auto report = evaluate_dataset(s.gold, s.tweets, s.news, s.news_set, s.news_set);
  EXPECT_NEAR(report.pearson_r, 1.0, 1e-12);
  EXPECT_EQ(report.n_pairs, 15u);
  EXPECT_EQ(report.skipped, 0u);
  EXPECT_EQ(report.mode, TransformMode::kNone);
  EXPECT_FALSE(report.accuracy.has_value());
  ASSERT_EQ(report.by_language.size(), 1u);
  EXPECT_EQ(report.by_language.begin()->first, "en-en");
}

TEST(Evaluate, AlignmentRecoversCorrelation) {
  const auto s = make_synthetic(20, 21);
  const auto t2n = procrustes_fit(common_vocab(s.tweet_set, s.news_set), Direction::kT2N);
  const auto n2t = procrustes_fit(common_vocab(s.tweet_set, s.news_set), Direction::kN2T);
  // N2T compares documents in tweet geometry; cosine is not translation
  // invariant, so its reference scores are recomputed in that space.
  auto tweet_gold = s.gold;
  const auto tw = tf_idf(s.tweets), nw = tf_idf(s.news);
  for (std::size_t i = 0; i < tweet_gold.size(); ++i)
    tweet_gold[i].score = 1.0 + cosine(doc_embedding(s.tweets[i], s.tweet_set, tw).vector,
                                       doc_embedding(s.news[i], s.tweet_set, nw).vector);
  const auto aligned = evaluate_dataset(s.gold, s.tweets, s.news, s.tweet_set, s.news_set, t2n);
  const auto reverse = evaluate_dataset(tweet_gold, s.tweets, s.news, s.tweet_set, s.news_set, n2t);
  EXPECT_GE(aligned.pearson_r, 0.9);
  EXPECT_GE(reverse.pearson_r, 0.9);
  EXPECT_EQ(aligned.mode, TransformMode::kT2N);
  EXPECT_EQ(reverse.mode, TransformMode::kN2T);
  const auto report_text = format_report(aligned);
  EXPECT_NE(report_text.find("transform\tT2N\n"), std::string::npos);
  EXPECT_NE(format_pair_scores(aligned).find("t0\tn0\ten\ten\t"), std::string::npos);
}

TEST(Evaluate, AccuracyForBinaryGold) {
  const auto s = make_synthetic(40, 22, true);
  const auto t2n = procrustes_fit(common_vocab(s.tweet_set, s.news_set), Direction::kT2N);
  const auto report = evaluate_dataset(s.gold, s.tweets, s.news, s.tweet_set, s.news_set, t2n);
  ASSERT_TRUE(report.accuracy.has_value());
  EXPECT_GE(*report.accuracy, 0.0);
  EXPECT_LE(*report.accuracy, 1.0);
  EXPECT_EQ(report.folds, 5u);
  EXPECT_NE(format_report(report).find("accuracy\t"), std::string::npos);
}

TEST(Evaluate, SkipsUnscorablePairsAndRejectsUnknownIds) {
  auto s = make_synthetic(6, 23);
  s.tweets.push_back(preprocess("RT @x: w1 w2", DocumentKind::kTweet, "en", "rt"));
  s.tweets.push_back(preprocess("unknownword", DocumentKind::kTweet, "en", "oov"));
  s.gold.push_back({"rt", "n0", "en", "en", 1.0, {}});
  s.gold.push_back({"oov", "n1", "en", "en", 1.0, {}});
  const auto report = evaluate_dataset(s.gold, s.tweets, s.news, s.news_set, s.news_set);
  EXPECT_EQ(report.skipped, 2u);
  EXPECT_EQ(report.n_pairs, 6u);

  auto missing = s.gold;
  missing.push_back({"nope", "n0", "en", "en", 1.0, {}});
  EXPECT_EQ(code_of([&] { evaluate_dataset(missing, s.tweets, s.news, s.news_set, s.news_set); }),
            ErrorCode::kUnresolvedId);
  const std::vector<JudgmentRecord> one(s.gold.begin(), s.gold.begin() + 1);
  EXPECT_EQ(code_of([&] { evaluate_dataset(one, s.tweets, s.news, s.news_set, s.news_set); }),
            ErrorCode::kTooFewPairs);
}

}  // namespace
}  // namespace twe
