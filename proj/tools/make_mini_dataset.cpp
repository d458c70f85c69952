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

// Writes the bundled mini dataset: tweet/news vectors, two small corpora and
// gold scores derived from the T2N pipeline geometry plus Gaussian noise.
//
//   make_mini_dataset <out-dir>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "twe/twe.hpp"

namespace {

constexpr int kDim = 25;
constexpr int kTopics = 8;
constexpr int kWordsPerTopic = 40;
constexpr int kPairs = 20;
constexpr double kGoldNoise = 0.05;

std::string word(int topic, int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "w%d%02d", topic, i);
  return buf;
}

twe::Matrix random_rotation(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_mini_dataset <out-dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(20170417);
  std::normal_distribution<double> g;

  // News space: topic centres plus per-word spread.
  std::vector<std::string> news_tokens;
  std::vector<twe::RowVector> news_rows;
  std::vector<twe::RowVector> centres;
  for (int t = 0; t < kTopics; ++t) {
    twe::RowVector c(kDim);
    for (int j = 0; j < kDim; ++j) c(j) = g(rng);
    centres.push_back(c);
    for (int i = 0; i < kWordsPerTopic; ++i) {
      twe::RowVector v(kDim);
      for (int j = 0; j < kDim; ++j) v(j) = c(j) + 0.6 * g(rng);
      news_tokens.push_back(word(t, i));
      news_rows.push_back(v);
    }
  }
  for (int i = 0; i < 30; ++i) {
    twe::RowVector v(kDim);
    for (int j = 0; j < kDim; ++j) v(j) = g(rng);
    news_tokens.push_back("newsonly" + std::to_string(i));
    news_rows.push_back(v);
  }

  // Tweet space: a scaled, rotated, shifted copy of the news space with noise.
  const twe::Matrix rot = random_rotation(kDim, rng);
  twe::RowVector shift(kDim);
  for (int j = 0; j < kDim; ++j) shift(j) = 2.0 * g(rng);
  std::vector<std::string> tweet_tokens;
  std::vector<twe::RowVector> tweet_rows;
  for (std::size_t i = 0; i < static_cast<std::size_t>(kTopics * kWordsPerTopic); ++i) {
    twe::RowVector v = 0.5 * news_rows[i] * rot + shift;
    for (int j = 0; j < kDim; ++j) v(j) += 0.01 * g(rng);
    tweet_tokens.push_back(news_tokens[i]);
    tweet_rows.push_back(v);
  }
  for (int i = 0; i < 20; ++i) {
    twe::RowVector v(kDim);
    for (int j = 0; j < kDim; ++j) v(j) = g(rng);
    tweet_tokens.push_back("slang" + std::to_string(i));
    tweet_rows.push_back(v);
  }

  auto to_set = [](const std::vector<std::string>& tokens, const std::vector<twe::RowVector>& rows,
                   const std::string& lang, twe::Collection c) {
    twe::Matrix m(static_cast<Eigen::Index>(rows.size()), kDim);
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i];
    return twe::EmbeddingSet(tokens, m, lang, c);
  };
  const auto news_set = to_set(news_tokens, news_rows, "en", twe::Collection::kNews);
  const auto tweet_set = to_set(tweet_tokens, tweet_rows, "en", twe::Collection::kTweet);

  // Documents. Tweet i mixes topic a_i with some noise words; news j is
  // about topic b_j. Pairs are (tweet i, news i) with a_i == b_i for half.
  std::uniform_int_distribution<int> pick_word(0, kWordsPerTopic - 1);
  std::uniform_int_distribution<int> pick_topic(0, kTopics - 1);
  std::uniform_int_distribution<int> pick_slang(0, 19);
  auto sample_words = [&](int topic, int n, double off_topic, std::vector<std::string>& out) {
    std::bernoulli_distribution stray(off_topic);
    for (int k = 0; k < n; ++k) out.push_back(word(stray(rng) ? pick_topic(rng) : topic, pick_word(rng)));
  };

  nlohmann::json line;
  std::string tweets_jsonl, news_jsonl;
  std::vector<twe::Document> tweet_docs, news_docs;
  for (int i = 0; i < kPairs; ++i) {
    const int a = i % kTopics;
    const int b = (i % 2 == 0) ? a : (a + 1 + i / 2) % kTopics;
    std::vector<std::string> tw;
    sample_words(a, 6, 0.1 + 0.04 * (i % 5), tw);
    std::string text;
    if (i % 3 == 0) text += "Check http://t.co/x" + std::to_string(i) + " ";
    text += "#" + tw[0];
    for (std::size_t k = 1; k < tw.size(); ++k) text += " " + tw[k];
    if (i % 4 == 1) text += " @user" + std::to_string(i);
    text += " slang" + std::to_string(pick_slang(rng)) + "!";
    line = {{"id", "t" + std::to_string(i)}, {"text", text}, {"lang", "en"}, {"kind", "tweet"}};
    tweets_jsonl += line.dump() + "\n";
    tweet_docs.push_back(twe::preprocess(text, twe::DocumentKind::kTweet, "en", "t" + std::to_string(i)));

    std::vector<std::string> nw;
    sample_words(b, 30, 0.15, nw);
    std::string body = "Report:";
    for (const auto& w : nw) body += " " + w;
    body += " newsonly" + std::to_string(i) + ".";
    line = {{"id", "n" + std::to_string(i)}, {"text", body}, {"lang", "en"}, {"kind", "news"}};
    news_jsonl += line.dump() + "\n";
    news_docs.push_back(twe::preprocess(body, twe::DocumentKind::kNews, "en", "n" + std::to_string(i)));
  }
  const std::string rt = "RT @someone: " + word(0, 1) + " " + word(0, 2);
  line = {{"id", "t_rt"}, {"text", rt}, {"lang", "en"}, {"kind", "tweet"}};
  tweets_jsonl += line.dump() + "\n";
  tweet_docs.push_back(twe::preprocess(rt, twe::DocumentKind::kTweet, "en", "t_rt"));

  // Gold from the T2N pipeline itself.
  const auto model = twe::procrustes_fit(twe::common_vocab(tweet_set, news_set), twe::Direction::kT2N);
  const auto mapped = twe::apply_alignment(model, tweet_set);
  const auto tw_weights = twe::tf_idf(tweet_docs);
  const auto nw_weights = twe::tf_idf(news_docs);
  std::normal_distribution<double> noise(0.0, kGoldNoise);
  std::vector<twe::JudgmentRecord> gold;
  for (int i = 0; i < kPairs; ++i) {
    const auto tv = twe::doc_embedding(tweet_docs[static_cast<std::size_t>(i)], mapped, tw_weights);
    const auto nv = twe::doc_embedding(news_docs[static_cast<std::size_t>(i)], news_set, nw_weights);
    const double score = std::clamp(1.0 + twe::cosine(tv.vector, nv.vector) + noise(rng), 0.0, 2.0);
    // Rounded so the file stays readable; well below the injected noise.
    gold.push_back({"t" + std::to_string(i), "n" + std::to_string(i), "en", "en", std::round(score * 1e4) / 1e4, {}});
  }

  twe::io::write_file_atomic(dir / "tweets.vec", twe::format_embeddings(tweet_set));
  twe::io::write_file_atomic(dir / "news.vec", twe::format_embeddings(news_set));
  twe::io::write_file_atomic(dir / "tweets.jsonl", tweets_jsonl);
  twe::io::write_file_atomic(dir / "news.jsonl", news_jsonl);
  twe::io::write_file_atomic(dir / "gold.tsv", twe::format_gold(gold));
  std::cout << "wrote mini dataset to " << dir << " (alignment residual " << model.residual << ")\n";
  return 0;
}
