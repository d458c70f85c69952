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

#include <random>

#include "test_support.hpp"
#include "toy_corpus.hpp"
#include "twe/bilingual.hpp"

namespace twe {
namespace {

using testing::random_matrix;

TEST(RegularizerLoss, ZeroWhenMeansCoincide) {
  Matrix a(2, 2), b(1, 2);
  a << 1, 0, 0, 1;
  b << 0.5, 0.5;
  EXPECT_EQ(regularizer_loss(a, b, 3.0), 0.0);
}

TEST(RegularizerLoss, UnitGapWithLambdaTwo) {
  Matrix a(1, 3), b(2, 3);
  a << 1, 1, 1;
  b << 1, 1, 0, 1, 1, 0;
  EXPECT_DOUBLE_EQ(regularizer_loss(a, b, 2.0), 1.0);
}

TEST(RegularizerLoss, Errors) {
  Matrix empty(0, 2), one(1, 2), other(1, 3);
  one << 1, 2;
  other << 1, 2, 3;
  try {
    regularizer_loss(empty, one, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptySentence);
  }
  try {
    regularizer_loss(one, other, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(RegularizerProperties, NonNegativeAndLinearInLambda) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> len(1, 9);
  std::uniform_real_distribution<double> lam(0.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix a = random_matrix(len(rng), 6, rng), b = random_matrix(len(rng), 6, rng);
    const double l = lam(rng);
    const double loss = regularizer_loss(a, b, l);
    EXPECT_GE(loss, 0.0);
    EXPECT_EQ(regularizer_loss(a, b, 4.0 * l), 4.0 * loss);
    EXPECT_NEAR(regularizer_loss(a, b, 3.7 * l), 3.7 * loss, 1e-15 * std::max(1.0, loss));
  }
}

TEST(RegularizerProperties, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(42);
  const double eps = 1e-4;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = random_matrix(3 + trial % 4, 5, rng), b = random_matrix(2 + trial % 3, 5, rng);
    const double lambda = 0.5 + trial * 0.1;
    const auto g = regularizer_gradient(a, b, lambda);
    auto check = [&](Matrix& m, const Matrix& analytic) {
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          const double keep = m(i, j);
          m(i, j) = keep + eps;
          const double up = regularizer_loss(a, b, lambda);
          m(i, j) = keep - eps;
          const double down = regularizer_loss(a, b, lambda);
          m(i, j) = keep;
          const double numeric = (up - down) / (2.0 * eps);
          const double denom = std::max({std::abs(numeric), std::abs(analytic(i, j)), 1e-8});
          EXPECT_LE(std::abs(numeric - analytic(i, j)) / denom, 1e-4);
        }
    };
    check(a, g.s1);
    check(b, g.s2);
  }
}

BilingualTrainConfig toy_config() {
  BilingualTrainConfig cfg;
  cfg.dim = 25;
  cfg.lambda = 1.0;
  cfg.epochs = 5;
  cfg.seed = 17;
  return cfg;
}

TEST(TrainBilingual, ZeroLambdaEqualsIndependentMonolingualRuns) {
  const auto toy = testing::make_toy_bitext(150);
  auto cfg = toy_config();
  cfg.lambda = 0.0;
  cfg.epochs = 3;
  const auto joint = train_bilingual(toy.l1, toy.l2, toy.parallel, cfg);
  const auto solo1 = train_monolingual(toy.l1, cfg, "en", language_seed(cfg.seed, 0));
  const auto solo2 = train_monolingual(toy.l2, cfg, "de", language_seed(cfg.seed, 1));
  EXPECT_EQ(joint.l1, solo1);
  EXPECT_EQ(joint.l2, solo2);
}

TEST(TrainBilingual, DeterministicForFixedSeed) {
  const auto toy = testing::make_toy_bitext(100);
  auto cfg = toy_config();
  cfg.epochs = 2;
  const auto a = train_bilingual(toy.l1, toy.l2, toy.parallel, cfg);
  const auto b = train_bilingual(toy.l1, toy.l2, toy.parallel, cfg);
  EXPECT_EQ(a.l1, b.l1);
  EXPECT_EQ(a.l2, b.l2);
  EXPECT_EQ(a.report.monolingual_loss_l1, b.report.monolingual_loss_l1);
}

TEST(TrainBilingual, EpochLossNonIncreasing) {
  const auto toy = testing::make_toy_bitext();
  auto cfg = toy_config();
  cfg.learning_rate = 0.025;
  const auto result = train_bilingual(toy.l1, toy.l2, toy.parallel, cfg);
  const auto& r = result.report;
  ASSERT_EQ(r.monolingual_loss_l1.size(), 5u);
  for (std::size_t e = 1; e < 5; ++e) {
    EXPECT_LE(r.monolingual_loss_l1[e], r.monolingual_loss_l1[e - 1]) << e;
    EXPECT_LE(r.monolingual_loss_l2[e], r.monolingual_loss_l2[e - 1]) << e;
    EXPECT_GE(r.regularizer_loss[e], 0.0);
  }
  EXPECT_EQ(r.vocab_l1, 500u);
  EXPECT_EQ(r.vocab_l2, 500u);
}

TEST(TrainBilingual, RegularizerPullsTranslationsTogether) {
  const auto toy = testing::make_toy_bitext();
  auto cfg = toy_config();
  cfg.epochs = 10;
  const auto result = train_bilingual(toy.l1, toy.l2, toy.parallel, cfg);
  const auto c = testing::cross_lingual_cosines(result.l1, result.l2, toy.vocabulary);
  EXPECT_GT(c.translation, c.random + 0.2) << c.translation << " vs " << c.random;
  EXPECT_EQ(result.l1.language(), "en");
  EXPECT_EQ(result.l2.language(), "de");
  EXPECT_EQ(result.l1.dim(), 25u);
}

TEST(TrainBilingual, MinCountFiltersRareWords) {
  auto toy = testing::make_toy_bitext(50);
  toy.l1.push_back(preprocess("hapax", DocumentKind::kNews, "en", "extra"));
  const auto result = train_bilingual(toy.l1, toy.l2, toy.parallel, toy_config());
  EXPECT_FALSE(result.l1.contains("hapax"));
}

TEST(TrainBilingual, EmptyVocabulary) {
  const auto toy = testing::make_toy_bitext(20);
  try {
    train_bilingual({}, toy.l2, toy.parallel, toy_config());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyVocabulary);
  }
  auto cfg = toy_config();
  cfg.min_count = 1000000;
  try {
    train_bilingual(toy.l1, toy.l2, toy.parallel, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyVocabulary);
  }
}

TEST(TrainBilingual, DivergenceIsReported) {
  const auto toy = testing::make_toy_bitext(60);
  auto cfg = toy_config();
  cfg.lambda = 1e300;
  cfg.learning_rate = 1e3;
  try {
    train_bilingual(toy.l1, toy.l2, toy.parallel, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteLoss);
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

TEST(TrainBilingual, LeftOnlyWindowTrains) {
  const auto toy = testing::make_toy_bitext(80);
  auto cfg = toy_config();
  cfg.left_only = true;
  cfg.epochs = 2;
  const auto result = train_bilingual(toy.l1, toy.l2, toy.parallel, cfg);
  EXPECT_TRUE(std::isfinite(result.report.monolingual_loss_l1.back()));
}

TEST(TrainBilingual, ConfigValidated) {
  const auto toy = testing::make_toy_bitext(10);
  for (auto mutate : std::vector<void (*)(BilingualTrainConfig&)>{
           [](BilingualTrainConfig& c) { c.dim = 0; }, [](BilingualTrainConfig& c) { c.window = 0; },
           [](BilingualTrainConfig& c) { c.min_count = 0; }, [](BilingualTrainConfig& c) { c.lambda = -1; }}) {
    auto cfg = toy_config();
    mutate(cfg);
    try {
      train_bilingual(toy.l1, toy.l2, toy.parallel, cfg);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    }
  }
}

TEST(LoadParallel, AlignsLinesAndSkipsEmptyPairs) {
  testing::TempDir dir;
  testing::write_text(dir / "a.txt", "Hello world\n\nGood day\n");
  testing::write_text(dir / "b.txt", "Hallo Welt\nleer\nGuten Tag\n");
  const auto p = load_parallel(dir / "a.txt", dir / "b.txt", "en", "de");
  ASSERT_EQ(p.pairs.size(), 2u);
  EXPECT_EQ(p.pairs[1].second, (std::vector<std::string>{"guten", "tag"}));
  testing::write_text(dir / "c.txt", "one\n");
  try {
    load_parallel(dir / "a.txt", dir / "c.txt", "en", "de");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
}

}  // namespace
}  // namespace twe
