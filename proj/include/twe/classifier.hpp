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
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "twe/embedding_set.hpp"
#include "twe/error.hpp"

namespace twe {

enum class Relevance { kIrrelevant, kRelevant };

struct ClassifierConfig {
  double lambda = 1e-4;  // L2 strength
  std::size_t epochs = 50;
  std::uint64_t seed = 1;
};

/// Linear max-margin classifier: relevant iff w·x + b > 0.
class LinearClassifier {
 public:
  LinearClassifier() = default;
  LinearClassifier(Eigen::VectorXd weights, double bias) : weights_(std::move(weights)), bias_(bias) {}

  std::size_t dim() const noexcept { return static_cast<std::size_t>(weights_.size()); }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }

  template <class Derived>
  double decision_value(const Eigen::MatrixBase<Derived>& x) const {
    if (static_cast<std::size_t>(x.size()) != dim())
      fail(ErrorCode::kDimensionMismatch, "classifier expects " + std::to_string(dim()) + " features, got " +
                                              std::to_string(x.size()));
    return x.reshaped().dot(weights_) + bias_;
  }

  template <class Derived>
  Relevance predict(const Eigen::MatrixBase<Derived>& x) const {
    return decision_value(x) > 0.0 ? Relevance::kRelevant : Relevance::kIrrelevant;
  }

 private:
  Eigen::VectorXd weights_;
  double bias_ = 0.0;
};

namespace detail {

// Examples are put in a canonical order before the seeded shuffles, so the
// model does not depend on how the caller ordered them.
inline std::vector<std::size_t> canonical_order(const Matrix& x, const std::vector<Relevance>& y) {
  std::vector<std::size_t> idx(y.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (y[a] != y[b]) return y[a] < y[b];
    const auto ra = x.row(static_cast<Eigen::Index>(a)), rb = x.row(static_cast<Eigen::Index>(b));
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  return idx;
}

}  // namespace detail

/// Pegasos-style stochastic subgradient descent on the L2-regularised hinge
/// loss. The bias is learned as the weight of a constant feature.
inline LinearClassifier train_relevance_classifier(const Matrix& features, const std::vector<Relevance>& labels,
                                                   const ClassifierConfig& config = {}) {
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    fail(ErrorCode::kDimensionMismatch, std::to_string(features.rows()) + " feature rows but " +
                                            std::to_string(labels.size()) + " labels");
  if (labels.size() < 2) fail(ErrorCode::kTooFewPairs, "need at least 2 training examples");
  if (std::all_of(labels.begin(), labels.end(), [&](Relevance r) { return r == labels.front(); }))
    fail(ErrorCode::kSingleClass, "training labels contain a single class");
  if (!features.allFinite()) fail(ErrorCode::kNonFiniteValue, "features contain NaN or Inf");
  if (!(config.lambda > 0.0)) fail(ErrorCode::kInvalidArgument, "lambda must be positive");

  const auto d = features.cols();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
  auto order = detail::canonical_order(features, labels);
  std::mt19937_64 rng(config.seed);
  std::size_t t = 0;
  Eigen::VectorXd x(d + 1);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      ++t;
      x.head(d) = features.row(static_cast<Eigen::Index>(i)).transpose();
      x(d) = 1.0;
      const double y = labels[i] == Relevance::kRelevant ? 1.0 : -1.0;
      const double eta = 1.0 / (config.lambda * static_cast<double>(t));
      const bool violated = y * w.dot(x) < 1.0;
      w *= 1.0 - eta * config.lambda;
      if (violated) w += eta * y * x;
    }
  }
  return LinearClassifier(w.head(d), w(d));
}

inline double accuracy(const LinearClassifier& model, const Matrix& features, const std::vector<Relevance>& labels) {
  if (labels.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (model.predict(features.row(static_cast<Eigen::Index>(i))) == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

/// Pooled k-fold accuracy over a seeded shuffle of the examples.
inline double cross_validated_accuracy(const Matrix& features, const std::vector<Relevance>& labels,
                                       const ClassifierConfig& config = {}, std::size_t folds = 5) {
  if (folds < 2) fail(ErrorCode::kInvalidArgument, "need at least 2 folds");
  if (labels.size() < folds) fail(ErrorCode::kTooFewPairs, "fewer examples than folds");
  auto idx = detail::canonical_order(features, labels);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::shuffle(idx.begin(), idx.end(), rng);

  std::size_t correct = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < idx.size(); ++i) (i % folds == f ? test : train).push_back(idx[i]);
    Matrix xtr(static_cast<Eigen::Index>(train.size()), features.cols());
    std::vector<Relevance> ytr;
    for (std::size_t r = 0; r < train.size(); ++r) {
      xtr.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(train[r]));
      ytr.push_back(labels[train[r]]);
    }
    // A fold whose training part has one class predicts that class.
    const bool single = std::all_of(ytr.begin(), ytr.end(), [&](Relevance r) { return r == ytr.front(); });
    LinearClassifier model = single ? LinearClassifier(Eigen::VectorXd::Zero(features.cols()),
                                                       ytr.front() == Relevance::kRelevant ? 1.0 : -1.0)
                                    : train_relevance_classifier(xtr, ytr, config);
    for (std::size_t i : test)
      if (model.predict(features.row(static_cast<Eigen::Index>(i))) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

}  // namespace twe
