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

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "twe/embedding_set.hpp"
#include "twe/error.hpp"
#include "twe/rbo.hpp"

namespace twe {

/// Nearest neighbours of `query`, best first. Never contains the query.
struct RankedList {
  std::string query;
  std::vector<std::string> items;
  std::size_t depth = 0;
};

/// Cosine-similarity search over a fixed pool of candidate tokens of one
/// embedding set. Ties are broken by the candidate's rank in the set, so
/// results are platform independent.
class NeighborIndex {
 public:
  NeighborIndex(const EmbeddingSet& set, const std::vector<std::string>& candidates) : set_(&set) {
    rows_.reserve(candidates.size());
    for (const auto& token : candidates) {
      auto i = set.find(token);
      if (!i) fail(ErrorCode::kOovQuery, "candidate '" + token + "' is not in the " + to_string(set.collection()) +
                                             " vocabulary");
      rows_.push_back(*i);
    }
    build();
  }

  explicit NeighborIndex(const EmbeddingSet& set) : set_(&set) {
    rows_.resize(set.size());
    std::iota(rows_.begin(), rows_.end(), std::size_t{0});
    build();
  }

  RankedList query(std::string_view token, std::size_t k) const {
    if (k == 0) fail(ErrorCode::kInvalidArgument, "neighbour depth k must be >= 1");
    auto qi = set_->find(token);
    if (!qi) fail(ErrorCode::kOovQuery, "'" + std::string(token) + "' is not in the vocabulary");

    RowVector q = set_->row(*qi);
    const double qn = q.norm();
    if (qn > 0.0) q /= qn;
    const Eigen::VectorXd sims = normalized_ * q.transpose();

    std::vector<std::size_t> order;
    order.reserve(rows_.size());
    for (std::size_t c = 0; c < rows_.size(); ++c)
      if (rows_[c] != *qi) order.push_back(c);
    const std::size_t take = std::min(k, order.size());
    auto better = [&](std::size_t a, std::size_t b) {
      const double sa = sims(static_cast<Eigen::Index>(a)), sb = sims(static_cast<Eigen::Index>(b));
      if (sa != sb) return sa > sb;
      return rows_[a] < rows_[b];
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), better);

    RankedList out;
    out.query = std::string(token);
    out.depth = k;
    out.items.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.items.push_back(set_->tokens()[rows_[order[i]]]);
    return out;
  }

 private:
  // Rows scaled to unit length; zero rows stay zero (cosine 0 to everything).
  void build() {
    normalized_.resize(static_cast<Eigen::Index>(rows_.size()), static_cast<Eigen::Index>(set_->dim()));
    for (std::size_t c = 0; c < rows_.size(); ++c) {
      RowVector r = set_->row(rows_[c]);
      const double n = r.norm();
      normalized_.row(static_cast<Eigen::Index>(c)) = n > 0.0 ? RowVector(r / n) : r;
    }
  }

  const EmbeddingSet* set_;
  std::vector<std::size_t> rows_;
  Matrix normalized_;
};

inline RankedList nearest_neighbors(const EmbeddingSet& set, std::string_view query, std::size_t k) {
  return NeighborIndex(set).query(query, k);
}

inline double rbo(const RankedList& s, const RankedList& t, double p,
                  RboVariant variant = RboVariant::kExtrapolated) {
  const std::size_t depth = std::min(s.depth == 0 ? s.items.size() : s.depth, t.depth == 0 ? t.items.size() : t.depth);
  return rbo(std::span<const std::string>(s.items), std::span<const std::string>(t.items), p, variant, depth);
}

struct RboOptions {
  double persistence = 0.9;
  std::size_t depth = 100;
  RboVariant variant = RboVariant::kExtrapolated;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Per-token RBO between the neighbour lists of each token in the two sets.
/// Neighbours are drawn from `tokens` only, so both sides rank the same pool.
inline std::vector<double> rbo_per_token(const EmbeddingSet& source, const EmbeddingSet& target,
                                         const std::vector<std::string>& tokens, const RboOptions& opts = {}) {
  if (tokens.empty()) fail(ErrorCode::kEmptyList, "no tokens to compare");
  if (!(opts.persistence > 0.0 && opts.persistence < 1.0))
    fail(ErrorCode::kInvalidPersistence, "persistence must lie in (0,1)");
  if (opts.depth == 0) fail(ErrorCode::kInvalidArgument, "depth must be >= 1");
  const NeighborIndex src(source, tokens);
  const NeighborIndex tgt(target, tokens);

  std::vector<double> out(tokens.size(), 0.0);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto a = src.query(tokens[i], opts.depth);
      const auto b = tgt.query(tokens[i], opts.depth);
      // A single-token pool has no neighbours; the empty lists agree trivially.
      out[i] = a.items.empty() ? 1.0 : rbo(a, b, opts.persistence, opts.variant);
    }
  };

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tokens.size() / 64 + 1));
  if (threads <= 1) {
    work(0, tokens.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (tokens.size() + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::size_t b = w * chunk, e = std::min(tokens.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }
  return out;
}

/// Mean RBO over `tokens`, reduced left to right in the given order.
inline double avg_rbo(const EmbeddingSet& source, const EmbeddingSet& target, const std::vector<std::string>& tokens,
                      const RboOptions& opts = {}) {
  const auto per_token = rbo_per_token(source, target, tokens, opts);
  double sum = 0.0;
  for (double v : per_token) sum += v;
  return sum / static_cast<double>(per_token.size());
}

}  // namespace twe
