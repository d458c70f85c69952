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
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "twe/error.hpp"
#include "twe/io.hpp"

namespace twe {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

enum class Collection { kTweet, kNews };

inline const char* to_string(Collection c) { return c == Collection::kTweet ? "tweet" : "news"; }

/// Vocabulary plus one embedding row per token. Row order is token rank
/// (most frequent first). Immutable once built.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;

  EmbeddingSet(std::vector<std::string> tokens, Matrix matrix, std::string language,
               Collection collection, bool transformed = false)
      : tokens_(std::move(tokens)),
        matrix_(std::move(matrix)),
        language_(std::move(language)),
        collection_(collection),
        transformed_(transformed) {
    if (static_cast<std::size_t>(matrix_.rows()) != tokens_.size())
      fail(ErrorCode::kDimensionMismatch,
           std::to_string(tokens_.size()) + " tokens but " + std::to_string(matrix_.rows()) + " rows");
    if (matrix_.cols() < 1) fail(ErrorCode::kDimensionMismatch, "embedding dimension must be >= 1");
    if (!matrix_.allFinite()) fail(ErrorCode::kNonFiniteValue, "embedding matrix contains NaN or Inf");
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (!index_.emplace(tokens_[i], i).second)
        fail(ErrorCode::kDuplicateToken, "token '" + tokens_[i] + "' appears more than once");
    }
  }

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.cols()); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  const std::string& language() const noexcept { return language_; }
  Collection collection() const noexcept { return collection_; }
  bool transformed() const noexcept { return transformed_; }

  std::optional<std::size_t> find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(std::string_view token) const { return find(token).has_value(); }

  auto row(std::size_t i) const { return matrix_.row(static_cast<Eigen::Index>(i)); }

  /// Row for `token`, or nullopt when it is out of vocabulary.
  std::optional<RowVector> lookup(std::string_view token) const {
    auto i = find(token);
    if (!i) return std::nullopt;
    return RowVector(row(*i));
  }

  friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b) {
    return a.tokens_ == b.tokens_ && a.language_ == b.language_ && a.collection_ == b.collection_ &&
           a.transformed_ == b.transformed_ && a.matrix_.rows() == b.matrix_.rows() &&
           a.matrix_.cols() == b.matrix_.cols() && a.matrix_ == b.matrix_;
  }

 private:
  std::vector<std::string> tokens_;
  Matrix matrix_;
  std::string language_;
  Collection collection_ = Collection::kTweet;
  bool transformed_ = false;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline bool is_header_line(const std::vector<std::string_view>& fields) {
  if (fields.size() != 2) return false;
  std::uint64_t a = 0, b = 0;
  return io::parse_integer(fields[0], a) && io::parse_integer(fields[1], b);
}

}  // namespace detail

/// Parses the plain-text format: one token per line followed by `d`
/// blank-separated numbers. A leading "n d" count line is skipped.
inline EmbeddingSet parse_embeddings(std::string_view text, std::string language, Collection collection,
                                     std::string_view origin = "<memory>") {
  std::vector<std::string> tokens;
  std::vector<double> values;
  std::size_t dim = 0;
  bool first_data_line = true;
  const std::string where(origin);

  io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    auto fields = io::split_blanks(line);
    if (fields.empty()) return;
    if (first_data_line && tokens.empty() && detail::is_header_line(fields)) {
      first_data_line = false;
      return;
    }
    first_data_line = false;
    const std::size_t n = fields.size() - 1;
    if (dim == 0) {
      if (n == 0) fail(ErrorCode::kDimensionMismatch, where + ":" + std::to_string(line_no) + ": token without values");
      dim = n;
    } else if (n != dim) {
      fail(ErrorCode::kDimensionMismatch, where + ":" + std::to_string(line_no) + ": expected " +
                                              std::to_string(dim) + " values, found " + std::to_string(n));
    }
    for (std::size_t j = 1; j < fields.size(); ++j) {
      double v = 0.0;
      if (!io::parse_double(fields[j], v))
        fail(ErrorCode::kParse, where + ":" + std::to_string(line_no) + ": bad number '" + std::string(fields[j]) + "'");
      if (!std::isfinite(v))
        fail(ErrorCode::kNonFiniteValue, where + ":" + std::to_string(line_no) + ": non-finite value for '" +
                                             std::string(fields[0]) + "'");
      values.push_back(v);
    }
    tokens.emplace_back(fields[0]);
  });

  if (tokens.empty()) fail(ErrorCode::kEmptyInput, where + ": no embedding lines");
  Matrix m = Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(tokens.size()),
                                      static_cast<Eigen::Index>(dim));
  return EmbeddingSet(std::move(tokens), std::move(m), std::move(language), collection);
}

inline EmbeddingSet load_embeddings(const std::filesystem::path& path, std::string language, Collection collection) {
  return parse_embeddings(io::read_file(path), std::move(language), collection, path.string());
}

inline std::string format_embeddings(const EmbeddingSet& set) {
  std::string out;
  out.reserve(set.size() * (set.dim() * 12 + 16));
  for (std::size_t i = 0; i < set.size(); ++i) {
    out += set.tokens()[i];
    for (std::size_t j = 0; j < set.dim(); ++j) {
      out += ' ';
      out += io::format_double(set.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out += '\n';
  }
  return out;
}

inline void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_embeddings(set));
}

/// Sidecar frequency file: "token<TAB>count" per line.
inline std::unordered_map<std::string, std::uint64_t> load_token_counts(const std::filesystem::path& path) {
  std::unordered_map<std::string, std::uint64_t> counts;
  const auto text = io::read_file(path);
  io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (line.empty()) return;
    auto fields = io::split(line, '\t');
    std::uint64_t c = 0;
    if (fields.size() != 2 || !io::parse_integer(fields[1], c))
      fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": expected token<TAB>count");
    counts[std::string(fields[0])] = c;
  });
  return counts;
}

/// Reorders rows by descending count. Tokens absent from `counts` keep their
/// relative order and go last.
inline EmbeddingSet reorder_by_counts(const EmbeddingSet& set,
                                      const std::unordered_map<std::string, std::uint64_t>& counts) {
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto count_of = [&](std::size_t i) -> std::optional<std::uint64_t> {
    auto it = counts.find(set.tokens()[i]);
    if (it == counts.end()) return std::nullopt;
    return it->second;
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto ca = count_of(a), cb = count_of(b);
    if (ca && cb) return *ca > *cb;
    return ca.has_value() && !cb.has_value();
  });
  std::vector<std::string> tokens;
  Matrix m(set.matrix().rows(), set.matrix().cols());
  tokens.reserve(set.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    tokens.push_back(set.tokens()[order[r]]);
    m.row(static_cast<Eigen::Index>(r)) = set.row(order[r]);
  }
  return EmbeddingSet(std::move(tokens), std::move(m), set.language(), set.collection(), set.transformed());
}

}  // namespace twe
