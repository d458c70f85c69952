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
#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "twe/embedding_set.hpp"
#include "twe/error.hpp"
#include "twe/io.hpp"

namespace twe {

/// T2N maps tweet vectors into the news space; N2T maps news into tweets.
enum class Direction { kT2N, kN2T };

inline const char* to_string(Direction d) { return d == Direction::kT2N ? "T2N" : "N2T"; }

inline Direction parse_direction(std::string_view text) {
  if (text == "T2N" || text == "t2n") return Direction::kT2N;
  if (text == "N2T" || text == "n2t") return Direction::kN2T;
  fail(ErrorCode::kParse, "unknown direction '" + std::string(text) + "'");
}

/// Anchor words present in both collections, row-aligned.
/// `source` is the tweet side, `target` the news side.
struct PairedVocabulary {
  std::vector<std::string> tokens;
  Matrix source;
  Matrix target;

  std::size_t size() const noexcept { return tokens.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(source.cols()); }
};

/// Similarity transform x' = scale * (x - source_centroid) * rotation + target_centroid.
/// For N2T models "source" is the news side: the centroids and rotation
/// always describe the side being mapped and the side being mapped onto.
struct AlignmentModel {
  RowVector source_centroid;
  RowVector target_centroid;
  double scale = 1.0;
  Eigen::MatrixXd rotation;
  Direction direction = Direction::kT2N;
  double residual = 0.0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(rotation.rows()); }

  static AlignmentModel identity(std::size_t d, Direction direction = Direction::kT2N) {
    const auto n = static_cast<Eigen::Index>(d);
    return AlignmentModel{RowVector::Zero(n), RowVector::Zero(n), 1.0, Eigen::MatrixXd::Identity(n, n),
                          direction, 0.0};
  }

  template <class Derived>
  Matrix transform(const Eigen::MatrixBase<Derived>& rows) const {
    Matrix centered = rows.rowwise() - source_centroid;
    Matrix out = scale * (centered * rotation);
    out.rowwise() += target_centroid;
    return out;
  }

  /// Frobenius norm of QᵀQ - I.
  double orthogonality_error() const {
    const auto n = rotation.rows();
    return (rotation.transpose() * rotation - Eigen::MatrixXd::Identity(n, n)).norm();
  }
};

/// Intersection of the two vocabularies in source rank order, optionally
/// truncated to the `top_f` most frequent shared tokens.
inline PairedVocabulary common_vocab(const EmbeddingSet& source, const EmbeddingSet& target,
                                     std::optional<std::size_t> top_f = std::nullopt) {
  if (source.dim() != target.dim())
    fail(ErrorCode::kDimensionMismatch, "source has d=" + std::to_string(source.dim()) + ", target has d=" +
                                            std::to_string(target.dim()));
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  const std::size_t limit = top_f.value_or(source.size());
  for (std::size_t i = 0; i < source.size() && rows.size() < limit; ++i) {
    if (auto j = target.find(source.tokens()[i])) rows.emplace_back(i, *j);
  }
  if (rows.empty()) fail(ErrorCode::kNoOverlap, "source and target vocabularies share no tokens");

  PairedVocabulary pairs;
  const auto c = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(source.dim());
  pairs.source.resize(c, d);
  pairs.target.resize(c, d);
  pairs.tokens.reserve(rows.size());
  for (Eigen::Index r = 0; r < c; ++r) {
    auto [i, j] = rows[static_cast<std::size_t>(r)];
    pairs.tokens.push_back(source.tokens()[i]);
    pairs.source.row(r) = source.row(i);
    pairs.target.row(r) = target.row(j);
  }
  return pairs;
}

/// Residual of a given similarity transform on already centered pairs.
template <class A, class B>
double procrustes_residual(const Eigen::MatrixBase<A>& centered_from, const Eigen::MatrixBase<B>& centered_to,
                           double scale, const Eigen::MatrixXd& rotation) {
  return (centered_to - scale * (centered_from * rotation)).norm();
}

/// Least-squares similarity transform between the paired matrices.
///
/// Both sides are centered on their means. With M = S̃ᵀT̃ = UΣVᵀ the optimal
/// orthogonal map is Q = UVᵀ and the optimal scale is trace(Σ) / ‖S̃‖²_F.
/// Q may be a reflection. For N2T the news rows are the ones being mapped.
inline AlignmentModel procrustes_fit(const PairedVocabulary& pairs, Direction direction) {
  if (pairs.source.rows() != pairs.target.rows() || pairs.source.cols() != pairs.target.cols())
    fail(ErrorCode::kDimensionMismatch, "paired matrices differ in shape");
  if (pairs.source.rows() < 2)
    fail(ErrorCode::kTooFewPairs, "need at least 2 anchor pairs, got " + std::to_string(pairs.source.rows()));
  if (!pairs.source.allFinite() || !pairs.target.allFinite())
    fail(ErrorCode::kNonFiniteValue, "anchor matrices contain NaN or Inf");
  if (pairs.source.rows() < pairs.source.cols())
    warn("alignment is underdetermined: " + std::to_string(pairs.source.rows()) + " anchors for d=" +
         std::to_string(pairs.source.cols()));

  const Matrix& from = direction == Direction::kT2N ? pairs.source : pairs.target;
  const Matrix& to = direction == Direction::kT2N ? pairs.target : pairs.source;

  AlignmentModel model;
  model.direction = direction;
  model.source_centroid = from.colwise().mean();
  model.target_centroid = to.colwise().mean();
  const Matrix from_c = from.rowwise() - model.source_centroid;
  const Matrix to_c = to.rowwise() - model.target_centroid;

  const double from_norm2 = from_c.squaredNorm();
  if (!(from_norm2 > 1e-24 * std::max(1.0, from.squaredNorm())))
    fail(ErrorCode::kDegenerateSource, "all rows of the side being mapped coincide");

  const Eigen::MatrixXd cross = from_c.transpose() * to_c;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  model.rotation = svd.matrixU() * svd.matrixV().transpose();
  model.scale = svd.singularValues().sum() / from_norm2;
  if (!(model.scale > 0.0))
    fail(ErrorCode::kDegenerateSource, "anchor sets are uncorrelated; no positive scale exists");
  model.residual = procrustes_residual(from_c, to_c, model.scale, model.rotation);
  return model;
}

/// Maps every row of `set` through `model`. Token order and tags are kept;
/// the result is flagged as transformed.
inline EmbeddingSet apply_alignment(const AlignmentModel& model, const EmbeddingSet& set) {
  if (set.dim() != model.dim())
    fail(ErrorCode::kDimensionMismatch, "model has d=" + std::to_string(model.dim()) + ", embeddings have d=" +
                                            std::to_string(set.dim()));
  return EmbeddingSet(set.tokens(), model.transform(set.matrix()), set.language(), set.collection(), true);
}

/// Cross-lingual second step: align tweet vectors of language l1 onto the
/// bilingual news space of the same language and map the full tweet vocabulary.
inline std::pair<AlignmentModel, EmbeddingSet> fit_and_transform_crosslingual(
    const EmbeddingSet& tweets, const EmbeddingSet& bilingual_news, std::optional<std::size_t> top_f = std::nullopt) {
  if (tweets.language() != bilingual_news.language())
    fail(ErrorCode::kInvalidArgument, "tweet set is '" + tweets.language() + "' but bilingual news set is '" +
                                          bilingual_news.language() + "'");
  auto pairs = common_vocab(tweets, bilingual_news, top_f);
  auto model = procrustes_fit(pairs, Direction::kT2N);
  auto mapped = apply_alignment(model, tweets);
  return {std::move(model), std::move(mapped)};
}

// ---------------------------------------------------------------------------
// Model serialization. JSON with every double written in shortest
// round-trip form, so parse(serialize(m)) is bit-exact.

inline std::string serialize_model(const AlignmentModel& model) {
  const auto d = model.dim();
  auto to_list = [](const auto& v) {
    std::vector<double> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
    return out;
  };
  std::vector<double> q;
  q.reserve(d * d);
  for (Eigen::Index r = 0; r < model.rotation.rows(); ++r)
    for (Eigen::Index c = 0; c < model.rotation.cols(); ++c) q.push_back(model.rotation(r, c));

  nlohmann::ordered_json j;
  j["format"] = "twe-alignment-model";
  j["version"] = 1;
  j["dim"] = d;
  j["direction"] = to_string(model.direction);
  j["scale"] = model.scale;
  j["residual"] = model.residual;
  j["source_centroid"] = to_list(model.source_centroid);
  j["target_centroid"] = to_list(model.target_centroid);
  j["rotation_row_major"] = std::move(q);
  return j.dump(1) + "\n";
}

inline AlignmentModel parse_model(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("alignment model is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "twe-alignment-model")
      fail(ErrorCode::kParse, "not an alignment model document");
    const auto d = j.at("dim").get<std::size_t>();
    const auto n = static_cast<Eigen::Index>(d);
    const auto mu_s = j.at("source_centroid").get<std::vector<double>>();
    const auto mu_t = j.at("target_centroid").get<std::vector<double>>();
    const auto q = j.at("rotation_row_major").get<std::vector<double>>();
    if (d == 0 || mu_s.size() != d || mu_t.size() != d || q.size() != d * d)
      fail(ErrorCode::kParse, "alignment model arrays disagree with dim=" + std::to_string(d));
    AlignmentModel model;
    model.direction = parse_direction(j.at("direction").get<std::string>());
    model.scale = j.at("scale").get<double>();
    model.residual = j.at("residual").get<double>();
    model.source_centroid = Eigen::Map<const RowVector>(mu_s.data(), n);
    model.target_centroid = Eigen::Map<const RowVector>(mu_t.data(), n);
    model.rotation = Eigen::Map<const Matrix>(q.data(), n, n);
    if (!(model.scale > 0.0) || !std::isfinite(model.scale)) fail(ErrorCode::kParse, "scale must be positive");
    if (!model.rotation.allFinite() || !model.source_centroid.allFinite() || !model.target_centroid.allFinite())
      fail(ErrorCode::kNonFiniteValue, "alignment model contains NaN or Inf");
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed alignment model: ") + e.what());
  }
}

inline void save_model(const AlignmentModel& model, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize_model(model));
}

inline AlignmentModel load_model(const std::filesystem::path& path) { return parse_model(io::read_file(path)); }

}  // namespace twe
