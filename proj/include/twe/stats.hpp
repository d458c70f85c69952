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
#include <span>
#include <string>

#include "twe/error.hpp"

namespace twe {

template <class A, class B>
double cosine(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
  if (u.size() != v.size())
    fail(ErrorCode::kDimensionMismatch, "cosine of vectors with sizes " + std::to_string(u.size()) + " and " +
                                            std::to_string(v.size()));
  const double nu2 = u.squaredNorm(), nv2 = v.squaredNorm();
  if (nu2 == 0.0 || nv2 == 0.0) fail(ErrorCode::kZeroVector, "cosine is undefined for a zero vector");
  // One square root of the product keeps cosine(v, v) at exactly 1.
  const double denom = std::isfinite(nu2 * nv2) && nu2 * nv2 > 0.0 ? std::sqrt(nu2 * nv2)
                                                                   : std::sqrt(nu2) * std::sqrt(nv2);
  return std::clamp(u.dot(v) / denom, -1.0, 1.0);
}

/// Product-moment correlation, computed in two passes around the means.
inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    fail(ErrorCode::kLengthMismatch, std::to_string(xs.size()) + " vs " + std::to_string(ys.size()) + " values");
  if (xs.size() < 2) fail(ErrorCode::kTooFewPairs, "correlation needs at least 2 pairs");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::kZeroVariance, "an input has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Kendall's tau-b: (concordant - discordant) / sqrt((n0 - ties_x)(n0 - ties_y)).
/// O(n²); the judgment sets this is meant for are small.
inline double kendall_tau(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    fail(ErrorCode::kLengthMismatch, std::to_string(xs.size()) + " vs " + std::to_string(ys.size()) + " values");
  if (xs.size() < 2) fail(ErrorCode::kTooFewPairs, "correlation needs at least 2 pairs");
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0, pairs = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      ++pairs;
      const double dx = xs[i] - xs[j], dy = ys[i] - ys[j];
      if (dx == 0.0) ++ties_x;
      if (dy == 0.0) ++ties_y;
      if (dx == 0.0 || dy == 0.0) continue;
      if ((dx > 0.0) == (dy > 0.0))
        ++concordant;
      else
        ++discordant;
    }
  }
  const double denom = std::sqrt(static_cast<double>(pairs - ties_x)) * std::sqrt(static_cast<double>(pairs - ties_y));
  if (denom == 0.0) fail(ErrorCode::kAllTied, "every pair is tied in at least one input");
  return std::clamp(static_cast<double>(concordant - discordant) / denom, -1.0, 1.0);
}

}  // namespace twe
