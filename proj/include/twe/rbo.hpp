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
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "twe/error.hpp"

namespace twe {

enum class RboVariant { kExtrapolated, kMinimum };

/// Rank-biased overlap of two rankings with distinct items, evaluated to
/// depth k = min(|s|, |t|, max_depth).
///
/// With X_d the overlap of the two depth-d prefixes:
///   extrapolated:  X_k/k · p^k + (1-p)/p · Σ_{d≤k} X_d/d · p^d
///   minimum:       (1-p)/p · (Σ_{d≤k} (X_d - X_k)/d · p^d - X_k · ln(1-p))
template <class T>
double rbo(std::span<const T> s, std::span<const T> t, double p,
           RboVariant variant = RboVariant::kExtrapolated,
           std::size_t max_depth = static_cast<std::size_t>(-1)) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::kInvalidPersistence, "persistence must lie in (0,1)");
  if (s.empty() || t.empty()) fail(ErrorCode::kEmptyList, "RBO needs two nonempty rankings");
  const std::size_t k = std::min({s.size(), t.size(), max_depth});
  if (k == 0) fail(ErrorCode::kEmptyList, "RBO evaluation depth is zero");

  std::unordered_set<T> seen_s, seen_t;
  seen_s.reserve(k);
  seen_t.reserve(k);
  std::size_t overlap = 0;
  bool identical = true;
  // Σ X_d/d · p^d  and  Σ p^d/d  (the latter only for the minimum variant).
  double weighted = 0.0;
  double harmonic = 0.0;
  double p_pow = 1.0;
  for (std::size_t d = 1; d <= k; ++d) {
    const T& a = s[d - 1];
    const T& b = t[d - 1];
    if (a == b) {
      ++overlap;
    } else {
      identical = false;
      if (seen_t.count(a)) ++overlap;
      if (seen_s.count(b)) ++overlap;
    }
    seen_s.insert(a);
    seen_t.insert(b);
    p_pow *= p;
    const double dd = static_cast<double>(d);
    weighted += static_cast<double>(overlap) / dd * p_pow;
    harmonic += p_pow / dd;
  }
  // Full agreement gives exactly 1; the closed form only reaches it up to rounding.
  if (identical && variant == RboVariant::kExtrapolated) return 1.0;

  const double xk = static_cast<double>(overlap);
  double value = 0.0;
  if (variant == RboVariant::kExtrapolated) {
    value = xk / static_cast<double>(k) * p_pow + (1.0 - p) / p * weighted;
  } else {
    value = (1.0 - p) / p * (weighted - xk * harmonic - xk * std::log1p(-p));
  }
  return std::clamp(value, 0.0, 1.0);
}

template <class T>
double rbo(const std::vector<T>& s, const std::vector<T>& t, double p,
           RboVariant variant = RboVariant::kExtrapolated,
           std::size_t max_depth = static_cast<std::size_t>(-1)) {
  return rbo(std::span<const T>(s), std::span<const T>(t), p, variant, max_depth);
}

}  // namespace twe
