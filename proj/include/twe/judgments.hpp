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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twe/error.hpp"
#include "twe/io.hpp"
#include "twe/stats.hpp"

namespace twe {

/// Gold similarity of one tweet/news pair on the 0 (dissimilar) .. 2 (similar) scale.
struct JudgmentRecord {
  std::string tweet_id;
  std::string news_id;
  std::string tweet_lang;
  std::string news_lang;
  double score = 0.0;
  std::optional<bool> relevant;  // set for binary-labelled data
};

struct PairKey {
  std::string tweet_id;
  std::string news_id;
  std::string tweet_lang;
  std::string news_lang;
};

/// Mean of every annotator's rating per pair. `ratings[a][i]` is annotator
/// a's score for `pairs[i]`; scores must be 0, 1 or 2.
inline std::vector<JudgmentRecord> aggregate_judgments(const std::vector<PairKey>& pairs,
                                                       const std::vector<std::vector<double>>& ratings) {
  if (ratings.empty()) fail(ErrorCode::kRaggedRatings, "no annotators");
  for (std::size_t a = 0; a < ratings.size(); ++a) {
    if (ratings[a].size() != pairs.size())
      fail(ErrorCode::kRaggedRatings, "annotator " + std::to_string(a) + " rated " + std::to_string(ratings[a].size()) +
                                          " pairs, expected " + std::to_string(pairs.size()));
    for (double s : ratings[a])
      if (s != 0.0 && s != 1.0 && s != 2.0)
        fail(ErrorCode::kInvalidArgument, "rating " + io::format_double(s) + " is not on the 0/1/2 scale");
  }
  std::vector<JudgmentRecord> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    double sum = 0.0;
    for (const auto& r : ratings) sum += r[i];
    out.push_back(JudgmentRecord{pairs[i].tweet_id, pairs[i].news_id, pairs[i].tweet_lang, pairs[i].news_lang,
                                 sum / static_cast<double>(ratings.size()), std::nullopt});
  }
  return out;
}

/// Pairwise Kendall tau-b between annotators; entry [a][b] for a < b.
inline std::vector<std::vector<double>> annotator_agreement(const std::vector<std::vector<double>>& ratings) {
  std::vector<std::vector<double>> tau(ratings.size(), std::vector<double>(ratings.size(), 1.0));
  for (std::size_t a = 0; a < ratings.size(); ++a)
    for (std::size_t b = a + 1; b < ratings.size(); ++b) tau[a][b] = tau[b][a] = kendall_tau(ratings[a], ratings[b]);
  return tau;
}

/// Gold TSV with a header naming tweet_id, news_id, tweet_lang, news_lang and
/// either `score` (0..2) or `label` (binary: 1/relevant, 0/irrelevant).
/// Binary labels are mapped to scores 2 and 0.
inline std::vector<JudgmentRecord> parse_gold(std::string_view text, std::string_view origin = "<memory>") {
  const std::string where(origin);
  std::vector<JudgmentRecord> out;
  std::vector<std::string> header;
  std::optional<std::size_t> col_tid, col_nid, col_tl, col_nl, col_score, col_label;

  io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (line.empty()) return;
    auto fields = io::split(line, '\t');
    const auto at = [&](std::string_view msg) {
      return where + ":" + std::to_string(line_no) + ": " + std::string(msg);
    };
    if (header.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        header.emplace_back(fields[i]);
        if (fields[i] == "tweet_id") col_tid = i;
        if (fields[i] == "news_id") col_nid = i;
        if (fields[i] == "tweet_lang") col_tl = i;
        if (fields[i] == "news_lang") col_nl = i;
        if (fields[i] == "score") col_score = i;
        if (fields[i] == "label") col_label = i;
      }
      if (!col_tid || !col_nid || !col_tl || !col_nl || !(col_score || col_label))
        fail(ErrorCode::kParse, at("header must name tweet_id, news_id, tweet_lang, news_lang and score or label"));
      return;
    }
    if (fields.size() != header.size())
      fail(ErrorCode::kParse, at("expected " + std::to_string(header.size()) + " columns"));
    JudgmentRecord r;
    r.tweet_id = fields[*col_tid];
    r.news_id = fields[*col_nid];
    r.tweet_lang = fields[*col_tl];
    r.news_lang = fields[*col_nl];
    if (col_label) {
      const auto v = fields[*col_label];
      if (v == "1" || v == "relevant")
        r.relevant = true;
      else if (v == "0" || v == "irrelevant")
        r.relevant = false;
      else
        fail(ErrorCode::kParse, at("label must be 0/1 or relevant/irrelevant"));
      r.score = *r.relevant ? 2.0 : 0.0;
    }
    if (col_score) {
      double s = 0.0;
      if (!io::parse_double(fields[*col_score], s) || !(s >= 0.0 && s <= 2.0))
        fail(ErrorCode::kParse, at("score must be a number in [0, 2]"));
      r.score = s;
    }
    out.push_back(std::move(r));
  });
  if (header.empty()) fail(ErrorCode::kEmptyInput, where + ": gold file is empty");
  return out;
}

inline std::vector<JudgmentRecord> load_gold(const std::filesystem::path& path) {
  return parse_gold(io::read_file(path), path.string());
}

inline std::string format_gold(const std::vector<JudgmentRecord>& records) {
  std::string out = "tweet_id\tnews_id\ttweet_lang\tnews_lang\tscore\n";
  for (const auto& r : records)
    out += r.tweet_id + '\t' + r.news_id + '\t' + r.tweet_lang + '\t' + r.news_lang + '\t' +
           io::format_double(r.score) + '\n';
  return out;
}

}  // namespace twe
