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

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "twe/embedding_set.hpp"
#include "twe/error.hpp"
#include "twe/io.hpp"

namespace twe {

enum class DocumentKind { kTweet, kNews };

inline const char* to_string(DocumentKind k) { return k == DocumentKind::kTweet ? "tweet" : "news"; }

inline DocumentKind parse_document_kind(std::string_view text) {
  if (text == "tweet") return DocumentKind::kTweet;
  if (text == "news") return DocumentKind::kNews;
  fail(ErrorCode::kParse, "document kind must be \"tweet\" or \"news\", got \"" + std::string(text) + "\"");
}

struct Document {
  std::string id;
  std::string language;
  DocumentKind kind = DocumentKind::kTweet;
  std::string raw;
  std::vector<std::string> tokens;
  bool dropped = false;  // retweets; excluded from every downstream corpus
};

namespace detail {

inline bool is_word_char(UChar32 c) { return c == '_' || u_isalnum(c); }

inline bool is_blank(UChar32 c) { return u_isUWhiteSpace(c); }

// Decodes one code point at `i`; invalid bytes come back as U+FFFD.
inline UChar32 next_code_point(std::string_view text, std::size_t& i) {
  int32_t pos = static_cast<int32_t>(i);
  const int32_t len = static_cast<int32_t>(text.size());
  UChar32 c = 0;
  U8_NEXT(reinterpret_cast<const uint8_t*>(text.data()), pos, len, c);
  i = static_cast<std::size_t>(pos);
  return c < 0 ? 0xFFFD : c;
}

inline void append_utf8(std::string& out, UChar32 c) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, c, error);
  if (!error) out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

inline bool starts_with_at(std::string_view text, std::size_t i, std::string_view prefix) {
  return text.substr(i, prefix.size()) == prefix;
}

// Tweet clean-up: drop URLs up to the next blank, drop @mentions, drop '#'.
inline std::string strip_tweet_markup(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (starts_with_at(text, i, "http://") || starts_with_at(text, i, "https://")) {
      while (i < text.size()) {
        std::size_t j = i;
        if (is_blank(next_code_point(text, j))) break;
        i = j;
      }
      out += ' ';
      continue;
    }
    if (text[i] == '@') {
      std::size_t j = i + 1;
      std::size_t end = j;
      while (end < text.size()) {
        std::size_t k = end;
        if (!is_word_char(next_code_point(text, k))) break;
        end = k;
      }
      if (end > j) {
        i = end;
        out += ' ';
        continue;
      }
    }
    if (text[i] == '#') {
      ++i;
      continue;
    }
    out += text[i++];
  }
  return out;
}

}  // namespace detail

/// Lowercases and splits on every character that is not a Unicode letter
/// or digit.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const UChar32 c = detail::next_code_point(text, i);
    if (u_isalnum(c)) {
      detail::append_utf8(current, u_tolower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

inline bool is_retweet(std::string_view raw) {
  std::size_t i = 0;
  while (i < raw.size()) {
    std::size_t j = i;
    if (!detail::is_blank(detail::next_code_point(raw, j))) break;
    i = j;
  }
  return raw.substr(i, 4) == "RT @";
}

inline Document preprocess(std::string raw, DocumentKind kind, std::string language, std::string id) {
  Document doc;
  doc.id = std::move(id);
  doc.language = std::move(language);
  doc.kind = kind;
  if (kind == DocumentKind::kTweet) {
    doc.dropped = is_retweet(raw);
    doc.tokens = tokenize(detail::strip_tweet_markup(raw));
  } else {
    doc.tokens = tokenize(raw);
  }
  doc.raw = std::move(raw);
  return doc;
}

/// JSON-Lines corpus: one {"id","text","lang","kind"} object per line.
inline std::vector<Document> parse_corpus(std::string_view text, std::string_view origin = "<memory>") {
  std::vector<Document> docs;
  const std::string where(origin);
  io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (io::split_blanks(line).empty()) return;
    try {
      const auto j = nlohmann::json::parse(line);
      docs.push_back(preprocess(j.at("text").get<std::string>(), parse_document_kind(j.at("kind").get<std::string>()),
                                j.at("lang").get<std::string>(), j.at("id").get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParse, where + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
  return docs;
}

inline std::vector<Document> load_corpus(const std::filesystem::path& path) {
  return parse_corpus(io::read_file(path), path.string());
}

/// "id<TAB>space-joined tokens" for every document that was not dropped.
inline std::string format_token_dump(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& d : docs) {
    if (d.dropped) continue;
    out += d.id;
    out += '\t';
    for (std::size_t i = 0; i < d.tokens.size(); ++i) {
      if (i) out += ' ';
      out += d.tokens[i];
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// tf-idf

/// Corpus statistics for tf-idf weighting:
///   weight(doc, w) = tf(doc, w) · (ln((1 + N) / (1 + df(w))) + 1)
/// with raw counts for tf.
class WeightedVocabulary {
 public:
  WeightedVocabulary() = default;
  WeightedVocabulary(std::size_t documents, std::unordered_map<std::string, std::size_t> df,
                     std::map<std::string, std::map<std::string, double>> weights)
      : documents_(documents), df_(std::move(df)), weights_(std::move(weights)) {}

  std::size_t documents() const noexcept { return documents_; }

  std::size_t document_frequency(const std::string& token) const {
    auto it = df_.find(token);
    return it == df_.end() ? 0 : it->second;
  }

  double idf(const std::string& token) const {
    const double n = static_cast<double>(documents_);
    return std::log((1.0 + n) / (1.0 + static_cast<double>(document_frequency(token)))) + 1.0;
  }

  /// Weights of a corpus document, by id.
  const std::map<std::string, double>* weights_for(const std::string& doc_id) const {
    auto it = weights_.find(doc_id);
    return it == weights_.end() ? nullptr : &it->second;
  }

  /// Weights for any document under this corpus's statistics.
  std::map<std::string, double> weigh(const Document& doc) const {
    std::map<std::string, double> w;
    for (const auto& t : doc.tokens) w[t] += 1.0;
    for (auto& [token, tf] : w) tf *= idf(token);
    return w;
  }

 private:
  std::size_t documents_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
  std::map<std::string, std::map<std::string, double>> weights_;
};

inline WeightedVocabulary tf_idf(const std::vector<Document>& corpus) {
  std::size_t n = 0;
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    if (doc.dropped) continue;
    ++n;
    std::map<std::string, bool> seen;
    for (const auto& t : doc.tokens)
      if (!std::exchange(seen[t], true)) ++df[t];
  }
  if (n == 0) fail(ErrorCode::kEmptyCorpus, "tf-idf needs at least one document that was not dropped");
  const WeightedVocabulary stats(n, df, {});
  std::map<std::string, std::map<std::string, double>> weights;
  for (const auto& doc : corpus)
    if (!doc.dropped) weights[doc.id] = stats.weigh(doc);
  return WeightedVocabulary(n, std::move(df), std::move(weights));
}

struct DocEmbedding {
  RowVector vector;
  double coverage = 0.0;  // fraction of token occurrences found in the embedding set
};

/// tf-idf weighted mean of the in-vocabulary word vectors of `doc`.
inline DocEmbedding doc_embedding(const Document& doc, const EmbeddingSet& set, const WeightedVocabulary& weights) {
  if (doc.dropped) fail(ErrorCode::kInvalidArgument, "document '" + doc.id + "' was dropped during preprocessing");
  const auto w = weights.weigh(doc);
  RowVector sum = RowVector::Zero(static_cast<Eigen::Index>(set.dim()));
  double total = 0.0;
  std::size_t covered = 0;
  for (const auto& [token, weight] : w) {
    auto i = set.find(token);
    if (!i) continue;
    sum += weight * set.row(*i);
    total += weight;
  }
  for (const auto& t : doc.tokens)
    if (set.contains(t)) ++covered;
  if (covered == 0 || !(total > 0.0))
    fail(ErrorCode::kNoRepresentableTokens, "document '" + doc.id + "' has no in-vocabulary tokens");
  return DocEmbedding{sum / total, static_cast<double>(covered) / static_cast<double>(doc.tokens.size())};
}

}  // namespace twe
