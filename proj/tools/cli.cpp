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

#include "cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "twe/twe.hpp"

#ifndef TWE_VERSION
#define TWE_VERSION "dev"
#endif

namespace twe::cli {
namespace {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::kIo, "SHA-256 computation failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Metadata written next to the primary output of every successful run.
class RunRecord {
 public:
  RunRecord(std::string command, const std::vector<std::string>& args) {
    doc_["tool"] = "twe";
    doc_["version"] = TWE_VERSION;
    doc_["command"] = std::move(command);
    doc_["argv"] = args;
    doc_["parameters"] = nlohmann::ordered_json::object();
    doc_["inputs"] = nlohmann::ordered_json::object();
    doc_["notes"] = nlohmann::ordered_json::object();
  }

  template <class T>
  void param(const std::string& key, const T& value) {
    doc_["parameters"][key] = value;
  }

  void note(const std::string& key, const nlohmann::ordered_json& value) { doc_["notes"][key] = value; }

  void input(const std::string& path) { doc_["inputs"][path] = sha256_hex(io::read_file(path)); }

  std::string render(const std::vector<std::string>& outputs) {
    doc_["outputs"] = outputs;
    doc_["created_utc"] = utc_now();
    return doc_.dump(2) + "\n";
  }

 private:
  nlohmann::ordered_json doc_;
};

/// Stages `files` plus a metadata record beside the first one, then commits
/// all of them together.
void commit_outputs(const std::vector<std::pair<std::string, std::string>>& files, RunRecord& record) {
  std::vector<std::string> names;
  for (const auto& [path, content] : files) names.push_back(path);
  io::OutputTransaction tx;
  for (const auto& [path, content] : files) tx.stage(path, content);
  tx.stage(files.front().first + ".meta.json", record.render(names));
  tx.commit();
}

Collection parse_collection(const std::string& s) { return s == "news" ? Collection::kNews : Collection::kTweet; }

std::optional<std::size_t> top_f_of(std::size_t v) {
  if (v == 0) return std::nullopt;
  return v;
}

EmbeddingSet load_vectors(const std::string& path, const std::string& lang, Collection c, RunRecord& rec,
                          const std::string& counts = {}) {
  rec.input(path);
  auto set = load_embeddings(path, lang, c);
  if (!counts.empty()) {
    rec.input(counts);
    set = reorder_by_counts(set, load_token_counts(counts));
  }
  return set;
}

std::vector<Document> load_docs(const std::string& path, RunRecord& rec) {
  rec.input(path);
  return load_corpus(path);
}

/// Model to use for a (tweet, news) pair of sets. An explicit model file
/// wins; otherwise a T2N/N2T mode fits one on the shared vocabulary.
std::optional<AlignmentModel> resolve_model(const std::string& mode, const std::string& model_path,
                                            const EmbeddingSet& tweets, const EmbeddingSet& news,
                                            std::optional<std::size_t> top_f, RunRecord& rec) {
  if (!model_path.empty()) {
    rec.input(model_path);
    auto model = load_model(model_path);
    if (mode == "none")
      fail(ErrorCode::kInvalidArgument, "--mode none contradicts --model");
    if (!mode.empty() && parse_direction(mode) != model.direction)
      fail(ErrorCode::kInvalidArgument, "--mode " + mode + " but the model direction is " + to_string(model.direction));
    rec.note("transform", std::string(to_string(model.direction)) + " (from model file)");
    return model;
  }
  if (mode.empty() || mode == "none") {
    rec.note("transform", "none");
    return std::nullopt;
  }
  const auto pairs = common_vocab(tweets, news, top_f);
  auto model = procrustes_fit(pairs, parse_direction(mode));
  rec.note("transform", std::string(to_string(model.direction)) + " fitted on " + std::to_string(pairs.size()) +
                            " shared tokens");
  rec.note("fit_residual", model.residual);
  return model;
}

CLI::Validator open_unit_interval() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        double v = 0.0;
        if (!io::parse_double(s, v) || !(v > 0.0 && v < 1.0)) return "value must lie strictly between 0 and 1";
        return {};
      },
      "(0,1)");
}

struct Options {
  // shared
  std::string out;
  std::uint64_t seed = 1;
  std::size_t top_f = 0;
  std::string mode;
  std::string model;
  // vectors and corpora
  std::string source, target, source_counts, target_counts;
  std::string source_lang = "en", target_lang = "en";
  std::string tweets, news, tweet_vectors, news_vectors;
  std::string tweet_lang = "en", news_lang = "en";
  std::vector<std::string> tweet_vector_list, news_vector_list, modes;
  std::string gold, pairs, pairs_out;
  std::size_t folds = 5;
  // preprocess
  std::string input;
  // align apply
  std::string collection;
  // rbo / neighbors
  double persistence = 0.9;
  std::size_t depth = 100;
  std::string variant = "ext";
  std::string embeddings, query, lang = "en";
  // train-bilingual
  std::string corpus_l1, corpus_l2, parallel_l1, parallel_l2, lang_l1 = "en", lang_l2 = "de", out_l1, out_l2;
  BilingualTrainConfig train;
};

// ---------------------------------------------------------------------------

int cmd_preprocess(const Options& o, const std::vector<std::string>& args, std::ostream& err) {
  RunRecord rec("preprocess", args);
  const auto docs = load_docs(o.input, rec);
  const auto dropped = std::count_if(docs.begin(), docs.end(), [](const Document& d) { return d.dropped; });
  rec.param("documents", docs.size());
  rec.param("dropped", dropped);
  rec.note("lowercase", true);
  rec.note("retweet_rule", "tweet text starting with \"RT @\"");
  commit_outputs({{o.out, format_token_dump(docs)}}, rec);
  err << "preprocess: " << docs.size() << " documents, " << dropped << " dropped\n";
  return 0;
}

int cmd_train_bilingual(const Options& o, const std::vector<std::string>& args, std::ostream& err) {
  RunRecord rec("train-bilingual", args);
  const auto c1 = load_docs(o.corpus_l1, rec);
  const auto c2 = load_docs(o.corpus_l2, rec);
  rec.input(o.parallel_l1);
  rec.input(o.parallel_l2);
  const auto parallel = load_parallel(o.parallel_l1, o.parallel_l2, o.lang_l1, o.lang_l2);
  const auto& cfg = o.train;
  rec.param("dim", cfg.dim);
  rec.param("window", cfg.window);
  rec.param("window_mode", cfg.left_only ? "left" : "symmetric");
  rec.param("min_count", cfg.min_count);
  rec.param("lambda", cfg.lambda);
  rec.param("epochs", cfg.epochs);
  rec.param("learning_rate", cfg.learning_rate);
  rec.param("negative", cfg.negative_samples);
  rec.param("seed", cfg.seed);
  rec.param("parallel_pairs", parallel.pairs.size());

  auto result = train_bilingual(c1, c2, parallel, cfg);
  const auto& r = result.report;
  for (std::size_t e = 0; e < r.monolingual_loss_l1.size(); ++e)
    err << "epoch " << e + 1 << " loss_" << o.lang_l1 << "=" << r.monolingual_loss_l1[e] << " loss_" << o.lang_l2
        << "=" << r.monolingual_loss_l2[e] << " regularizer=" << r.regularizer_loss[e] << "\n";
  rec.note("vocab_l1", r.vocab_l1);
  rec.note("vocab_l2", r.vocab_l2);
  rec.note("monolingual_loss_l1", r.monolingual_loss_l1);
  rec.note("monolingual_loss_l2", r.monolingual_loss_l2);
  rec.note("regularizer_loss", r.regularizer_loss);
  commit_outputs({{o.out_l1, format_embeddings(result.l1)}, {o.out_l2, format_embeddings(result.l2)}}, rec);
  return 0;
}

int cmd_align_fit(const Options& o, const std::vector<std::string>& args, std::ostream& err) {
  RunRecord rec("align fit", args);
  const auto src = load_vectors(o.source, o.source_lang, Collection::kTweet, rec, o.source_counts);
  const auto tgt = load_vectors(o.target, o.target_lang, Collection::kNews, rec, o.target_counts);
  const auto pairs = common_vocab(src, tgt, top_f_of(o.top_f));
  const auto model = procrustes_fit(pairs, parse_direction(o.mode.empty() ? "t2n" : o.mode));
  rec.param("direction", to_string(model.direction));
  rec.param("top_f", o.top_f);
  rec.param("anchors", pairs.size());
  rec.param("dim", model.dim());
  rec.note("scale", model.scale);
  rec.note("residual", model.residual);
  commit_outputs({{o.out, serialize_model(model)}}, rec);
  err << "align fit: " << pairs.size() << " anchors, d=" << model.dim() << ", scale=" << model.scale
      << ", residual=" << model.residual << "\n";
  return 0;
}

int cmd_align_apply(const Options& o, const std::vector<std::string>& args, std::ostream&) {
  RunRecord rec("align apply", args);
  rec.input(o.model);
  const auto model = load_model(o.model);
  const std::string coll =
      !o.collection.empty() ? o.collection : (model.direction == Direction::kT2N ? "tweet" : "news");
  const auto set = load_vectors(o.input, o.lang, parse_collection(coll), rec);
  const auto mapped = apply_alignment(model, set);
  rec.param("direction", to_string(model.direction));
  rec.param("collection", coll);
  commit_outputs({{o.out, format_embeddings(mapped)}}, rec);
  return 0;
}

int cmd_rbo(const Options& o, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunRecord rec("rbo", args);
  const auto src = load_vectors(o.source, o.source_lang, Collection::kTweet, rec, o.source_counts);
  const auto tgt = load_vectors(o.target, o.target_lang, Collection::kNews, rec, o.target_counts);
  const auto pairs = common_vocab(src, tgt, top_f_of(o.top_f));
  RboOptions ropt;
  ropt.persistence = o.persistence;
  ropt.depth = o.depth;
  ropt.variant = o.variant == "min" ? RboVariant::kMinimum : RboVariant::kExtrapolated;
  rec.param("persistence", o.persistence);
  rec.param("depth", o.depth);
  rec.param("variant", o.variant);
  rec.param("top_f", o.top_f);
  rec.param("tokens", pairs.size());

  const std::string mode = o.mode.empty() && o.model.empty() ? "t2n" : o.mode;
  const auto model = resolve_model(mode, o.model, src, tgt, top_f_of(o.top_f), rec);
  const auto before = rbo_per_token(src, tgt, pairs.tokens, ropt);
  std::optional<std::vector<double>> after;
  if (model) {
    if (model->direction == Direction::kT2N)
      after = rbo_per_token(apply_alignment(*model, src), tgt, pairs.tokens, ropt);
    else
      after = rbo_per_token(src, apply_alignment(*model, tgt), pairs.tokens, ropt);
  }

  std::string tsv = after ? "token\trbo_before\trbo_after\n" : "token\trbo_before\n";
  double sum_before = 0.0, sum_after = 0.0;
  for (std::size_t i = 0; i < pairs.tokens.size(); ++i) {
    sum_before += before[i];
    tsv += pairs.tokens[i] + '\t' + io::format_double(before[i]);
    if (after) {
      sum_after += (*after)[i];
      tsv += '\t' + io::format_double((*after)[i]);
    }
    tsv += '\n';
  }
  const double n = static_cast<double>(pairs.tokens.size());
  tsv += "mean\t" + io::format_double(sum_before / n);
  if (after) tsv += '\t' + io::format_double(sum_after / n);
  tsv += '\n';
  if (o.out.empty()) {
    out << tsv;
  } else {
    commit_outputs({{o.out, tsv}}, rec);
  }
  err << "rbo: " << pairs.tokens.size() << " tokens, mean before=" << sum_before / n;
  if (after) err << ", after=" << sum_after / n;
  err << "\n";
  return 0;
}

int cmd_neighbors(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  RunRecord rec("neighbors", args);
  const auto set = load_vectors(o.embeddings, o.lang, Collection::kNews, rec);
  const auto list = nearest_neighbors(set, o.query, o.depth);
  const RowVector q = *set.lookup(o.query);
  std::string tsv = "rank\ttoken\tcosine\n";
  for (std::size_t i = 0; i < list.items.size(); ++i) {
    const RowVector v = *set.lookup(list.items[i]);
    const double c = (q.norm() == 0.0 || v.norm() == 0.0) ? 0.0 : cosine(q, v);
    tsv += std::to_string(i + 1) + '\t' + list.items[i] + '\t' + io::format_double(c) + '\n';
  }
  rec.param("query", o.query);
  rec.param("depth", o.depth);
  if (o.out.empty())
    out << tsv;
  else
    commit_outputs({{o.out, tsv}}, rec);
  return 0;
}

int cmd_docsim(const Options& o, const std::vector<std::string>& args, std::ostream&) {
  RunRecord rec("docsim", args);
  const auto tweets = load_docs(o.tweets, rec);
  const auto news = load_docs(o.news, rec);
  const auto tset = load_vectors(o.tweet_vectors, o.tweet_lang, Collection::kTweet, rec);
  const auto nset = load_vectors(o.news_vectors, o.news_lang, Collection::kNews, rec);
  const auto model = resolve_model(o.mode, o.model, tset, nset, top_f_of(o.top_f), rec);
  rec.param("top_f", o.top_f);

  std::optional<EmbeddingSet> mapped;
  if (model) mapped = apply_alignment(*model, model->direction == Direction::kT2N ? tset : nset);
  const EmbeddingSet& tv = model && model->direction == Direction::kT2N ? *mapped : tset;
  const EmbeddingSet& nv = model && model->direction == Direction::kN2T ? *mapped : nset;
  const auto tw = tf_idf(tweets);
  const auto nw = tf_idf(news);

  std::vector<std::pair<std::string, std::string>> wanted;
  if (!o.pairs.empty()) {
    rec.input(o.pairs);
    for (const auto& g : load_gold(o.pairs)) wanted.emplace_back(g.tweet_id, g.news_id);
  } else {
    for (const auto& t : tweets)
      if (!t.dropped)
        for (const auto& n : news)
          if (!n.dropped) wanted.emplace_back(t.id, n.id);
  }
  std::map<std::string, const Document*> tindex, nindex;
  for (const auto& d : tweets) tindex.emplace(d.id, &d);
  for (const auto& d : news) nindex.emplace(d.id, &d);

  std::string tsv = "tweet_id\tnews_id\tcosine\n";
  for (const auto& [tid, nid] : wanted) {
    auto ti = tindex.find(tid);
    auto ni = nindex.find(nid);
    if (ti == tindex.end()) fail(ErrorCode::kUnresolvedId, "tweet id '" + tid + "' not in tweet corpus");
    if (ni == nindex.end()) fail(ErrorCode::kUnresolvedId, "news id '" + nid + "' not in news corpus");
    std::string value = "NA";
    if (!ti->second->dropped && !ni->second->dropped) {
      try {
        value = io::format_double(cosine(doc_embedding(*ti->second, tv, tw).vector, doc_embedding(*ni->second, nv, nw).vector));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoRepresentableTokens && e.code() != ErrorCode::kZeroVector) throw;
      }
    }
    tsv += tid + '\t' + nid + '\t' + value + '\n';
  }
  commit_outputs({{o.out, tsv}}, rec);
  return 0;
}

EvalOptions eval_options(const Options& o) {
  EvalOptions e;
  e.folds = o.folds;
  e.classifier.seed = o.seed;
  return e;
}

int cmd_evaluate(const Options& o, const std::vector<std::string>& args, std::ostream& err) {
  RunRecord rec("evaluate", args);
  rec.input(o.gold);
  const auto gold = load_gold(o.gold);
  const auto tweets = load_docs(o.tweets, rec);
  const auto news = load_docs(o.news, rec);
  const auto tset = load_vectors(o.tweet_vectors, o.tweet_lang, Collection::kTweet, rec);
  const auto nset = load_vectors(o.news_vectors, o.news_lang, Collection::kNews, rec);
  const auto model = resolve_model(o.mode, o.model, tset, nset, top_f_of(o.top_f), rec);
  rec.param("top_f", o.top_f);
  rec.param("seed", o.seed);
  rec.param("folds", o.folds);

  const auto report = evaluate_dataset(gold, tweets, news, tset, nset, model, eval_options(o));
  std::vector<std::pair<std::string, std::string>> files{{o.out, format_report(report)}};
  if (!o.pairs_out.empty()) files.emplace_back(o.pairs_out, format_pair_scores(report));
  commit_outputs(files, rec);
  err << "evaluate: r=" << report.pearson_r << " over " << report.n_pairs << " pairs (" << report.skipped
      << " skipped), transform " << to_string(report.mode) << "\n";
  return 0;
}

int cmd_sweep(const Options& o, const std::vector<std::string>& args, std::ostream& err) {
  RunRecord rec("sweep", args);
  if (o.tweet_vector_list.size() != o.news_vector_list.size())
    fail(ErrorCode::kLengthMismatch, "--tweet-vectors and --news-vectors need the same number of files");
  rec.input(o.gold);
  const auto gold = load_gold(o.gold);
  const auto tweets = load_docs(o.tweets, rec);
  const auto news = load_docs(o.news, rec);
  const std::vector<std::string> modes = o.modes.empty() ? std::vector<std::string>{"none", "t2n", "n2t"} : o.modes;
  rec.param("modes", modes);
  rec.param("top_f", o.top_f);
  rec.param("seed", o.seed);

  std::string tsv = "dim\ttransform\tpearson_r\tn_pairs\tskipped\taccuracy\ttweet_vectors\tnews_vectors\n";
  for (std::size_t i = 0; i < o.tweet_vector_list.size(); ++i) {
    const auto tset = load_vectors(o.tweet_vector_list[i], o.tweet_lang, Collection::kTweet, rec);
    const auto nset = load_vectors(o.news_vector_list[i], o.news_lang, Collection::kNews, rec);
    for (const auto& mode : modes) {
      RunRecord scratch("sweep", args);
      const auto model = resolve_model(mode, {}, tset, nset, top_f_of(o.top_f), scratch);
      const auto r = evaluate_dataset(gold, tweets, news, tset, nset, model, eval_options(o));
      tsv += std::to_string(r.dim) + '\t' + to_string(r.mode) + '\t' + io::format_double(r.pearson_r) + '\t' +
             std::to_string(r.n_pairs) + '\t' + std::to_string(r.skipped) + '\t' +
             (r.accuracy ? io::format_double(*r.accuracy) : "NA") + '\t' + o.tweet_vector_list[i] + '\t' +
             o.news_vector_list[i] + '\n';
      err << "sweep: d=" << r.dim << " " << to_string(r.mode) << " r=" << r.pearson_r << "\n";
    }
  }
  commit_outputs({{o.out, tsv}}, rec);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Transformed word embeddings: align tweet and news vector spaces and score tweet-news relevance",
               "twe"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TWE_VERSION);

  const auto mode_check = CLI::IsMember({"none", "t2n", "n2t", "T2N", "N2T"});
  const auto positive = CLI::PositiveNumber;

  auto* preprocess = app.add_subcommand("preprocess", "Clean and tokenize a JSON-Lines corpus into a token dump");
  preprocess->add_option("--input", o.input, "JSON-Lines corpus")->required()->check(CLI::ExistingFile);
  preprocess->add_option("--out", o.out, "Token dump TSV (id<TAB>tokens)")->required();

  auto* train = app.add_subcommand("train-bilingual", "Train bilingual embeddings with the sentence-mean regularizer");
  train->add_option("--corpus-l1", o.corpus_l1, "Monolingual corpus of language 1 (JSON-Lines)")->required()->check(CLI::ExistingFile);
  train->add_option("--corpus-l2", o.corpus_l2, "Monolingual corpus of language 2 (JSON-Lines)")->required()->check(CLI::ExistingFile);
  train->add_option("--parallel-l1", o.parallel_l1, "Language-1 side of the bitext")->required()->check(CLI::ExistingFile);
  train->add_option("--parallel-l2", o.parallel_l2, "Language-2 side of the bitext")->required()->check(CLI::ExistingFile);
  train->add_option("--lang-l1", o.lang_l1, "Language tag of l1")->capture_default_str();
  train->add_option("--lang-l2", o.lang_l2, "Language tag of l2")->capture_default_str();
  train->add_option("--dim", o.train.dim, "Embedding dimension")->capture_default_str()->check(positive);
  train->add_option("--window", o.train.window, "Context radius")->capture_default_str()->check(positive);
  train->add_option("--min-count", o.train.min_count, "Minimum token count")->capture_default_str()->check(positive);
  train->add_option("--lambda", o.train.lambda, "Cross-lingual weight")->capture_default_str()->check(CLI::NonNegativeNumber);
  train->add_option("--epochs", o.train.epochs, "Training epochs")->capture_default_str()->check(positive);
  train->add_option("--learning-rate", o.train.learning_rate, "Initial learning rate")->capture_default_str()->check(positive);
  train->add_option("--negative", o.train.negative_samples, "Negative samples per pair")->capture_default_str()->check(CLI::NonNegativeNumber);
  train->add_option("--seed", o.train.seed, "Random seed")->capture_default_str();
  train->add_flag("--left-only", o.train.left_only, "Use only left context");
  train->add_option("--out-l1", o.out_l1, "Output vectors for l1")->required();
  train->add_option("--out-l2", o.out_l2, "Output vectors for l2")->required();

  auto* align = app.add_subcommand("align", "Fit or apply a Procrustes alignment");
  align->require_subcommand(1);
  auto* fit = align->add_subcommand("fit", "Fit an alignment between tweet and news vectors");
  fit->add_option("--source", o.source, "Tweet vectors")->required()->check(CLI::ExistingFile);
  fit->add_option("--target", o.target, "News (or bilingual news) vectors")->required()->check(CLI::ExistingFile);
  fit->add_option("--source-counts", o.source_counts, "token<TAB>count file ranking the source")->check(CLI::ExistingFile);
  fit->add_option("--target-counts", o.target_counts, "token<TAB>count file ranking the target")->check(CLI::ExistingFile);
  fit->add_option("--source-lang", o.source_lang)->capture_default_str();
  fit->add_option("--target-lang", o.target_lang)->capture_default_str();
  fit->add_option("--mode", o.mode, "t2n or n2t")->check(CLI::IsMember({"t2n", "n2t", "T2N", "N2T"}));
  fit->add_option("--top-f", o.top_f, "Use only the most frequent N shared tokens (0 = all)")->capture_default_str();
  fit->add_option("--out", o.out, "Model file")->required();
  auto* apply = align->add_subcommand("apply", "Map embeddings through a fitted model");
  apply->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);
  apply->add_option("--input", o.input, "Vectors to map")->required()->check(CLI::ExistingFile);
  apply->add_option("--collection", o.collection, "tweet or news")->check(CLI::IsMember({"tweet", "news"}));
  apply->add_option("--lang", o.lang)->capture_default_str();
  apply->add_option("--out", o.out, "Mapped vectors")->required();

  auto* rbo_cmd = app.add_subcommand("rbo", "Average RBO of neighbour lists before and after alignment");
  rbo_cmd->add_option("--source", o.source, "Tweet vectors")->required()->check(CLI::ExistingFile);
  rbo_cmd->add_option("--target", o.target, "News vectors")->required()->check(CLI::ExistingFile);
  rbo_cmd->add_option("--source-counts", o.source_counts)->check(CLI::ExistingFile);
  rbo_cmd->add_option("--target-counts", o.target_counts)->check(CLI::ExistingFile);
  rbo_cmd->add_option("--model", o.model, "Use this model instead of fitting one")->check(CLI::ExistingFile);
  rbo_cmd->add_option("--mode", o.mode, "none, t2n (default) or n2t")->check(mode_check);
  rbo_cmd->add_option("--persistence", o.persistence, "RBO persistence p")->capture_default_str()->check(open_unit_interval());
  rbo_cmd->add_option("--depth", o.depth, "Neighbour list depth k")->capture_default_str()->check(positive);
  rbo_cmd->add_option("--top-f", o.top_f, "Most frequent N shared tokens (0 = all)")->capture_default_str();
  rbo_cmd->add_option("--variant", o.variant, "ext or min")->capture_default_str()->check(CLI::IsMember({"ext", "min"}));
  rbo_cmd->add_option("--out", o.out, "Report TSV (stdout if omitted)");

  auto* nn = app.add_subcommand("neighbors", "Nearest neighbours of a token by cosine similarity");
  nn->add_option("--embeddings", o.embeddings, "Vectors")->required()->check(CLI::ExistingFile);
  nn->add_option("--query", o.query, "Query token")->required();
  nn->add_option("--depth", o.depth, "Number of neighbours")->capture_default_str()->check(positive);
  nn->add_option("--out", o.out, "Output TSV (stdout if omitted)");

  auto add_docs = [&](CLI::App* sub) {
    sub->add_option("--tweets", o.tweets, "Tweet corpus (JSON-Lines)")->required()->check(CLI::ExistingFile);
    sub->add_option("--news", o.news, "News corpus (JSON-Lines)")->required()->check(CLI::ExistingFile);
    sub->add_option("--tweet-lang", o.tweet_lang)->capture_default_str();
    sub->add_option("--news-lang", o.news_lang)->capture_default_str();
    sub->add_option("--top-f", o.top_f, "Most frequent N shared tokens used for fitting (0 = all)")->capture_default_str();
  };

  auto* docsim = app.add_subcommand("docsim", "Cosine similarity of tweet and news document vectors");
  add_docs(docsim);
  docsim->add_option("--tweet-vectors", o.tweet_vectors)->required()->check(CLI::ExistingFile);
  docsim->add_option("--news-vectors", o.news_vectors)->required()->check(CLI::ExistingFile);
  docsim->add_option("--model", o.model)->check(CLI::ExistingFile);
  docsim->add_option("--mode", o.mode, "none, t2n or n2t")->check(mode_check);
  docsim->add_option("--pairs", o.pairs, "TSV with tweet_id/news_id header (default: all pairs)")->check(CLI::ExistingFile);
  docsim->add_option("--out", o.out)->required();

  auto* evaluate = app.add_subcommand("evaluate", "Correlate document similarities with gold judgments");
  add_docs(evaluate);
  evaluate->add_option("--gold", o.gold, "Gold judgments TSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--tweet-vectors", o.tweet_vectors)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--news-vectors", o.news_vectors)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--model", o.model)->check(CLI::ExistingFile);
  evaluate->add_option("--mode", o.mode, "none, t2n or n2t")->check(mode_check);
  evaluate->add_option("--seed", o.seed, "Classifier seed")->capture_default_str();
  evaluate->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 1000));
  evaluate->add_option("--pairs-out", o.pairs_out, "Per-pair score TSV");
  evaluate->add_option("--out", o.out, "Report")->required();

  auto* sweep = app.add_subcommand("sweep", "Evaluate several embedding dimensions and transform modes");
  add_docs(sweep);
  sweep->add_option("--gold", o.gold)->required()->check(CLI::ExistingFile);
  sweep->add_option("--tweet-vectors", o.tweet_vector_list, "Tweet vector files")->required()->delimiter(',')->check(CLI::ExistingFile);
  sweep->add_option("--news-vectors", o.news_vector_list, "News vector files")->required()->delimiter(',')->check(CLI::ExistingFile);
  sweep->add_option("--modes", o.modes, "Transform modes")->delimiter(',')->check(CLI::IsMember({"none", "t2n", "n2t"}));
  sweep->add_option("--seed", o.seed)->capture_default_str();
  sweep->add_option("--folds", o.folds)->capture_default_str()->check(CLI::Range(2, 1000));
  sweep->add_option("--out", o.out)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << TWE_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    const CLI::App* where = &app;
    for (const auto* sub : app.get_subcommands()) {
      where = sub;
      for (const auto* subsub : sub->get_subcommands()) where = subsub;
    }
    err << where->help();
    return 2;
  }

  try {
    if (preprocess->parsed()) return cmd_preprocess(o, args, err);
    if (train->parsed()) return cmd_train_bilingual(o, args, err);
    if (fit->parsed()) return cmd_align_fit(o, args, err);
    if (apply->parsed()) return cmd_align_apply(o, args, err);
    if (rbo_cmd->parsed()) return cmd_rbo(o, args, out, err);
    if (nn->parsed()) return cmd_neighbors(o, args, out);
    if (docsim->parsed()) return cmd_docsim(o, args, err);
    if (evaluate->parsed()) return cmd_evaluate(o, args, err);
    if (sweep->parsed()) return cmd_sweep(o, args, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (...) {
    err << "error: unknown failure\n";
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace twe::cli
