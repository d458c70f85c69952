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

// Aligns two embedding files and prints how the neighbourhoods of a few
// shared words agree before and after the transform.
//
//   align_demo <tweets.vec> <news.vec> [word ...]

#include <iostream>
#include <string>
#include <vector>

#include "twe/twe.hpp"

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: align_demo <tweets.vec> <news.vec> [word ...]\n";
    return 2;
  }
  try {
    const auto tweets = twe::load_embeddings(argv[1], "en", twe::Collection::kTweet);
    const auto news = twe::load_embeddings(argv[2], "en", twe::Collection::kNews);
    const auto pairs = twe::common_vocab(tweets, news, 5000);
    const auto model = twe::procrustes_fit(pairs, twe::Direction::kT2N);
    const auto mapped = twe::apply_alignment(model, tweets);
    std::cout << "anchors " << pairs.size() << "  scale " << model.scale << "  residual " << model.residual << "\n";

    twe::RboOptions opts;
    opts.depth = 10;
    std::cout << "mean RBO@10 before " << twe::avg_rbo(tweets, news, pairs.tokens, opts) << ", after "
              << twe::avg_rbo(mapped, news, pairs.tokens, opts) << "\n";

    std::vector<std::string> words(argv + 3, argv + argc);
    if (words.empty()) words.assign(pairs.tokens.begin(), pairs.tokens.begin() + std::min<std::size_t>(3, pairs.size()));
    for (const auto& w : words) {
      const auto a = mapped.lookup(w);
      const auto b = news.lookup(w);
      if (!a || !b) {
        std::cout << w << ": not shared\n";
        continue;
      }
      std::cout << w << ": cosine(tweet->news, news) = " << twe::cosine(*a, *b) << "\n";
    }
  } catch (const twe::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
