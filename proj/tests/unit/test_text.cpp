// Copyright 2026 The WordCNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "wordcnn/errors.hpp"
#include "wordcnn/rng.hpp"
#include "wordcnn/text.hpp"

using namespace wordcnn;
using Tokens = std::vector<std::string>;

TEST_CASE("tokenize") {
  CHECK(tokenize("Great food!!") == Tokens{"great", "food"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("5-star place") == Tokens{"5", "star", "place"});
  CHECK(tokenize("  ...  ").empty());
  CHECK(tokenize("Crème brûlée") == Tokens{"crème", "brûlée"});
  CHECK(tokenize("ALL_CAPS\tand\nlines") == Tokens{"all", "caps", "and", "lines"});
}

TEST_CASE("vocabulary: capacity 1 keeps the most frequent") {
  const std::vector<Tokens> streams{{"a", "b", "a"}};
  const auto v = build_vocabulary(streams, 1);
  CHECK(v.size() == 3);
  CHECK(v.id_of("a") == 2);
  CHECK(v.id_of("b") == kUnkId);
  CHECK(v.token(kPadId) == "<pad>");
  CHECK(v.token(kUnkId) == "<unk>");
  CHECK(v.frequency(2) == 2);
}

TEST_CASE("vocabulary: ties broken by first appearance") {
  const std::vector<Tokens> streams{{"a", "b"}, {"b", "c"}};
  const auto v = build_vocabulary(streams, 2);
  CHECK(v.size() == 4);
  CHECK(v.id_of("b") == 2);
  CHECK(v.id_of("a") == 3);
  CHECK_FALSE(v.find("c").has_value());
}

TEST_CASE("vocabulary: empty streams give only PAD and UNK") {
  const std::vector<Tokens> none;
  CHECK(build_vocabulary(none, 10).size() == 2);
  CHECK_THROWS_AS(build_vocabulary(none, 0), ConfigError);
}

TEST_CASE("vocabulary: random corpora respect capacity and frequency order") {
  Rng rng(3);
  for (int round = 0; round < 100; ++round) {
    const std::size_t alphabet = 1 + rng.below(40);
    std::vector<Tokens> streams(1 + rng.below(10));
    std::map<std::string, std::uint64_t> freq;
    for (auto& s : streams) {
      const std::size_t len = rng.below(30);
      for (std::size_t i = 0; i < len; ++i) {
        // Skewed draw so frequencies differ.
        const std::size_t t = rng.below(1 + rng.below(alphabet));
        s.push_back("w" + std::to_string(t));
        ++freq[s.back()];
      }
    }
    const std::size_t cap = 1 + rng.below(alphabet + 3);
    const auto v = build_vocabulary(streams, cap);
    CHECK(v.size() <= cap + 2);
    CHECK(v.size() == std::min(cap, freq.size()) + 2);
    std::uint64_t min_kept = UINT64_MAX;
    for (TokenId id = kFirstCorpusId; id < static_cast<TokenId>(v.size()); ++id) {
      CHECK(v.frequency(id) == freq[v.token(id)]);
      if (id > kFirstCorpusId) CHECK(v.frequency(id) <= v.frequency(id - 1));
      min_kept = std::min(min_kept, v.frequency(id));
    }
    for (const auto& [tok, f] : freq) {
      if (!v.find(tok)) CHECK(f <= min_kept);
    }
  }
}

TEST_CASE("vocabulary file round-trip") {
  const std::vector<Tokens> streams{{"x", "y", "y", "ü"}, {"z", "x", "x"}};
  const auto v = build_vocabulary(streams, 100);
  std::ostringstream out;
  write_vocabulary(out, v);
  CHECK(out.str() == "x\t3\ny\t2\nü\t1\nz\t1\n");
  std::istringstream in(out.str());
  const auto back = read_vocabulary(in);
  CHECK(back == v);
  std::ostringstream again;
  write_vocabulary(again, back);
  CHECK(again.str() == out.str());
}

TEST_CASE("vocabulary file: malformed input") {
  std::istringstream no_tab("token 3\n");
  CHECK_THROWS_AS(read_vocabulary(no_tab), ParseError);
  std::istringstream dup("a\t1\na\t1\n");
  CHECK_THROWS_AS(read_vocabulary(dup), ParseError);
  std::istringstream bad_freq("a\tmany\n");
  CHECK_THROWS_AS(read_vocabulary(bad_freq), ParseError);
}

TEST_CASE("encode") {
  const auto v = Vocabulary::from_entries({{"a", 1}});
  CHECK(encode(Tokens{"a"}, v, 3) == std::vector<TokenId>{2, 0, 0});
  CHECK(encode(Tokens{"x"}, v, 2) == std::vector<TokenId>{1, 0});
  Tokens long_review(1200);
  for (std::size_t i = 0; i < long_review.size(); ++i) long_review[i] = i < 1000 ? "a" : "x";
  const auto ids = encode(long_review, v, 1000);
  CHECK(ids.size() == 1000);
  CHECK(std::all_of(ids.begin(), ids.end(), [](TokenId id) { return id == 2; }));
}

TEST_CASE("encode/decode round-trip over random corpora") {
  Rng rng(11);
  for (int round = 0; round < 100; ++round) {
    std::vector<Tokens> streams(3);
    for (auto& s : streams) {
      for (std::size_t i = 0; i < 20; ++i) s.push_back("t" + std::to_string(rng.below(15)));
    }
    const auto v = build_vocabulary(streams, 1 + rng.below(15));
    Tokens input;
    const std::size_t len = 1 + rng.below(30);
    for (std::size_t i = 0; i < len; ++i) input.push_back("t" + std::to_string(rng.below(20)));
    const std::size_t max_len = 1 + rng.below(40);
    const auto ids = encode(input, v, max_len);
    CHECK(ids.size() == max_len);
    const auto back = decode(ids, v);
    const std::size_t kept = std::min(max_len, input.size());
    REQUIRE(back.size() == kept);
    for (std::size_t i = 0; i < kept; ++i) {
      CHECK(back[i] == (v.find(input[i]) ? input[i] : std::string("<unk>")));
    }
  }
}

TEST_CASE("make_example rejects token-less text") {
  const auto v = Vocabulary::from_entries({{"good", 5}});
  CHECK_FALSE(make_example("!!!", Polarity::Positive, v, 4).has_value());
  const auto ex = make_example("Good, good", Polarity::Positive, v, 4);
  REQUIRE(ex);
  CHECK(ex->token_ids == std::vector<TokenId>{2, 2, 0, 0});
}

TEST_CASE("from_entries validation") {
  CHECK_THROWS_AS(Vocabulary::from_entries({{"a", 1}, {"a", 2}}), InputError);
  CHECK_THROWS_AS(Vocabulary::from_entries({{"", 1}}), InputError);
}
