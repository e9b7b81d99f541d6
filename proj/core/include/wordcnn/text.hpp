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

#ifndef WORDCNN_TEXT_HPP_
#define WORDCNN_TEXT_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wordcnn/corpus.hpp"

namespace wordcnn {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr TokenId kFirstCorpusId = 2;

/// Lowercases ASCII letters and splits on every maximal run of bytes that
/// are neither ASCII letters nor ASCII digits. Bytes >= 0x80 count as letter
/// characters, so UTF-8 words stay intact (they are not case-folded).
std::vector<std::string> tokenize(std::string_view text);

/// Token <-> id table with corpus frequencies. Ids 0 and 1 are reserved for
/// PAD and UNK; corpus tokens occupy [2, size()).
class Vocabulary {
 public:
  Vocabulary();

  /// Builds ids 2, 3, ... in the given order. Throws InputError on an empty
  /// or duplicate token.
  static Vocabulary from_entries(std::vector<std::pair<std::string, std::uint64_t>> entries);

  std::size_t size() const noexcept { return tokens_.size(); }

  /// Id of `token`, or UNK.
  TokenId id_of(std::string_view token) const;
  std::optional<TokenId> find(std::string_view token) const;

  /// "<pad>" and "<unk>" for the reserved ids.
  const std::string& token(TokenId id) const;
  std::uint64_t frequency(TokenId id) const;

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && frequencies_ == other.frequencies_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> frequencies_;
  std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> index_;
};

/// Streaming frequency counter. Tokens are ranked by descending frequency,
/// ties broken by first appearance.
class VocabularyBuilder {
 public:
  void add(std::span<const std::string> tokens);
  Vocabulary build(std::size_t capacity) const;

  std::uint64_t total_tokens() const noexcept { return total_; }
  std::size_t distinct_tokens() const noexcept { return counts_.size(); }

 private:
  struct Count {
    std::uint64_t frequency = 0;
    std::size_t first_seen = 0;
  };
  std::unordered_map<std::string, Count> counts_;
  std::uint64_t total_ = 0;
};

/// Keeps the `capacity` most frequent tokens. Throws ConfigError when
/// capacity is 0.
Vocabulary build_vocabulary(std::span<const std::vector<std::string>> token_streams,
                            std::size_t capacity);

/// `token<TAB>frequency` per line, ids 2.. in order.
void write_vocabulary(std::ostream& out, const Vocabulary& vocab);
Vocabulary read_vocabulary(std::istream& in);

/// Maps tokens to ids (unknown -> UNK), keeps the first `max_len`, pads the
/// tail with PAD. Output length is always exactly `max_len`.
std::vector<TokenId> encode(std::span<const std::string> tokens, const Vocabulary& vocab,
                            std::size_t max_len);

/// Inverse of encode on non-PAD ids.
std::vector<std::string> decode(std::span<const TokenId> ids, const Vocabulary& vocab);

/// A fixed-length encoded review with its label.
struct LabeledExample {
  std::vector<TokenId> token_ids;
  Polarity label = Polarity::Negative;
};

/// Tokenizes and encodes. Returns nothing when the text has no tokens (an
/// all-PAD sequence is not a valid example).
std::optional<LabeledExample> make_example(std::string_view text, Polarity label,
                                           const Vocabulary& vocab, std::size_t max_len);

}  // namespace wordcnn

#endif  // WORDCNN_TEXT_HPP_
