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

#ifndef WORDCNN_EMBED_HPP_
#define WORDCNN_EMBED_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wordcnn/rng.hpp"
#include "wordcnn/text.hpp"

namespace wordcnn {

enum class VectorFormat {
  GloveText,      // `token v1 ... vD` lines, no header
  FastTextText,   // `<count> <dim>` header, then GloVe-style lines
  Word2VecBinary  // ASCII header, then `token ` + D little-endian float32
};

std::string_view to_string(VectorFormat format) noexcept;
/// Accepts "glove_text", "fasttext_text", "word2vec_binary".
std::optional<VectorFormat> parse_vector_format(std::string_view name) noexcept;

/// Pretrained vectors keyed by token, in file order.
class WordVectorTable {
 public:
  explicit WordVectorTable(std::size_t dimension);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return tokens_.size(); }

  /// Appends an entry. Returns false (and leaves the table unchanged) if the
  /// token is already present. Throws InputError on a wrong-length vector.
  bool add(std::string token, std::span<const float> values);

  std::optional<std::span<const float>> find(std::string_view token) const;
  const std::string& token(std::size_t index) const { return tokens_[index]; }
  std::span<const float> vector(std::size_t index) const {
    return {values_.data() + index * dimension_, dimension_};
  }

  /// Count from the file header, when the format has one.
  std::optional<std::size_t> declared_count;
  /// Entries dropped because their token was already present.
  std::size_t duplicates = 0;
  /// Binary entries dropped because their token was not valid UTF-8.
  std::size_t invalid_utf8 = 0;
  /// Binary layout: whether each vector is followed by '\n'.
  bool binary_newlines = true;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::size_t dimension_;
  std::vector<std::string> tokens_;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
};

/// Text vectors (GloVe without header, fastText `.vec` with a `<count> <dim>`
/// header). The dimension comes from the header, else from the first data
/// line; any line with a different arity is a ParseError carrying its line
/// number. Trailing whitespace on a line is ignored.
WordVectorTable parse_text_vectors(std::istream& in, bool expect_header);

/// word2vec binary vectors. Truncation is a ParseError carrying the 1-based
/// entry index.
WordVectorTable parse_binary_vectors(std::istream& in);

void write_text_vectors(std::ostream& out, const WordVectorTable& table, bool with_header);
void write_binary_vectors(std::ostream& out, const WordVectorTable& table);

WordVectorTable load_vectors(const std::filesystem::path& path, VectorFormat format);

bool is_valid_utf8(std::string_view bytes) noexcept;

enum class RowSource : std::uint8_t { Pretrained, RandomOOV, PadZero };

/// Initial embedding weights for a model: one row per vocabulary id.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dimension = 0;
  std::vector<float> values;  // rows x dimension, row-major
  std::vector<RowSource> provenance;
  bool trainable = true;

  std::span<const float> row(std::size_t r) const {
    return {values.data() + r * dimension, dimension};
  }
  std::size_t count(RowSource source) const;
};

/// Half-width of the uniform range used for out-of-vocabulary rows.
inline constexpr float kOovRange = 0.25f;

/// One coordinate uniformly from the open interval (-0.25, 0.25).
float sample_oov(Rng& rng) noexcept;

/// Row 0 (PAD) is zero; rows of tokens found in `table` are copied; every
/// other row, UNK included, is drawn with sample_oov from a generator seeded
/// with `seed`, in id order. Throws ConfigError if table->dimension() !=
/// dimension.
EmbeddingMatrix assemble_matrix(const Vocabulary& vocab, const WordVectorTable* table,
                                std::size_t dimension, std::uint64_t seed, bool trainable);

}  // namespace wordcnn

#endif  // WORDCNN_EMBED_HPP_
