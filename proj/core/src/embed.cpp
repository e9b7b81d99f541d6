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

#include "wordcnn/embed.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "strings.hpp"
#include "wordcnn/errors.hpp"

namespace wordcnn {
namespace {

constexpr std::size_t kMaxBinaryTokenBytes = 1 << 16;

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && detail::is_space(line[pos])) ++pos;
    if (pos == line.size()) break;
    const std::size_t begin = pos;
    while (pos < line.size() && !detail::is_space(line[pos])) ++pos;
    fields.push_back(line.substr(begin, pos - begin));
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc{} && ptr == field.data() + field.size();
}

struct Header {
  std::size_t count;
  std::size_t dimension;
};

std::optional<Header> parse_header(std::string_view line) {
  const auto fields = split_spaces(line);
  Header header{};
  if (fields.size() != 2 || !parse_number(fields[0], header.count) ||
      !parse_number(fields[1], header.dimension) || header.dimension == 0) {
    return std::nullopt;
  }
  return header;
}

std::string line_error(std::size_t line_no, const std::string& what) {
  return "line " + std::to_string(line_no) + ": " + what;
}

void append_float(std::string& out, float value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  out.append(buf.data(), ptr);
}

}  // namespace

std::string_view to_string(VectorFormat format) noexcept {
  switch (format) {
    case VectorFormat::GloveText:
      return "glove_text";
    case VectorFormat::FastTextText:
      return "fasttext_text";
    case VectorFormat::Word2VecBinary:
      return "word2vec_binary";
  }
  return "unknown";
}

std::optional<VectorFormat> parse_vector_format(std::string_view name) noexcept {
  if (name == "glove_text") return VectorFormat::GloveText;
  if (name == "fasttext_text") return VectorFormat::FastTextText;
  if (name == "word2vec_binary") return VectorFormat::Word2VecBinary;
  return std::nullopt;
}

WordVectorTable::WordVectorTable(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw InputError("vector dimension must be at least 1");
}

bool WordVectorTable::add(std::string token, std::span<const float> values) {
  if (values.size() != dimension_) {
    throw InputError("vector for '" + token + "' has " + std::to_string(values.size()) +
                     " values, expected " + std::to_string(dimension_));
  }
  if (index_.contains(token)) return false;
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
  values_.insert(values_.end(), values.begin(), values.end());
  return true;
}

std::optional<std::span<const float>> WordVectorTable::find(std::string_view token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return vector(it->second);
}

WordVectorTable parse_text_vectors(std::istream& in, bool expect_header) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<WordVectorTable> table;
  std::optional<std::size_t> declared;

  if (expect_header) {
    if (!std::getline(in, line)) throw ParseError("empty vector file", 0);
    ++line_no;
    const auto header = parse_header(line);
    if (!header) throw ParseError(line_error(1, "expected '<count> <dim>' header"), 1);
    table.emplace(header->dimension);
    declared = header->count;
  }

  std::vector<float> values;
  std::size_t data_lines = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) throw ParseError(line_error(line_no, "token without values"), line_no);
    if (!table) table.emplace(fields.size() - 1);
    if (fields.size() - 1 != table->dimension()) {
      throw ParseError(line_error(line_no, "expected " + std::to_string(table->dimension()) +
                                               " values, found " +
                                               std::to_string(fields.size() - 1)),
                       line_no);
    }
    values.resize(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (!parse_number(fields[i], values[i - 1])) {
        throw ParseError(line_error(line_no, "bad number '" + std::string(fields[i]) + "'"),
                         line_no);
      }
    }
    ++data_lines;
    if (declared && data_lines > *declared) {
      throw ParseError(line_error(line_no, "more entries than the declared " +
                                               std::to_string(*declared)),
                       line_no);
    }
    if (!table->add(std::string(fields[0]), values)) ++table->duplicates;
  }
  if (!table) throw ParseError("empty vector file", 0);
  table->declared_count = declared;
  return std::move(*table);
}

WordVectorTable parse_binary_vectors(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty vector file", 0);
  const auto header = parse_header(line);
  if (!header) throw ParseError("binary header must be two integers '<count> <dim>'", 0);

  WordVectorTable table(header->dimension);
  table.declared_count = header->count;

  std::vector<char> raw(header->dimension * 4);
  std::vector<float> values(header->dimension);
  std::string token;
  for (std::size_t entry = 1; entry <= header->count; ++entry) {
    const auto truncated = [&] {
      return ParseError("truncated binary vector file at entry " + std::to_string(entry), entry);
    };
    token.clear();
    int c = in.get();
    if (c == '\n') c = in.get();
    while (c != std::char_traits<char>::eof() && c != ' ') {
      token.push_back(static_cast<char>(c));
      if (token.size() > kMaxBinaryTokenBytes) {
        throw ParseError("token too long at entry " + std::to_string(entry), entry);
      }
      c = in.get();
    }
    if (c == std::char_traits<char>::eof()) throw truncated();
    if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size()))) throw truncated();
    for (std::size_t d = 0; d < header->dimension; ++d) {
      const auto* b = reinterpret_cast<const unsigned char*>(raw.data() + 4 * d);
      const std::uint32_t bits = std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) |
                                 (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24);
      values[d] = std::bit_cast<float>(bits);
    }
    if (entry == 1) table.binary_newlines = in.peek() == '\n';
    if (token.empty()) throw ParseError("empty token at entry " + std::to_string(entry), entry);
    if (!is_valid_utf8(token)) {
      ++table.invalid_utf8;
      continue;
    }
    if (!table.add(token, values)) ++table.duplicates;
  }
  return table;
}

void write_text_vectors(std::ostream& out, const WordVectorTable& table, bool with_header) {
  if (with_header) out << table.size() << ' ' << table.dimension() << '\n';
  std::string line;
  for (std::size_t i = 0; i < table.size(); ++i) {
    line = table.token(i);
    for (float v : table.vector(i)) {
      line.push_back(' ');
      append_float(line, v);
    }
    line.push_back('\n');
    out << line;
  }
}

void write_binary_vectors(std::ostream& out, const WordVectorTable& table) {
  out << table.size() << ' ' << table.dimension() << '\n';
  std::vector<char> raw(table.dimension() * 4);
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.token(i) << ' ';
    const auto vec = table.vector(i);
    for (std::size_t d = 0; d < vec.size(); ++d) {
      const auto bits = std::bit_cast<std::uint32_t>(vec[d]);
      for (int byte = 0; byte < 4; ++byte) {
        raw[4 * d + static_cast<std::size_t>(byte)] = static_cast<char>((bits >> (8 * byte)) & 0xFF);
      }
    }
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (table.binary_newlines) out << '\n';
  }
}

WordVectorTable load_vectors(const std::filesystem::path& path, VectorFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open vector file " + path.string());
  switch (format) {
    case VectorFormat::GloveText:
      return parse_text_vectors(in, false);
    case VectorFormat::FastTextText:
      return parse_text_vectors(in, true);
    case VectorFormat::Word2VecBinary:
      return parse_binary_vectors(in);
  }
  throw InputError("unknown vector format");
}

bool is_valid_utf8(std::string_view bytes) noexcept {
  std::size_t i = 0;
  while (i < bytes.size()) {
    const auto c = static_cast<unsigned char>(bytes[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= bytes.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and values past U+10FFFF.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

std::size_t EmbeddingMatrix::count(RowSource source) const {
  std::size_t n = 0;
  for (auto s : provenance) n += s == source ? 1 : 0;
  return n;
}

float sample_oov(Rng& rng) noexcept {
  for (;;) {
    const auto x = static_cast<float>(rng.uniform(-0.25, 0.25));
    // Rounding to float can land exactly on the closed end points.
    if (x > -kOovRange && x < kOovRange) return x;
  }
}

EmbeddingMatrix assemble_matrix(const Vocabulary& vocab, const WordVectorTable* table,
                                std::size_t dimension, std::uint64_t seed, bool trainable) {
  if (dimension == 0) throw ConfigError("embedding dimension must be at least 1");
  if (table != nullptr && table->dimension() != dimension) {
    throw ConfigError("embedding dimension " + std::to_string(dimension) +
                      " does not match vector file dimension " +
                      std::to_string(table->dimension()));
  }
  EmbeddingMatrix m;
  m.rows = vocab.size();
  m.dimension = dimension;
  m.trainable = trainable;
  m.values.assign(m.rows * dimension, 0.0f);
  m.provenance.assign(m.rows, RowSource::RandomOOV);
  m.provenance[kPadId] = RowSource::PadZero;

  Rng rng(seed);
  for (std::size_t r = 1; r < m.rows; ++r) {
    float* dst = m.values.data() + r * dimension;
    if (table != nullptr && r >= static_cast<std::size_t>(kFirstCorpusId)) {
      if (const auto vec = table->find(vocab.token(static_cast<TokenId>(r)))) {
        std::copy(vec->begin(), vec->end(), dst);
        m.provenance[r] = RowSource::Pretrained;
        continue;
      }
    }
    for (std::size_t d = 0; d < dimension; ++d) dst[d] = sample_oov(rng);
  }
  return m;
}

}  // namespace wordcnn
