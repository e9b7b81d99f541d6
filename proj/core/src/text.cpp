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

#include "wordcnn/text.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>

#include "strings.hpp"
#include "wordcnn/errors.hpp"

namespace wordcnn {
namespace {

const std::string kPadToken = "<pad>";
const std::string kUnkToken = "<unk>";

bool is_word_byte(unsigned char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Vocabulary::Vocabulary() : tokens_{kPadToken, kUnkToken}, frequencies_{0, 0} {}

Vocabulary Vocabulary::from_entries(std::vector<std::pair<std::string, std::uint64_t>> entries) {
  Vocabulary vocab;
  vocab.tokens_.reserve(entries.size() + 2);
  vocab.frequencies_.reserve(entries.size() + 2);
  vocab.index_.reserve(entries.size());
  for (auto& [token, frequency] : entries) {
    if (token.empty()) throw InputError("vocabulary token must not be empty");
    const auto id = static_cast<TokenId>(vocab.tokens_.size());
    if (!vocab.index_.emplace(token, id).second) {
      throw InputError("duplicate vocabulary token '" + token + "'");
    }
    vocab.tokens_.push_back(std::move(token));
    vocab.frequencies_.push_back(frequency);
  }
  return vocab;
}

TokenId Vocabulary::id_of(std::string_view token) const { return find(token).value_or(kUnkId); }

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  return tokens_.at(static_cast<std::size_t>(id));
}

std::uint64_t Vocabulary::frequency(TokenId id) const {
  return frequencies_.at(static_cast<std::size_t>(id));
}

void VocabularyBuilder::add(std::span<const std::string> tokens) {
  for (const auto& token : tokens) {
    auto [it, inserted] = counts_.try_emplace(token);
    if (inserted) it->second.first_seen = counts_.size() - 1;
    ++it->second.frequency;
    ++total_;
  }
}

Vocabulary VocabularyBuilder::build(std::size_t capacity) const {
  if (capacity == 0) throw ConfigError("vocabulary capacity must be at least 1");
  std::vector<const std::pair<const std::string, Count>*> ranked;
  ranked.reserve(counts_.size());
  for (const auto& entry : counts_) ranked.push_back(&entry);
  std::sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) {
    if (a->second.frequency != b->second.frequency) {
      return a->second.frequency > b->second.frequency;
    }
    return a->second.first_seen < b->second.first_seen;
  });
  if (ranked.size() > capacity) ranked.resize(capacity);

  std::vector<std::pair<std::string, std::uint64_t>> entries;
  entries.reserve(ranked.size());
  for (const auto* entry : ranked) entries.emplace_back(entry->first, entry->second.frequency);
  return Vocabulary::from_entries(std::move(entries));
}

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> token_streams,
                            std::size_t capacity) {
  VocabularyBuilder builder;
  for (const auto& stream : token_streams) builder.add(stream);
  return builder.build(capacity);
}

void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  for (auto id = kFirstCorpusId; id < static_cast<TokenId>(vocab.size()); ++id) {
    out << vocab.token(id) << '\t' << vocab.frequency(id) << '\n';
  }
}

Vocabulary read_vocabulary(std::istream& in) {
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError("vocabulary line " + std::to_string(line_no) + ": expected token<TAB>frequency",
                       line_no);
    }
    std::uint64_t frequency = 0;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(first, last, frequency);
    if (ec != std::errc{} || ptr != last || first == last) {
      throw ParseError("vocabulary line " + std::to_string(line_no) + ": bad frequency", line_no);
    }
    entries.emplace_back(line.substr(0, tab), frequency);
  }
  try {
    return Vocabulary::from_entries(std::move(entries));
  } catch (const InputError& e) {
    throw ParseError(std::string("vocabulary file: ") + e.what());
  }
}

std::vector<TokenId> encode(std::span<const std::string> tokens, const Vocabulary& vocab,
                            std::size_t max_len) {
  if (max_len == 0) throw ConfigError("max_len must be at least 1");
  std::vector<TokenId> ids(max_len, kPadId);
  const std::size_t n = std::min(max_len, tokens.size());
  for (std::size_t i = 0; i < n; ++i) ids[i] = vocab.id_of(tokens[i]);
  return ids;
}

std::vector<std::string> decode(std::span<const TokenId> ids, const Vocabulary& vocab) {
  std::vector<std::string> tokens;
  for (TokenId id : ids) {
    if (id != kPadId) tokens.push_back(vocab.token(id));
  }
  return tokens;
}

std::optional<LabeledExample> make_example(std::string_view text, Polarity label,
                                           const Vocabulary& vocab, std::size_t max_len) {
  const auto tokens = tokenize(text);
  if (tokens.empty()) return std::nullopt;
  return LabeledExample{encode(tokens, vocab, max_len), label};
}

}  // namespace wordcnn
