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

#ifndef WORDCNN_CORPUS_HPP_
#define WORDCNN_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace wordcnn {

/// Binary sentiment label. The integer codes are part of the checkpoint and
/// TSV formats and must not change.
enum class Polarity : std::uint8_t { Negative = 0, Positive = 1 };

inline constexpr int polarity_index(Polarity p) noexcept { return static_cast<int>(p); }

/// One record of a `review.json`-style dump.
struct Review {
  std::string review_id;  // empty when the record carries none
  std::string business_id;
  int stars = 0;  // 1..5
  std::string text;
};

struct IngestStats {
  std::size_t lines = 0;
  std::size_t yielded = 0;
  std::size_t malformed = 0;
  std::size_t filtered = 0;  // valid, but business not in the allowlist
};

using BusinessSet = std::unordered_set<std::string>;

/// Streams reviews out of a JSON-lines source, one `next()` call at a time.
/// Malformed lines never abort the stream; they only bump `stats().malformed`.
/// A line is malformed when it is not a JSON object, lacks `stars`, `text`
/// or `business_id`, has non-integral or out-of-range stars, or has text that
/// is empty after trimming whitespace.
///
/// Invariant: lines == yielded + malformed + filtered once the stream is
/// exhausted.
class ReviewReader {
 public:
  /// `allowlist` may be null (no filtering). The stream and allowlist must
  /// outlive the reader.
  explicit ReviewReader(std::istream& in, const BusinessSet* allowlist = nullptr);

  std::optional<Review> next();
  const IngestStats& stats() const noexcept { return stats_; }

 private:
  std::istream* in_;
  const BusinessSet* allowlist_;
  IngestStats stats_;
  std::string line_;
};

/// Parses a single review line. Returns nothing for malformed input.
std::optional<Review> parse_review(std::string_view line);

struct AllowlistResult {
  BusinessSet business_ids;
  std::size_t lines = 0;
  std::size_t malformed = 0;
};

/// Ids of businesses whose `city` matches one of `cities`, compared after
/// trimming whitespace and ASCII-lowercasing both sides.
AllowlistResult build_city_allowlist(std::istream& business_stream,
                                     std::span<const std::string> cities);

/// 1,2 -> Negative; 4,5 -> Positive; 3 -> nothing. Throws InputError
/// outside 1..5.
std::optional<Polarity> map_label(int stars);

enum class SplitMode { FractionSplit, FixedCounts };

/// How to cut a corpus into train/validation/test.
///
/// FractionSplit: after a seeded shuffle, the first floor(train_fraction*n)
/// indices are train, the next `validation_count` validation, the rest test.
/// FixedCounts: after a seeded shuffle, validation takes the first
/// `validation_count`, test the next `test_count`, and train the next
/// `train_count`; anything left over is unused.
struct SplitPlan {
  SplitMode mode = SplitMode::FractionSplit;
  double train_fraction = 0.8;
  std::size_t train_count = 0;
  std::size_t validation_count = 0;
  std::size_t test_count = 0;
  std::uint64_t seed = 0;
};

/// Index sets, each sorted ascending and pairwise disjoint.
struct SplitResult {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Throws ConfigError when the plan does not fit a corpus of `size`.
SplitResult split(std::size_t size, const SplitPlan& plan);

struct FoldPlan {
  std::size_t k = 3;
  std::uint64_t seed = 0;
  bool stratified = true;
};

/// Partitions [0, labels.size()) into k folds (each sorted ascending). Fold
/// sizes differ by at most one; when stratified, so do per-class counts.
/// Throws ConfigError if k < 2 or k > n.
std::vector<std::vector<std::size_t>> make_folds(std::span<const Polarity> labels,
                                                 const FoldPlan& plan);

/// Seeded shuffle of `indices` chunked into consecutive batches; the last
/// batch may be short. Throws ConfigError if batch_size == 0.
std::vector<std::vector<std::size_t>> batches(std::span<const std::size_t> indices,
                                              std::size_t batch_size, std::uint64_t epoch_seed);

// --- Materialized dataset (TSV) ---------------------------------------------

/// One line of the prepared dataset: `<label>\t<stars>\t<text>`.
struct TsvRecord {
  Polarity label = Polarity::Negative;
  int stars = 0;
  std::string text;
};

/// Replaces every tab, CR and LF with a single space.
std::string sanitize_tsv_text(std::string_view text);

void write_tsv_record(std::ostream& out, const TsvRecord& record);

struct TsvReadResult {
  std::vector<TsvRecord> records;
  std::size_t malformed = 0;
};

/// Reads a prepared dataset. Lines that do not have the three fields, a 0/1
/// label and a 1..5 star value are counted and skipped.
TsvReadResult read_tsv(std::istream& in);

}  // namespace wordcnn

#endif  // WORDCNN_CORPUS_HPP_
