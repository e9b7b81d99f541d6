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

#include "wordcnn/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "strings.hpp"
#include "wordcnn/errors.hpp"
#include "wordcnn/rng.hpp"

namespace wordcnn {
namespace {

using nlohmann::json;

std::optional<int> integral_stars(const json& value) {
  if (value.is_number_integer()) {
    const auto v = value.get<std::int64_t>();
    if (v < 1 || v > 5) return std::nullopt;
    return static_cast<int>(v);
  }
  if (value.is_number_float()) {
    const double v = value.get<double>();
    if (!std::isfinite(v) || v != std::floor(v) || v < 1 || v > 5) return std::nullopt;
    return static_cast<int>(v);
  }
  return std::nullopt;
}

std::vector<std::size_t> iota_shuffled(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  shuffle(std::span<std::size_t>(order), rng);
  return order;
}

std::vector<std::size_t> sorted_slice(const std::vector<std::size_t>& order, std::size_t begin,
                                      std::size_t count) {
  std::vector<std::size_t> out(order.begin() + static_cast<std::ptrdiff_t>(begin),
                               order.begin() + static_cast<std::ptrdiff_t>(begin + count));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::optional<Review> parse_review(std::string_view line) {
  json doc = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;

  const auto stars_it = doc.find("stars");
  const auto text_it = doc.find("text");
  const auto business_it = doc.find("business_id");
  if (stars_it == doc.end() || text_it == doc.end() || business_it == doc.end()) {
    return std::nullopt;
  }
  if (!text_it->is_string() || !business_it->is_string()) return std::nullopt;

  const auto stars = integral_stars(*stars_it);
  if (!stars) return std::nullopt;

  Review review;
  review.stars = *stars;
  review.text = text_it->get<std::string>();
  if (detail::trim(review.text).empty()) return std::nullopt;
  review.business_id = business_it->get<std::string>();
  if (const auto id = doc.find("review_id"); id != doc.end() && id->is_string()) {
    review.review_id = id->get<std::string>();
  }
  return review;
}

ReviewReader::ReviewReader(std::istream& in, const BusinessSet* allowlist)
    : in_(&in), allowlist_(allowlist) {}

std::optional<Review> ReviewReader::next() {
  while (std::getline(*in_, line_)) {
    ++stats_.lines;
    detail::strip_cr(line_);
    auto review = parse_review(line_);
    if (!review) {
      ++stats_.malformed;
      continue;
    }
    if (allowlist_ != nullptr && !allowlist_->contains(review->business_id)) {
      ++stats_.filtered;
      continue;
    }
    ++stats_.yielded;
    return review;
  }
  return std::nullopt;
}

AllowlistResult build_city_allowlist(std::istream& business_stream,
                                     std::span<const std::string> cities) {
  std::unordered_set<std::string> wanted;
  for (const auto& city : cities) wanted.insert(detail::ascii_lower(detail::trim(city)));

  AllowlistResult result;
  std::string line;
  while (std::getline(business_stream, line)) {
    ++result.lines;
    detail::strip_cr(line);
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      ++result.malformed;
      continue;
    }
    const auto id = doc.find("business_id");
    const auto city = doc.find("city");
    if (id == doc.end() || city == doc.end() || !id->is_string() || !city->is_string()) {
      ++result.malformed;
      continue;
    }
    const auto normalized = detail::ascii_lower(detail::trim(city->get_ref<const std::string&>()));
    if (wanted.contains(normalized)) result.business_ids.insert(id->get<std::string>());
  }
  return result;
}

std::optional<Polarity> map_label(int stars) {
  switch (stars) {
    case 1:
    case 2:
      return Polarity::Negative;
    case 3:
      return std::nullopt;
    case 4:
    case 5:
      return Polarity::Positive;
    default:
      throw InputError("star rating must be in 1..5, got " + std::to_string(stars));
  }
}

SplitResult split(std::size_t size, const SplitPlan& plan) {
  SplitResult result;
  const auto order = iota_shuffled(size, plan.seed);
  if (plan.mode == SplitMode::FractionSplit) {
    if (!(plan.train_fraction > 0.0 && plan.train_fraction < 1.0)) {
      throw ConfigError("train_fraction must lie in (0, 1)");
    }
    // The epsilon keeps 0.8 * 10 from landing on 7.999...
    const auto n_train = static_cast<std::size_t>(
        std::floor(plan.train_fraction * static_cast<double>(size) + 1e-9));
    if (plan.validation_count > size - n_train) {
      throw ConfigError("validation_count " + std::to_string(plan.validation_count) +
                        " exceeds the " + std::to_string(size - n_train) +
                        " examples left after the train fraction");
    }
    const std::size_t n_test = size - n_train - plan.validation_count;
    result.train = sorted_slice(order, 0, n_train);
    result.validation = sorted_slice(order, n_train, plan.validation_count);
    result.test = sorted_slice(order, n_train + plan.validation_count, n_test);
    return result;
  }

  const std::size_t total = plan.train_count + plan.validation_count + plan.test_count;
  if (total > size) {
    throw ConfigError("split counts " + std::to_string(plan.train_count) + "/" +
                      std::to_string(plan.validation_count) + "/" +
                      std::to_string(plan.test_count) + " exceed corpus size " +
                      std::to_string(size));
  }
  result.validation = sorted_slice(order, 0, plan.validation_count);
  result.test = sorted_slice(order, plan.validation_count, plan.test_count);
  result.train = sorted_slice(order, plan.validation_count + plan.test_count, plan.train_count);
  return result;
}

std::vector<std::vector<std::size_t>> make_folds(std::span<const Polarity> labels,
                                                 const FoldPlan& plan) {
  const std::size_t n = labels.size();
  if (plan.k < 2) throw ConfigError("fold count must be at least 2");
  if (plan.k > n) {
    throw ConfigError("cannot make " + std::to_string(plan.k) + " folds from " +
                      std::to_string(n) + " examples");
  }
  auto order = iota_shuffled(n, plan.seed);
  if (plan.stratified) {
    // Group by class, keeping the shuffled order inside each class. Dealing
    // the concatenation round-robin balances both fold sizes and per-class
    // counts to within one.
    std::stable_partition(order.begin(), order.end(),
                          [&](std::size_t i) { return labels[i] == Polarity::Negative; });
  }
  std::vector<std::vector<std::size_t>> folds(plan.k);
  for (std::size_t pos = 0; pos < n; ++pos) folds[pos % plan.k].push_back(order[pos]);
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

std::vector<std::vector<std::size_t>> batches(std::span<const std::size_t> indices,
                                              std::size_t batch_size, std::uint64_t epoch_seed) {
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  std::vector<std::size_t> order(indices.begin(), indices.end());
  Rng rng(epoch_seed);
  shuffle(std::span<std::size_t>(order), rng);

  std::vector<std::vector<std::size_t>> out;
  out.reserve((order.size() + batch_size - 1) / batch_size);
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::size_t end = std::min(order.size(), begin + batch_size);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(begin),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

std::string sanitize_tsv_text(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

void write_tsv_record(std::ostream& out, const TsvRecord& record) {
  out << polarity_index(record.label) << '\t' << record.stars << '\t'
      << sanitize_tsv_text(record.text) << '\n';
}

TsvReadResult read_tsv(std::istream& in) {
  TsvReadResult result;
  std::string line;
  while (std::getline(in, line)) {
    detail::strip_cr(line);
    const auto first = line.find('\t');
    const auto second = first == std::string::npos ? first : line.find('\t', first + 1);
    if (second == std::string::npos) {
      ++result.malformed;
      continue;
    }
    const std::string_view view(line);
    const auto label_field = view.substr(0, first);
    const auto stars_field = view.substr(first + 1, second - first - 1);
    int stars = 0;
    const auto [ptr, ec] =
        std::from_chars(stars_field.data(), stars_field.data() + stars_field.size(), stars);
    const bool stars_ok = ec == std::errc{} && ptr == stars_field.data() + stars_field.size() &&
                          stars >= 1 && stars <= 5;
    if (!stars_ok || (label_field != "0" && label_field != "1")) {
      ++result.malformed;
      continue;
    }
    TsvRecord record;
    record.label = label_field == "1" ? Polarity::Positive : Polarity::Negative;
    record.stars = stars;
    record.text = std::string(view.substr(second + 1));
    result.records.push_back(std::move(record));
  }
  return result;
}

}  // namespace wordcnn
