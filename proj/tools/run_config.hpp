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

#ifndef WORDCNN_TOOLS_RUN_CONFIG_HPP_
#define WORDCNN_TOOLS_RUN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wordcnn/corpus.hpp"
#include "wordcnn/embed.hpp"
#include "wordcnn/model.hpp"
#include "wordcnn/train.hpp"

namespace wordcnn::cli {

enum class EmbeddingSource { Random, GloveText, Word2VecBinary, FastTextText };

enum class SplitKind { None, Fraction, Fixed };

/// Everything a train/cv/sweep/compare run needs. Built from a flat JSON
/// object; unset architecture and regime keys take the defaults of the
/// chosen model (see README for the table).
struct RunConfig {
  ModelVariant model = ModelVariant::ModelA;
  std::filesystem::path data;
  std::filesystem::path vocab;  // empty: build from the training split
  std::size_t vocab_capacity = 100000;
  std::size_t max_len = 1000;

  EmbeddingSource embeddings = EmbeddingSource::Random;
  std::filesystem::path embeddings_path;
  std::optional<std::size_t> embedding_dim;  // unset: from the vector file, else 100
  bool embeddings_trainable = true;

  std::size_t region_size = 0;
  std::size_t feature_maps = 0;
  std::vector<std::size_t> pools;
  bool global_pool = true;
  double dropout = 0.0;
  std::size_t dense_hidden = 0;

  TrainConfig train;
  bool learning_rate_explicit = false;  // set when the config names learning_rate

  SplitKind split = SplitKind::None;
  SplitPlan split_plan;

  FoldPlan folds;
  std::vector<std::size_t> region_sizes{2, 3, 5};

  std::filesystem::path checkpoint;
  std::filesystem::path run_log;

  /// The effective configuration with every default filled in.
  nlohmann::json effective;
};

/// Every accepted key.
const std::vector<std::string>& known_keys();

/// Parses `key=value`; the value is read as JSON when it parses, otherwise
/// as a string. Throws ConfigError on a missing '='.
std::pair<std::string, nlohmann::json> parse_override(std::string_view text);

/// Merges overrides into `doc`, rejects unknown keys (listing all of them),
/// fills model defaults and checks types and ranges. Throws ConfigError.
RunConfig resolve_config(nlohmann::json doc,
                         const std::vector<std::pair<std::string, nlohmann::json>>& overrides);

/// Reads a JSON config file. Throws ConfigError on unreadable or invalid JSON.
nlohmann::json read_config_file(const std::filesystem::path& path);

std::string_view to_string(EmbeddingSource source) noexcept;

}  // namespace wordcnn::cli

#endif  // WORDCNN_TOOLS_RUN_CONFIG_HPP_
