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

#include "run_config.hpp"

#include <algorithm>
#include <fstream>

#include "wordcnn/errors.hpp"

namespace wordcnn::cli {
namespace {

using nlohmann::json;

struct ModelDefaults {
  std::size_t region_size;
  std::size_t feature_maps;
  std::vector<std::size_t> pools;
  bool global_pool;
  double dropout;
  std::size_t dense_hidden;
  std::size_t batch_size;
  std::size_t epochs;
};

ModelDefaults defaults_for(ModelVariant variant) {
  if (variant == ModelVariant::ModelB) return {5, 128, {5, 5, 35}, false, 0.5, 128, 128, 2};
  return {2, 300, {2}, true, 0.2, 0, 500, 3};
}

class Fields {
 public:
  explicit Fields(const json& doc) : doc_(doc) {}

  bool has(const char* key) const { return doc_.contains(key); }

  std::string string(const char* key, std::string fallback) const {
    if (!has(key)) return fallback;
    const auto& v = doc_.at(key);
    if (!v.is_string()) throw ConfigError(std::string("config key '") + key + "' must be a string");
    return v.get<std::string>();
  }

  std::size_t count(const char* key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    return as_count(doc_.at(key), key);
  }

  std::uint64_t u64(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = doc_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  double real(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = doc_.at(key);
    if (!v.is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
    return v.get<double>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = doc_.at(key);
    if (!v.is_boolean()) throw ConfigError(std::string("config key '") + key + "' must be true or false");
    return v.get<bool>();
  }

  std::vector<std::size_t> counts(const char* key, std::vector<std::size_t> fallback) const {
    if (!has(key)) return fallback;
    const auto& v = doc_.at(key);
    if (!v.is_array()) throw ConfigError(std::string("config key '") + key + "' must be an array");
    std::vector<std::size_t> out;
    for (const auto& item : v) out.push_back(as_count(item, key));
    return out;
  }

 private:
  static std::size_t as_count(const json& v, const char* key) {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::size_t>();
    throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
  }

  const json& doc_;
};

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "model",          "data",          "vocab",          "vocab_capacity",
      "max_len",        "embeddings",    "embeddings_path", "embedding_dim",
      "embeddings_trainable", "region_size", "feature_maps", "pools",
      "global_pool",    "dropout",       "dense_hidden",   "batch_size",
      "epochs",         "optimizer",     "learning_rate",  "beta1",
      "beta2",          "rho",           "epsilon",        "seed",
      "eval_every",     "split",         "train_fraction", "train_count",
      "validation_count", "test_count",  "folds",          "stratified",
      "region_sizes",   "checkpoint",    "run_log"};
  return keys;
}

std::string_view to_string(EmbeddingSource source) noexcept {
  switch (source) {
    case EmbeddingSource::Random:
      return "random";
    case EmbeddingSource::GloveText:
      return "glove_text";
    case EmbeddingSource::Word2VecBinary:
      return "word2vec_binary";
    case EmbeddingSource::FastTextText:
      return "fasttext_text";
  }
  return "random";
}

std::pair<std::string, json> parse_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(text) + "' is not of the form key=value");
  }
  const std::string key(text.substr(0, eq));
  const std::string raw(text.substr(eq + 1));
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  return {key, value};
}

json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ConfigError("config file " + path.string() + " is not a JSON object");
  }
  return doc;
}

RunConfig resolve_config(json doc, const std::vector<std::pair<std::string, json>>& overrides) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : overrides) doc[key] = value;

  const auto& keys = known_keys();
  std::vector<std::string> unknown;
  for (const auto& item : doc.items()) {
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) unknown.push_back(item.key());
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError("unknown config key(s): " + list);
  }

  const Fields f(doc);
  RunConfig rc;
  const auto variant = parse_model_variant(f.string("model", "a"));
  if (!variant || *variant == ModelVariant::Custom) throw ConfigError("config key 'model' must be \"a\" or \"b\"");
  rc.model = *variant;
  const ModelDefaults d = defaults_for(rc.model);

  rc.data = f.string("data", "");
  rc.vocab = f.string("vocab", "");
  rc.vocab_capacity = f.count("vocab_capacity", 100000);
  rc.max_len = f.count("max_len", 1000);

  const std::string source = f.string("embeddings", "random");
  if (source == "random") {
    rc.embeddings = EmbeddingSource::Random;
  } else if (source == "glove_text") {
    rc.embeddings = EmbeddingSource::GloveText;
  } else if (source == "word2vec_binary") {
    rc.embeddings = EmbeddingSource::Word2VecBinary;
  } else if (source == "fasttext_text") {
    rc.embeddings = EmbeddingSource::FastTextText;
  } else {
    throw ConfigError("config key 'embeddings' must be one of random, glove_text, "
                      "word2vec_binary, fasttext_text");
  }
  rc.embeddings_path = f.string("embeddings_path", "");
  if (rc.embeddings != EmbeddingSource::Random && rc.embeddings_path.empty()) {
    throw ConfigError("embeddings '" + source + "' needs 'embeddings_path'");
  }
  if (f.has("embedding_dim")) rc.embedding_dim = f.count("embedding_dim", 100);
  rc.embeddings_trainable = f.boolean("embeddings_trainable", true);

  rc.region_size = f.count("region_size", d.region_size);
  rc.feature_maps = f.count("feature_maps", d.feature_maps);
  rc.pools = f.counts("pools", d.pools);
  if (rc.model == ModelVariant::ModelA && rc.pools.size() != 1) {
    throw ConfigError("model a takes exactly one pool size");
  }
  if (rc.pools.empty()) throw ConfigError("'pools' must list one pool size per block");
  rc.global_pool = f.boolean("global_pool", d.global_pool);
  rc.dropout = f.real("dropout", d.dropout);
  rc.dense_hidden = f.count("dense_hidden", d.dense_hidden);

  rc.train.batch_size = f.count("batch_size", d.batch_size);
  rc.train.epochs = f.count("epochs", d.epochs);
  const auto kind = parse_optimizer_kind(f.string("optimizer", "nadam"));
  if (!kind) throw ConfigError("config key 'optimizer' must be sgd, rmsprop or nadam");
  OptimizerConfig opt = OptimizerConfig::defaults(*kind);
  opt.learning_rate = f.real("learning_rate", opt.learning_rate);
  rc.learning_rate_explicit = f.has("learning_rate");
  opt.beta1 = f.real("beta1", opt.beta1);
  opt.beta2 = f.real("beta2", opt.beta2);
  opt.rho = f.real("rho", opt.rho);
  opt.epsilon = f.real("epsilon", opt.epsilon);
  rc.train.optimizer = opt;
  rc.train.seed = f.u64("seed", 0);
  rc.train.eval_every = f.count("eval_every", 0);
  rc.train.validate();

  const std::string split = f.string("split", "none");
  rc.split_plan.seed = rc.train.seed;
  if (split == "none") {
    rc.split = SplitKind::None;
  } else if (split == "fraction") {
    rc.split = SplitKind::Fraction;
    rc.split_plan.mode = SplitMode::FractionSplit;
    rc.split_plan.train_fraction = f.real("train_fraction", 0.8);
    if (!(rc.split_plan.train_fraction > 0.0 && rc.split_plan.train_fraction < 1.0)) {
      throw ConfigError("'train_fraction' must lie in (0, 1)");
    }
    rc.split_plan.validation_count = f.count("validation_count", 0);
  } else if (split == "fixed") {
    rc.split = SplitKind::Fixed;
    rc.split_plan.mode = SplitMode::FixedCounts;
    rc.split_plan.train_count = f.count("train_count", 0);
    rc.split_plan.validation_count = f.count("validation_count", 0);
    rc.split_plan.test_count = f.count("test_count", 0);
    if (rc.split_plan.train_count == 0) throw ConfigError("split 'fixed' needs 'train_count'");
  } else {
    throw ConfigError("config key 'split' must be none, fraction or fixed");
  }

  rc.folds.k = f.count("folds", 3);
  rc.folds.seed = rc.train.seed;
  rc.folds.stratified = f.boolean("stratified", true);
  rc.region_sizes = f.counts("region_sizes", {2, 3, 5});
  rc.checkpoint = f.string("checkpoint", "");
  rc.run_log = f.string("run_log", "");

  if (!(rc.dropout >= 0.0 && rc.dropout < 1.0)) throw ConfigError("'dropout' must lie in [0, 1)");
  if (rc.max_len == 0) throw ConfigError("'max_len' must be at least 1");
  if (rc.vocab_capacity == 0) throw ConfigError("'vocab_capacity' must be at least 1");

  json eff = {
      {"model", std::string(wordcnn::to_string(rc.model))},
      {"data", rc.data.string()},
      {"vocab", rc.vocab.string()},
      {"vocab_capacity", rc.vocab_capacity},
      {"max_len", rc.max_len},
      {"embeddings", std::string(to_string(rc.embeddings))},
      {"embeddings_path", rc.embeddings_path.string()},
      {"embeddings_trainable", rc.embeddings_trainable},
      {"region_size", rc.region_size},
      {"feature_maps", rc.feature_maps},
      {"pools", rc.pools},
      {"global_pool", rc.global_pool},
      {"dropout", rc.dropout},
      {"dense_hidden", rc.dense_hidden},
      {"batch_size", rc.train.batch_size},
      {"epochs", rc.train.epochs},
      {"optimizer", std::string(wordcnn::to_string(opt.kind))},
      {"learning_rate", opt.learning_rate},
      {"beta1", opt.beta1},
      {"beta2", opt.beta2},
      {"rho", opt.rho},
      {"epsilon", opt.epsilon},
      {"seed", rc.train.seed},
      {"eval_every", rc.train.eval_every},
      {"split", split},
      {"train_fraction", rc.split_plan.train_fraction},
      {"train_count", rc.split_plan.train_count},
      {"validation_count", rc.split_plan.validation_count},
      {"test_count", rc.split_plan.test_count},
      {"folds", rc.folds.k},
      {"stratified", rc.folds.stratified},
      {"region_sizes", rc.region_sizes},
      {"checkpoint", rc.checkpoint.string()},
      {"run_log", rc.run_log.string()},
  };
  if (rc.embedding_dim) eff["embedding_dim"] = *rc.embedding_dim;
  rc.effective = std::move(eff);
  return rc;
}

}  // namespace wordcnn::cli
