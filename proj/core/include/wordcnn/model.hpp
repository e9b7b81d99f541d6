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

#ifndef WORDCNN_MODEL_HPP_
#define WORDCNN_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wordcnn/embed.hpp"
#include "wordcnn/layers.hpp"
#include "wordcnn/text.hpp"

namespace wordcnn {

enum class ModelVariant { ModelA, ModelB, Custom };

std::string_view to_string(ModelVariant variant) noexcept;
/// "a", "b", "custom".
std::optional<ModelVariant> parse_model_variant(std::string_view name) noexcept;

/// Conv -> ReLU -> MaxPool(pool). pool == 0 leaves the pooling out.
struct ConvBlock {
  std::size_t region_size = 2;
  std::size_t feature_maps = 300;
  std::size_t pool = 0;

  bool operator==(const ConvBlock&) const = default;
};

/// Architecture description. The layer chain is
///
///   Embedding(V x D)
///   -> for each block: Conv1d(k) -> ReLU -> [MaxPool(pool)]
///   -> GlobalMaxPool (global_pool) or Flatten
///   -> Dropout(p)
///   -> [Dense(dense_hidden) -> ReLU]
///   -> Dense(num_classes)
///
/// followed by softmax cross-entropy.
struct ModelConfig {
  ModelVariant variant = ModelVariant::Custom;
  std::size_t vocab_size = 2;
  std::size_t max_len = 1000;
  std::size_t embedding_dim = 100;
  std::vector<ConvBlock> blocks;
  bool global_pool = true;
  double dropout = 0.0;
  std::size_t dense_hidden = 0;
  std::size_t num_classes = 2;
  bool embeddings_trainable = true;

  bool operator==(const ModelConfig&) const = default;
};

/// Single-region model: one conv block of `feature_maps` filters with a
/// MaxPool(pool) and a global max-pool to a fixed-length vector. pool = 0
/// gives the pure global-max-pool reading.
struct ModelAOptions {
  std::size_t region_size = 2;
  std::size_t feature_maps = 300;
  std::size_t pool = 2;
  double dropout = 0.2;
  std::size_t max_len = 1000;
};

/// Three stacked conv-pool blocks. With max_len 1000, k 5 and pools
/// 5/5/35 the sequence shrinks 1000 -> 996 -> 199 -> 195 -> 39 -> 35 -> 1.
/// A pool of 0 on the last block together with global_last gives a global
/// max-pool, which is how shorter desk-scale sequences are configured.
struct ModelBOptions {
  std::size_t region_size = 5;
  std::size_t feature_maps = 128;
  std::vector<std::size_t> pools{5, 5, 35};
  bool global_last = false;
  double dropout = 0.5;
  std::size_t dense_hidden = 128;
  std::size_t max_len = 1000;
};

ModelConfig model_a_config(std::size_t vocab_size, std::size_t embedding_dim,
                           const ModelAOptions& options = {});
ModelConfig model_b_config(std::size_t vocab_size, std::size_t embedding_dim,
                           const ModelBOptions& options = {});

struct TraceEntry {
  std::string layer;
  Shape shape;
};
using ShapeTrace = std::vector<TraceEntry>;

/// Output shape of every layer, computed without allocating parameters.
/// Throws ConfigError for invalid fields and ShapeError at the first
/// inconsistent transition (the message includes the trace so far).
ShapeTrace shape_trace(const ModelConfig& config);

/// Human-readable chain, e.g. "1000 -> 999 -> 499 -> vector(300) -> 2":
/// sequence lengths through the conv/pool stack, then feature-vector widths.
std::string describe_chain(const ShapeTrace& trace);

/// Sequence lengths after the embedding, each conv and each pool.
std::vector<std::size_t> sequence_lengths(const ShapeTrace& trace);

/// Canonical key-sorted compact JSON used inside checkpoints.
std::string to_canonical_text(const ModelConfig& config);
/// Throws FormatError on bad text.
ModelConfig model_config_from_text(std::string_view text);

struct Prediction {
  std::size_t label = 0;  // argmax, ties to the lower class
  std::vector<double> probs;
};

/// A single-example convolutional classifier. One instance is
/// single-writer: forward caches feed the next backward.
template <std::floating_point T>
class Model {
 public:
  /// Initializes conv and dense weights (Glorot uniform, zero bias) from a
  /// generator seeded with `seed`, layer by layer in chain order. When
  /// `embedding` is null the table is random: PAD zero, every other row from
  /// sample_oov.
  Model(ModelConfig config, const EmbeddingMatrix* embedding, std::uint64_t seed);

  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;
  ~Model() = default;

  const ModelConfig& config() const noexcept { return config_; }

  /// Logits (1 x num_classes). `ids` must have exactly max_len entries.
  Tensor<T> forward(std::span<const TokenId> ids, Mode mode);

  /// Forward, softmax cross-entropy and backward. Parameter gradients are
  /// added to what is already accumulated.
  SoftmaxXent<T> forward_backward(std::span<const TokenId> ids, std::size_t label, Mode mode);

  /// Loss only.
  T loss(std::span<const TokenId> ids, std::size_t label, Mode mode);

  Prediction predict(std::span<const TokenId> ids);

  /// All parameters (embedding included), sorted by name.
  std::vector<Parameter<T>*> parameters();
  std::vector<const Parameter<T>*> parameters() const;
  Parameter<T>* find_parameter(std::string_view name);

  void zero_grad();
  void scale_grad(T factor);

  /// Re-seeds every dropout layer's mask generator.
  void reseed_dropout(std::uint64_t seed);

  /// Output shape of each layer on a real forward pass, in trace order.
  ShapeTrace forward_shapes(std::span<const TokenId> ids);

  /// Name of the first layer whose output is not finite, if any.
  std::optional<std::string> first_nonfinite_layer(std::span<const TokenId> ids, Mode mode);

  std::size_t layer_count() const noexcept { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_.at(i); }
  /// Swaps in a different layer implementation (used to inject faults in
  /// verification tests).
  void replace_layer(std::size_t i, std::unique_ptr<Layer<T>> layer);

 private:
  void check_ids(std::span<const TokenId> ids) const;

  ModelConfig config_;
  std::unique_ptr<EmbeddingLayer<T>> embedding_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

template <std::floating_point To, std::floating_point From>
Model<To> model_cast(const Model<From>& model);

}  // namespace wordcnn

#endif  // WORDCNN_MODEL_HPP_
