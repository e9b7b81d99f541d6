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

#include "wordcnn/model.hpp"

#include <algorithm>
#include <cassert>

#include <nlohmann/json.hpp>

#include "wordcnn/errors.hpp"

namespace wordcnn {
namespace {

using nlohmann::json;

std::string trace_text(const ShapeTrace& trace) {
  std::string out;
  for (const auto& entry : trace) {
    if (!out.empty()) out += ", ";
    out += entry.layer + " " + shape_string(entry.shape);
  }
  return out.empty() ? "(empty)" : out;
}

void validate_fields(const ModelConfig& c) {
  if (c.vocab_size < 2) throw ConfigError("vocab_size must include PAD and UNK (>= 2)");
  if (c.max_len == 0) throw ConfigError("max_len must be at least 1");
  if (c.embedding_dim == 0) throw ConfigError("embedding_dim must be at least 1");
  if (c.blocks.empty()) throw ConfigError("a model needs at least one convolution block");
  for (std::size_t i = 0; i < c.blocks.size(); ++i) {
    if (c.blocks[i].region_size == 0 || c.blocks[i].feature_maps == 0) {
      throw ConfigError("block " + std::to_string(i) +
                        ": region_size and feature_maps must be positive");
    }
  }
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (c.num_classes != 2) throw ConfigError("num_classes must be 2");
}

}  // namespace

std::string_view to_string(ModelVariant variant) noexcept {
  switch (variant) {
    case ModelVariant::ModelA:
      return "a";
    case ModelVariant::ModelB:
      return "b";
    case ModelVariant::Custom:
      return "custom";
  }
  return "custom";
}

std::optional<ModelVariant> parse_model_variant(std::string_view name) noexcept {
  if (name == "a") return ModelVariant::ModelA;
  if (name == "b") return ModelVariant::ModelB;
  if (name == "custom") return ModelVariant::Custom;
  return std::nullopt;
}

ModelConfig model_a_config(std::size_t vocab_size, std::size_t embedding_dim,
                           const ModelAOptions& options) {
  ModelConfig c;
  c.variant = ModelVariant::ModelA;
  c.vocab_size = vocab_size;
  c.embedding_dim = embedding_dim;
  c.max_len = options.max_len;
  c.blocks = {{options.region_size, options.feature_maps, options.pool}};
  c.global_pool = true;
  c.dropout = options.dropout;
  c.dense_hidden = 0;
  return c;
}

ModelConfig model_b_config(std::size_t vocab_size, std::size_t embedding_dim,
                           const ModelBOptions& options) {
  ModelConfig c;
  c.variant = ModelVariant::ModelB;
  c.vocab_size = vocab_size;
  c.embedding_dim = embedding_dim;
  c.max_len = options.max_len;
  for (std::size_t pool : options.pools) {
    c.blocks.push_back({options.region_size, options.feature_maps, pool});
  }
  c.global_pool = options.global_last;
  c.dropout = options.dropout;
  c.dense_hidden = options.dense_hidden;
  return c;
}

ShapeTrace shape_trace(const ModelConfig& c) {
  validate_fields(c);
  ShapeTrace trace;
  trace.push_back({"embedding", {c.max_len, c.embedding_dim}});
  std::size_t length = c.max_len;
  std::size_t channels = c.embedding_dim;
  for (std::size_t i = 0; i < c.blocks.size(); ++i) {
    const auto& block = c.blocks[i];
    const auto id = std::to_string(i);
    if (length < block.region_size) {
      throw ShapeError("conv" + id + ": input length " + std::to_string(length) +
                       " is shorter than region size " + std::to_string(block.region_size) +
                       "; trace so far: " + trace_text(trace));
    }
    length = length - block.region_size + 1;
    channels = block.feature_maps;
    trace.push_back({"conv" + id, {length, channels}});
    trace.push_back({"relu" + id, {length, channels}});
    if (block.pool > 0) {
      if (length < block.pool) {
        throw ShapeError("pool" + id + ": input length " + std::to_string(length) +
                         " is shorter than pool size " + std::to_string(block.pool) +
                         "; trace so far: " + trace_text(trace));
      }
      length /= block.pool;
      trace.push_back({"pool" + id, {length, channels}});
    }
  }
  std::size_t features = 0;
  if (c.global_pool) {
    features = channels;
    trace.push_back({"global_pool", {1, features}});
  } else {
    features = length * channels;
    trace.push_back({"flatten", {1, features}});
  }
  trace.push_back({"dropout", {1, features}});
  if (c.dense_hidden > 0) {
    trace.push_back({"dense0", {1, c.dense_hidden}});
    trace.push_back({"relu_dense0", {1, c.dense_hidden}});
  }
  trace.push_back({"output", {1, c.num_classes}});
  return trace;
}

std::vector<std::size_t> sequence_lengths(const ShapeTrace& trace) {
  std::vector<std::size_t> lengths;
  for (const auto& entry : trace) {
    const bool spatial = entry.layer == "embedding" || entry.layer.starts_with("conv") ||
                         entry.layer.starts_with("pool");
    if (spatial) lengths.push_back(entry.shape[0]);
  }
  return lengths;
}

std::string describe_chain(const ShapeTrace& trace) {
  std::string out;
  const auto append = [&](const std::string& item) {
    if (!out.empty()) out += " -> ";
    out += item;
  };
  for (std::size_t len : sequence_lengths(trace)) append(std::to_string(len));
  for (const auto& entry : trace) {
    if (entry.layer == "global_pool" || entry.layer == "flatten") {
      append("vector(" + std::to_string(entry.shape[1]) + ")");
    } else if (entry.layer == "dense0" || entry.layer == "output") {
      append(std::to_string(entry.shape[1]));
    }
  }
  return out;
}

std::string to_canonical_text(const ModelConfig& c) {
  json blocks = json::array();
  for (const auto& b : c.blocks) {
    blocks.push_back(
        {{"region_size", b.region_size}, {"feature_maps", b.feature_maps}, {"pool", b.pool}});
  }
  // nlohmann::json objects are std::map-backed, so dump() is key-sorted.
  const json doc = {{"variant", std::string(to_string(c.variant))},
                    {"vocab_size", c.vocab_size},
                    {"max_len", c.max_len},
                    {"embedding_dim", c.embedding_dim},
                    {"blocks", blocks},
                    {"global_pool", c.global_pool},
                    {"dropout", c.dropout},
                    {"dense_hidden", c.dense_hidden},
                    {"num_classes", c.num_classes},
                    {"embeddings_trainable", c.embeddings_trainable}};
  return doc.dump();
}

ModelConfig model_config_from_text(std::string_view text) {
  try {
    const json doc = json::parse(text);
    ModelConfig c;
    const auto variant = parse_model_variant(doc.at("variant").get<std::string>());
    if (!variant) throw FormatError("unknown model variant in checkpoint");
    c.variant = *variant;
    c.vocab_size = doc.at("vocab_size").get<std::size_t>();
    c.max_len = doc.at("max_len").get<std::size_t>();
    c.embedding_dim = doc.at("embedding_dim").get<std::size_t>();
    for (const auto& b : doc.at("blocks")) {
      c.blocks.push_back({b.at("region_size").get<std::size_t>(),
                          b.at("feature_maps").get<std::size_t>(), b.at("pool").get<std::size_t>()});
    }
    c.global_pool = doc.at("global_pool").get<bool>();
    c.dropout = doc.at("dropout").get<double>();
    c.dense_hidden = doc.at("dense_hidden").get<std::size_t>();
    c.num_classes = doc.at("num_classes").get<std::size_t>();
    c.embeddings_trainable = doc.at("embeddings_trainable").get<bool>();
    return c;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad model config: ") + e.what());
  }
}

// --- Model ------------------------------------------------------------------

template <std::floating_point T>
Model<T>::Model(ModelConfig config, const EmbeddingMatrix* embedding, std::uint64_t seed)
    : config_(std::move(config)) {
  shape_trace(config_);  // validates the chain

  Tensor<T> table({config_.vocab_size, config_.embedding_dim});
  if (embedding != nullptr) {
    if (embedding->rows != config_.vocab_size || embedding->dimension != config_.embedding_dim) {
      throw ConfigError("embedding matrix is " + std::to_string(embedding->rows) + "x" +
                        std::to_string(embedding->dimension) + " but the model expects " +
                        std::to_string(config_.vocab_size) + "x" +
                        std::to_string(config_.embedding_dim));
    }
    std::copy(embedding->values.begin(), embedding->values.end(), table.data().begin());
  } else {
    Rng rng(derive_seed(seed, 2));
    for (std::size_t i = config_.embedding_dim; i < table.size(); ++i) {
      table[i] = static_cast<T>(sample_oov(rng));
    }
  }
  embedding_ = std::make_unique<EmbeddingLayer<T>>("embedding.weight", std::move(table),
                                                   config_.embeddings_trainable);

  Rng rng(seed);
  std::size_t channels = config_.embedding_dim;
  std::size_t length = config_.max_len;
  for (std::size_t i = 0; i < config_.blocks.size(); ++i) {
    const auto& block = config_.blocks[i];
    const auto id = std::to_string(i);
    auto conv = std::make_unique<Conv1dLayer<T>>("conv" + id, channels, block.feature_maps,
                                                 block.region_size);
    conv->initialize(rng);
    layers_.push_back(std::move(conv));
    layers_.push_back(std::make_unique<ReluLayer<T>>("relu" + id));
    length = length - block.region_size + 1;
    channels = block.feature_maps;
    if (block.pool > 0) {
      layers_.push_back(std::make_unique<MaxPoolLayer<T>>("pool" + id, block.pool));
      length /= block.pool;
    }
  }
  std::size_t features = channels;
  if (config_.global_pool) {
    layers_.push_back(std::make_unique<MaxPoolLayer<T>>("global_pool", 0));
  } else {
    layers_.push_back(std::make_unique<FlattenLayer<T>>("flatten"));
    features = length * channels;
  }
  layers_.push_back(std::make_unique<DropoutLayer<T>>("dropout", config_.dropout));
  if (config_.dense_hidden > 0) {
    auto hidden = std::make_unique<DenseLayer<T>>("dense0", features, config_.dense_hidden);
    hidden->initialize(rng);
    layers_.push_back(std::move(hidden));
    layers_.push_back(std::make_unique<ReluLayer<T>>("relu_dense0"));
    features = config_.dense_hidden;
  }
  auto output = std::make_unique<DenseLayer<T>>("output", features, config_.num_classes);
  output->initialize(rng);
  layers_.push_back(std::move(output));

  reseed_dropout(derive_seed(seed, 1));
}

template <std::floating_point T>
Model<T>::Model(const Model& other)
    : config_(other.config_), embedding_(std::make_unique<EmbeddingLayer<T>>(*other.embedding_)) {
  layers_.reserve(other.layers_.size());
  for (const auto& layer : other.layers_) layers_.push_back(layer->clone());
}

template <std::floating_point T>
Model<T>& Model<T>::operator=(const Model& other) {
  if (this != &other) {
    Model copy(other);
    *this = std::move(copy);
  }
  return *this;
}

template <std::floating_point T>
void Model<T>::check_ids(std::span<const TokenId> ids) const {
  if (ids.size() != config_.max_len) {
    throw InputError("model expects " + std::to_string(config_.max_len) + " token ids, got " +
                     std::to_string(ids.size()));
  }
}

template <std::floating_point T>
Tensor<T> Model<T>::forward(std::span<const TokenId> ids, Mode mode) {
  check_ids(ids);
  Tensor<T> x = embedding_->forward(ids);
  for (auto& layer : layers_) {
    x = layer->forward(x, mode);
    assert(x.all_finite() && "non-finite activation");
  }
  return x;
}

template <std::floating_point T>
SoftmaxXent<T> Model<T>::forward_backward(std::span<const TokenId> ids, std::size_t label,
                                          Mode mode) {
  const Tensor<T> logits = forward(ids, mode);
  auto result = softmax_xent(logits.data(), label);
  Tensor<T> grad(logits.shape(), std::vector<T>(result.grad_logits));
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) grad = (*it)->backward(grad);
  embedding_->backward(grad);
  return result;
}

template <std::floating_point T>
T Model<T>::loss(std::span<const TokenId> ids, std::size_t label, Mode mode) {
  const Tensor<T> logits = forward(ids, mode);
  return softmax_xent(logits.data(), label).loss;
}

template <std::floating_point T>
Prediction Model<T>::predict(std::span<const TokenId> ids) {
  const Tensor<T> logits = forward(ids, Mode::Eval);
  const auto result = softmax_xent(logits.data(), 0);
  Prediction p;
  p.probs.assign(result.probs.begin(), result.probs.end());
  for (std::size_t c = 1; c < p.probs.size(); ++c) {
    if (p.probs[c] > p.probs[p.label]) p.label = c;
  }
  return p;
}

template <std::floating_point T>
std::vector<Parameter<T>*> Model<T>::parameters() {
  std::vector<Parameter<T>*> params{&embedding_->parameter()};
  for (auto& layer : layers_) {
    for (auto* p : layer->parameters()) params.push_back(p);
  }
  std::sort(params.begin(), params.end(),
            [](const Parameter<T>* a, const Parameter<T>* b) { return a->name < b->name; });
  return params;
}

template <std::floating_point T>
std::vector<const Parameter<T>*> Model<T>::parameters() const {
  auto params = const_cast<Model*>(this)->parameters();
  return {params.begin(), params.end()};
}

template <std::floating_point T>
Parameter<T>* Model<T>::find_parameter(std::string_view name) {
  for (auto* p : parameters()) {
    if (p->name == name) return p;
  }
  return nullptr;
}

template <std::floating_point T>
void Model<T>::zero_grad() {
  for (auto* p : parameters()) p->grad.fill(T{0});
}

template <std::floating_point T>
void Model<T>::scale_grad(T factor) {
  for (auto* p : parameters()) {
    for (T& g : p->grad.data()) g *= factor;
  }
}

template <std::floating_point T>
void Model<T>::reseed_dropout(std::uint64_t seed) {
  std::uint64_t stream = 0;
  for (auto& layer : layers_) {
    if (auto* d = dynamic_cast<DropoutLayer<T>*>(layer.get())) d->reseed(derive_seed(seed, stream++));
  }
}

template <std::floating_point T>
ShapeTrace Model<T>::forward_shapes(std::span<const TokenId> ids) {
  check_ids(ids);
  ShapeTrace trace;
  Tensor<T> x = embedding_->forward(ids);
  trace.push_back({"embedding", x.shape()});
  for (auto& layer : layers_) {
    x = layer->forward(x, Mode::Eval);
    trace.push_back({layer->name(), x.shape()});
  }
  return trace;
}

template <std::floating_point T>
std::optional<std::string> Model<T>::first_nonfinite_layer(std::span<const TokenId> ids,
                                                           Mode mode) {
  check_ids(ids);
  if (!embedding_->parameter().value.all_finite()) return std::string("embedding");
  Tensor<T> x = embedding_->forward(ids);
  for (auto& layer : layers_) {
    x = layer->forward(x, mode);
    if (!x.all_finite()) return layer->name();
  }
  return std::nullopt;
}

template <std::floating_point T>
void Model<T>::replace_layer(std::size_t i, std::unique_ptr<Layer<T>> layer) {
  layers_.at(i) = std::move(layer);
}

template <std::floating_point To, std::floating_point From>
Model<To> model_cast(const Model<From>& model) {
  Model<To> out(model.config(), nullptr, 0);
  const auto src = model.parameters();
  const auto dst = out.parameters();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i]->value = tensor_cast<To>(src[i]->value);
    dst[i]->trainable = src[i]->trainable;
  }
  return out;
}

template class Model<float>;
template class Model<double>;
template Model<double> model_cast<double, float>(const Model<float>&);
template Model<float> model_cast<float, double>(const Model<double>&);

}  // namespace wordcnn
