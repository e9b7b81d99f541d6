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

#ifndef WORDCNN_LAYERS_HPP_
#define WORDCNN_LAYERS_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wordcnn/rng.hpp"
#include "wordcnn/tensor.hpp"
#include "wordcnn/text.hpp"

namespace wordcnn {

enum class Mode { Train, Eval };

// ---------------------------------------------------------------------------
// Stateless operations. Sequences are rank-2 tensors: rows are positions,
// columns are channels.
// ---------------------------------------------------------------------------

/// Valid 1-D convolution. input is T x D, filters F x k x D, bias F; the
/// result is (T-k+1) x F with
///   out[t,f] = bias[f] + sum_{j<k} sum_{d<D} input[t+j,d] * filters[f,j,d]
/// The double sum is accumulated from zero with j outer and d inner, then
/// added to the bias. That order is part of the contract.
template <std::floating_point T>
Tensor<T> conv1d_forward(const Tensor<T>& input, const Tensor<T>& filters, const Tensor<T>& bias);

/// Backward of conv1d_forward. Adds the filter and bias gradients into
/// `grad_filters` / `grad_bias` and returns the input gradient.
template <std::floating_point T>
Tensor<T> conv1d_backward(const Tensor<T>& grad_out, const Tensor<T>& input,
                          const Tensor<T>& filters, Tensor<T>& grad_filters, Tensor<T>& grad_bias);

template <std::floating_point T>
struct Conv1dGradients {
  Tensor<T> input;
  Tensor<T> filters;
  Tensor<T> bias;
};

/// Convenience form returning fresh gradients.
template <std::floating_point T>
Conv1dGradients<T> conv1d_backward(const Tensor<T>& grad_out, const Tensor<T>& input,
                                   const Tensor<T>& filters);

template <std::floating_point T>
Tensor<T> relu(const Tensor<T>& x);

/// Passes `grad` where x > 0; the gradient at exactly 0 is 0.
template <std::floating_point T>
Tensor<T> relu_backward(const Tensor<T>& grad, const Tensor<T>& x);

template <std::floating_point T>
struct PoolResult {
  Tensor<T> output;
  std::vector<std::size_t> argmax;  // input row of each output element
  std::size_t input_rows = 0;
};

/// Non-overlapping max pooling along rows (stride = pool). A trailing
/// remainder shorter than `pool` is dropped. Ties go to the lowest row.
template <std::floating_point T>
PoolResult<T> maxpool1d(const Tensor<T>& input, std::size_t pool);

/// Per-column maximum over all rows; the output is 1 x F.
template <std::floating_point T>
PoolResult<T> global_maxpool(const Tensor<T>& input);

/// Routes each output gradient to its argmax row.
template <std::floating_point T>
Tensor<T> maxpool1d_backward(const Tensor<T>& grad_out, const PoolResult<T>& cache);

template <std::floating_point T>
struct DropoutResult {
  Tensor<T> output;
  std::vector<T> mask;  // 0 or 1/(1-p); empty when the op was the identity
};

/// Inverted dropout. Eval mode and p == 0 are the identity and draw nothing
/// from `rng`. Throws ConfigError unless 0 <= p < 1.
template <std::floating_point T>
DropoutResult<T> dropout(const Tensor<T>& x, double p, Mode mode, Rng& rng);

template <std::floating_point T>
Tensor<T> dropout_backward(const Tensor<T>& grad, std::span<const T> mask);

/// y = x W + b for x with F elements (any shape), W F x C, b C. Returns 1 x C.
template <std::floating_point T>
Tensor<T> dense_forward(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

/// Accumulates weight/bias gradients and returns dL/dx shaped like x.
template <std::floating_point T>
Tensor<T> dense_backward(const Tensor<T>& grad_out, const Tensor<T>& x, const Tensor<T>& weight,
                         Tensor<T>& grad_weight, Tensor<T>& grad_bias);

template <std::floating_point T>
struct SoftmaxXent {
  T loss;
  std::vector<T> probs;
  std::vector<T> grad_logits;
};

/// Numerically stable softmax + categorical cross-entropy. Throws
/// InputError if label >= logits.size() or fewer than two classes.
template <std::floating_point T>
SoftmaxXent<T> softmax_xent(std::span<const T> logits, std::size_t label);

/// Glorot/Xavier uniform: U(-a, a), a = sqrt(6 / (fan_in + fan_out)).
template <std::floating_point T>
void glorot_uniform(Tensor<T>& weight, std::size_t fan_in, std::size_t fan_out, Rng& rng);

// ---------------------------------------------------------------------------
// Layers. Each caches what its backward needs; a cache is valid between one
// forward and the matching backward.
// ---------------------------------------------------------------------------

template <std::floating_point T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
  bool trainable = true;
};

template <std::floating_point T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string name() const = 0;
  virtual std::unique_ptr<Layer> clone() const = 0;
  virtual Tensor<T> forward(const Tensor<T>& x, Mode mode) = 0;
  virtual Tensor<T> backward(const Tensor<T>& grad) = 0;
  virtual std::vector<Parameter<T>*> parameters() { return {}; }
};

template <std::floating_point T>
class Conv1dLayer : public Layer<T> {
 public:
  Conv1dLayer(std::string name, std::size_t in_channels, std::size_t feature_maps,
              std::size_t region_size);

  std::string name() const override { return name_; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Conv1dLayer>(*this); }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad) override;
  std::vector<Parameter<T>*> parameters() override { return {&weight_, &bias_}; }

  void initialize(Rng& rng);
  std::size_t region_size() const noexcept { return weight_.value.dim(1); }

 private:
  std::string name_;
  Parameter<T> weight_;  // F x k x D
  Parameter<T> bias_;    // F
  Tensor<T> input_;
};

template <std::floating_point T>
class ReluLayer : public Layer<T> {
 public:
  explicit ReluLayer(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return name_; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<ReluLayer>(*this); }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad) override;

 private:
  std::string name_;
  Tensor<T> input_;
};

/// Windowed max pooling; pool == 0 means global (one window over all rows).
template <std::floating_point T>
class MaxPoolLayer : public Layer<T> {
 public:
  MaxPoolLayer(std::string name, std::size_t pool) : name_(std::move(name)), pool_(pool) {}
  std::string name() const override { return name_; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<MaxPoolLayer>(*this); }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad) override;

 private:
  std::string name_;
  std::size_t pool_;
  PoolResult<T> cache_;
};

/// L x F -> 1 x (L*F).
template <std::floating_point T>
class FlattenLayer : public Layer<T> {
 public:
  explicit FlattenLayer(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return name_; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<FlattenLayer>(*this); }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad) override;

 private:
  std::string name_;
  Shape input_shape_;
};

template <std::floating_point T>
class DropoutLayer : public Layer<T> {
 public:
  DropoutLayer(std::string name, double p);
  std::string name() const override { return name_; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<DropoutLayer>(*this); }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad) override;

  void reseed(std::uint64_t seed) noexcept { rng_ = Rng(seed); }
  double probability() const noexcept { return p_; }

 private:
  std::string name_;
  double p_;
  Rng rng_{0};
  std::vector<T> mask_;
};

template <std::floating_point T>
class DenseLayer : public Layer<T> {
 public:
  DenseLayer(std::string name, std::size_t in_features, std::size_t out_features);
  std::string name() const override { return name_; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<DenseLayer>(*this); }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad) override;
  std::vector<Parameter<T>*> parameters() override { return {&weight_, &bias_}; }

  void initialize(Rng& rng);

 private:
  std::string name_;
  Parameter<T> weight_;  // in x out
  Parameter<T> bias_;    // out
  Tensor<T> input_;
};

/// Token-id lookup into a V x D table. Row 0 (PAD) never receives gradient.
template <std::floating_point T>
class EmbeddingLayer {
 public:
  EmbeddingLayer(std::string name, Tensor<T> table, bool trainable);

  Tensor<T> forward(std::span<const TokenId> ids);
  void backward(const Tensor<T>& grad);

  Parameter<T>& parameter() noexcept { return table_; }
  const Parameter<T>& parameter() const noexcept { return table_; }

 private:
  Parameter<T> table_;
  std::vector<TokenId> ids_;
};

}  // namespace wordcnn

#endif  // WORDCNN_LAYERS_HPP_
