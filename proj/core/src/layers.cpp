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

#include "wordcnn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "wordcnn/errors.hpp"

namespace wordcnn {
namespace {

void require_rank(const Shape& shape, std::size_t rank, const char* what) {
  if (shape.size() != rank) {
    throw ShapeError(std::string(what) + " expects a rank-" + std::to_string(rank) +
                     " tensor, got " + shape_string(shape));
  }
}

}  // namespace

template <std::floating_point T>
Tensor<T> conv1d_forward(const Tensor<T>& input, const Tensor<T>& filters, const Tensor<T>& bias) {
  require_rank(input.shape(), 2, "conv1d input");
  require_rank(filters.shape(), 3, "conv1d filters");
  const std::size_t length = input.rows();
  const std::size_t channels = input.cols();
  const std::size_t features = filters.dim(0);
  const std::size_t k = filters.dim(1);
  if (filters.dim(2) != channels) {
    throw ShapeError("conv1d filters span " + std::to_string(filters.dim(2)) +
                     " channels but the input has " + std::to_string(channels));
  }
  if (bias.size() != features) {
    throw ShapeError("conv1d bias has " + std::to_string(bias.size()) + " entries for " +
                     std::to_string(features) + " filters");
  }
  if (length < k) {
    throw ShapeError("conv1d input length " + std::to_string(length) +
                     " is shorter than the region size " + std::to_string(k));
  }
  const std::size_t out_len = length - k + 1;
  const std::size_t window = k * channels;
  Tensor<T> out({out_len, features});
  const T* in = input.data().data();
  const T* w = filters.data().data();
  // Rows t..t+k-1 of a row-major T x D input are one contiguous run of k*D
  // values laid out j-major, d-minor, the same layout as one filter.
  for (std::size_t t = 0; t < out_len; ++t) {
    const T* x = in + t * channels;
    for (std::size_t f = 0; f < features; ++f) {
      const T* wf = w + f * window;
      T acc = 0;
      for (std::size_t i = 0; i < window; ++i) acc += x[i] * wf[i];
      out.at(t, f) = bias[f] + acc;
    }
  }
  return out;
}

template <std::floating_point T>
Tensor<T> conv1d_backward(const Tensor<T>& grad_out, const Tensor<T>& input,
                          const Tensor<T>& filters, Tensor<T>& grad_filters,
                          Tensor<T>& grad_bias) {
  require_rank(input.shape(), 2, "conv1d input");
  require_rank(filters.shape(), 3, "conv1d filters");
  const std::size_t channels = input.cols();
  const std::size_t features = filters.dim(0);
  const std::size_t k = filters.dim(1);
  if (input.rows() < k || filters.dim(2) != channels) {
    throw ShapeError("conv1d backward: input " + shape_string(input.shape()) +
                     " does not match filters " + shape_string(filters.shape()));
  }
  const std::size_t out_len = input.rows() - k + 1;
  if (grad_out.shape() != Shape{out_len, features}) {
    throw ShapeError("conv1d backward: gradient " + shape_string(grad_out.shape()) +
                     " does not match output " + shape_string(Shape{out_len, features}));
  }
  if (grad_filters.shape() != filters.shape() || grad_bias.size() != features) {
    throw ShapeError("conv1d backward: gradient accumulators do not match the parameters");
  }
  const std::size_t window = k * channels;
  Tensor<T> grad_in(input.shape());
  const T* in = input.data().data();
  const T* w = filters.data().data();
  T* gw = grad_filters.data().data();
  T* gi = grad_in.data().data();
  for (std::size_t t = 0; t < out_len; ++t) {
    const T* x = in + t * channels;
    T* gx = gi + t * channels;
    for (std::size_t f = 0; f < features; ++f) {
      const T g = grad_out.at(t, f);
      if (g == T{0}) continue;
      grad_bias[f] += g;
      const T* wf = w + f * window;
      T* gwf = gw + f * window;
      for (std::size_t i = 0; i < window; ++i) {
        gwf[i] += g * x[i];
        gx[i] += g * wf[i];
      }
    }
  }
  return grad_in;
}

template <std::floating_point T>
Conv1dGradients<T> conv1d_backward(const Tensor<T>& grad_out, const Tensor<T>& input,
                                   const Tensor<T>& filters) {
  Conv1dGradients<T> grads;
  grads.filters = Tensor<T>(filters.shape());
  grads.bias = Tensor<T>(Shape{filters.dim(0)});
  grads.input = conv1d_backward(grad_out, input, filters, grads.filters, grads.bias);
  return grads;
}

template <std::floating_point T>
Tensor<T> relu(const Tensor<T>& x) {
  Tensor<T> out = x;
  for (T& v : out.data()) v = v > T{0} ? v : T{0};
  return out;
}

template <std::floating_point T>
Tensor<T> relu_backward(const Tensor<T>& grad, const Tensor<T>& x) {
  if (grad.shape() != x.shape()) throw ShapeError("relu backward: shape mismatch");
  Tensor<T> out = grad;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(x[i] > T{0})) out[i] = T{0};
  }
  return out;
}

template <std::floating_point T>
PoolResult<T> maxpool1d(const Tensor<T>& input, std::size_t pool) {
  require_rank(input.shape(), 2, "maxpool input");
  if (pool == 0) throw ShapeError("pool size must be at least 1");
  const std::size_t length = input.rows();
  const std::size_t features = input.cols();
  if (length < pool) {
    throw ShapeError("maxpool input length " + std::to_string(length) +
                     " is shorter than the pool size " + std::to_string(pool));
  }
  const std::size_t out_len = length / pool;
  PoolResult<T> result;
  result.input_rows = length;
  result.output = Tensor<T>({out_len, features});
  result.argmax.resize(out_len * features);
  for (std::size_t i = 0; i < out_len; ++i) {
    for (std::size_t f = 0; f < features; ++f) {
      std::size_t best = i * pool;
      T best_value = input.at(best, f);
      for (std::size_t r = best + 1; r < (i + 1) * pool; ++r) {
        if (input.at(r, f) > best_value) {
          best_value = input.at(r, f);
          best = r;
        }
      }
      result.output.at(i, f) = best_value;
      result.argmax[i * features + f] = best;
    }
  }
  return result;
}

template <std::floating_point T>
PoolResult<T> global_maxpool(const Tensor<T>& input) {
  require_rank(input.shape(), 2, "global maxpool input");
  return maxpool1d(input, input.rows());
}

template <std::floating_point T>
Tensor<T> maxpool1d_backward(const Tensor<T>& grad_out, const PoolResult<T>& cache) {
  if (grad_out.shape() != cache.output.shape()) {
    throw ShapeError("maxpool backward: gradient " + shape_string(grad_out.shape()) +
                     " does not match output " + shape_string(cache.output.shape()));
  }
  const std::size_t features = cache.output.cols();
  Tensor<T> grad_in({cache.input_rows, features});
  for (std::size_t i = 0; i < cache.output.rows(); ++i) {
    for (std::size_t f = 0; f < features; ++f) {
      grad_in.at(cache.argmax[i * features + f], f) += grad_out.at(i, f);
    }
  }
  return grad_in;
}

template <std::floating_point T>
DropoutResult<T> dropout(const Tensor<T>& x, double p, Mode mode, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ConfigError("dropout probability must lie in [0, 1), got " + std::to_string(p));
  }
  DropoutResult<T> result{x, {}};
  if (mode == Mode::Eval || p == 0.0) return result;
  const T scale = static_cast<T>(1.0 / (1.0 - p));
  result.mask.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    result.mask[i] = rng.uniform01() < p ? T{0} : scale;
    result.output[i] *= result.mask[i];
  }
  return result;
}

template <std::floating_point T>
Tensor<T> dropout_backward(const Tensor<T>& grad, std::span<const T> mask) {
  if (mask.empty()) return grad;
  if (mask.size() != grad.size()) throw ShapeError("dropout backward: mask size mismatch");
  Tensor<T> out = grad;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return out;
}

template <std::floating_point T>
Tensor<T> dense_forward(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  require_rank(weight.shape(), 2, "dense weight");
  const std::size_t in = weight.rows();
  const std::size_t out = weight.cols();
  if (x.size() != in || bias.size() != out) {
    throw ShapeError("dense: input " + shape_string(x.shape()) + ", weight " +
                     shape_string(weight.shape()) + ", bias " + shape_string(bias.shape()) +
                     " are inconsistent");
  }
  Tensor<T> y({1, out});
  for (std::size_t c = 0; c < out; ++c) y[c] = bias[c];
  for (std::size_t f = 0; f < in; ++f) {
    const T xf = x[f];
    const T* row = weight.data().data() + f * out;
    for (std::size_t c = 0; c < out; ++c) y[c] += xf * row[c];
  }
  return y;
}

template <std::floating_point T>
Tensor<T> dense_backward(const Tensor<T>& grad_out, const Tensor<T>& x, const Tensor<T>& weight,
                         Tensor<T>& grad_weight, Tensor<T>& grad_bias) {
  require_rank(weight.shape(), 2, "dense weight");
  const std::size_t in = weight.rows();
  const std::size_t out = weight.cols();
  if (x.size() != in || grad_out.size() != out || grad_weight.shape() != weight.shape() ||
      grad_bias.size() != out) {
    throw ShapeError("dense backward: shapes are inconsistent");
  }
  Tensor<T> grad_x(x.shape());
  for (std::size_t c = 0; c < out; ++c) grad_bias[c] += grad_out[c];
  for (std::size_t f = 0; f < in; ++f) {
    const T* row = weight.data().data() + f * out;
    T* grow = grad_weight.data().data() + f * out;
    T acc = 0;
    for (std::size_t c = 0; c < out; ++c) {
      grow[c] += x[f] * grad_out[c];
      acc += row[c] * grad_out[c];
    }
    grad_x[f] = acc;
  }
  return grad_x;
}

template <std::floating_point T>
SoftmaxXent<T> softmax_xent(std::span<const T> logits, std::size_t label) {
  if (logits.size() < 2) throw InputError("softmax needs at least two classes");
  if (label >= logits.size()) {
    throw InputError("label " + std::to_string(label) + " out of range for " +
                     std::to_string(logits.size()) + " classes");
  }
  const T max_logit = *std::max_element(logits.begin(), logits.end());
  SoftmaxXent<T> result{T{0}, std::vector<T>(logits.size()), std::vector<T>(logits.size())};
  T sum = 0;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    result.probs[c] = std::exp(logits[c] - max_logit);
    sum += result.probs[c];
  }
  for (std::size_t c = 0; c < logits.size(); ++c) {
    result.probs[c] /= sum;
    result.grad_logits[c] = result.probs[c] - (c == label ? T{1} : T{0});
  }
  // log-sum-exp form stays finite even when probs[label] underflows.
  result.loss = std::log(sum) - (logits[label] - max_logit);
  return result;
}

template <std::floating_point T>
void glorot_uniform(Tensor<T>& weight, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (T& v : weight.data()) v = static_cast<T>(rng.uniform(-a, a));
}

// --- Layers -------------------------------------------------------------------

template <std::floating_point T>
Conv1dLayer<T>::Conv1dLayer(std::string name, std::size_t in_channels, std::size_t feature_maps,
                            std::size_t region_size)
    : name_(std::move(name)) {
  weight_ = {name_ + ".weight", Tensor<T>({feature_maps, region_size, in_channels}),
             Tensor<T>({feature_maps, region_size, in_channels}), true};
  bias_ = {name_ + ".bias", Tensor<T>({feature_maps}), Tensor<T>({feature_maps}), true};
}

template <std::floating_point T>
void Conv1dLayer<T>::initialize(Rng& rng) {
  const auto& s = weight_.value.shape();
  // Keras convention: fan_in = k * D, fan_out = k * F.
  glorot_uniform(weight_.value, s[1] * s[2], s[1] * s[0], rng);
  bias_.value.fill(T{0});
}

template <std::floating_point T>
Tensor<T> Conv1dLayer<T>::forward(const Tensor<T>& x, Mode) {
  input_ = x;
  return conv1d_forward(x, weight_.value, bias_.value);
}

template <std::floating_point T>
Tensor<T> Conv1dLayer<T>::backward(const Tensor<T>& grad) {
  return conv1d_backward(grad, input_, weight_.value, weight_.grad, bias_.grad);
}

template <std::floating_point T>
Tensor<T> ReluLayer<T>::forward(const Tensor<T>& x, Mode) {
  input_ = x;
  return relu(x);
}

template <std::floating_point T>
Tensor<T> ReluLayer<T>::backward(const Tensor<T>& grad) {
  return relu_backward(grad, input_);
}

template <std::floating_point T>
Tensor<T> MaxPoolLayer<T>::forward(const Tensor<T>& x, Mode) {
  cache_ = pool_ == 0 ? global_maxpool(x) : maxpool1d(x, pool_);
  return cache_.output;
}

template <std::floating_point T>
Tensor<T> MaxPoolLayer<T>::backward(const Tensor<T>& grad) {
  return maxpool1d_backward(grad, cache_);
}

template <std::floating_point T>
Tensor<T> FlattenLayer<T>::forward(const Tensor<T>& x, Mode) {
  input_shape_ = x.shape();
  Tensor<T> out = x;
  out.reshape({1, x.size()});
  return out;
}

template <std::floating_point T>
Tensor<T> FlattenLayer<T>::backward(const Tensor<T>& grad) {
  Tensor<T> out = grad;
  out.reshape(input_shape_);
  return out;
}

template <std::floating_point T>
DropoutLayer<T>::DropoutLayer(std::string name, double p) : name_(std::move(name)), p_(p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ConfigError("dropout probability must lie in [0, 1), got " + std::to_string(p));
  }
}

template <std::floating_point T>
Tensor<T> DropoutLayer<T>::forward(const Tensor<T>& x, Mode mode) {
  auto result = dropout(x, p_, mode, rng_);
  mask_ = std::move(result.mask);
  return std::move(result.output);
}

template <std::floating_point T>
Tensor<T> DropoutLayer<T>::backward(const Tensor<T>& grad) {
  return dropout_backward(grad, std::span<const T>(mask_));
}

template <std::floating_point T>
DenseLayer<T>::DenseLayer(std::string name, std::size_t in_features, std::size_t out_features)
    : name_(std::move(name)) {
  weight_ = {name_ + ".weight", Tensor<T>({in_features, out_features}),
             Tensor<T>({in_features, out_features}), true};
  bias_ = {name_ + ".bias", Tensor<T>({out_features}), Tensor<T>({out_features}), true};
}

template <std::floating_point T>
void DenseLayer<T>::initialize(Rng& rng) {
  glorot_uniform(weight_.value, weight_.value.rows(), weight_.value.cols(), rng);
  bias_.value.fill(T{0});
}

template <std::floating_point T>
Tensor<T> DenseLayer<T>::forward(const Tensor<T>& x, Mode) {
  input_ = x;
  return dense_forward(x, weight_.value, bias_.value);
}

template <std::floating_point T>
Tensor<T> DenseLayer<T>::backward(const Tensor<T>& grad) {
  return dense_backward(grad, input_, weight_.value, weight_.grad, bias_.grad);
}

template <std::floating_point T>
EmbeddingLayer<T>::EmbeddingLayer(std::string name, Tensor<T> table, bool trainable) {
  if (table.rank() != 2) throw ShapeError("embedding table must be rank 2");
  Tensor<T> grad(table.shape());
  table_ = {std::move(name), std::move(table), std::move(grad), trainable};
}

template <std::floating_point T>
Tensor<T> EmbeddingLayer<T>::forward(std::span<const TokenId> ids) {
  if (ids.empty()) throw ShapeError("embedding lookup of an empty sequence");
  const std::size_t vocab = table_.value.rows();
  const std::size_t dim = table_.value.cols();
  ids_.assign(ids.begin(), ids.end());
  Tensor<T> out({ids.size(), dim});
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const auto id = ids[t];
    if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
      throw InputError("token id " + std::to_string(id) + " outside vocabulary of size " +
                       std::to_string(vocab));
    }
    const T* src = table_.value.data().data() + static_cast<std::size_t>(id) * dim;
    std::copy(src, src + dim, out.data().data() + t * dim);
  }
  return out;
}

template <std::floating_point T>
void EmbeddingLayer<T>::backward(const Tensor<T>& grad) {
  if (!table_.trainable) return;
  const std::size_t dim = table_.value.cols();
  if (grad.shape() != Shape{ids_.size(), dim}) {
    throw ShapeError("embedding backward: gradient shape mismatch");
  }
  for (std::size_t t = 0; t < ids_.size(); ++t) {
    if (ids_[t] == kPadId) continue;
    T* dst = table_.grad.data().data() + static_cast<std::size_t>(ids_[t]) * dim;
    const T* src = grad.data().data() + t * dim;
    for (std::size_t d = 0; d < dim; ++d) dst[d] += src[d];
  }
}

#define WORDCNN_INSTANTIATE(T)                                                                   \
  template Tensor<T> conv1d_forward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);       \
  template Tensor<T> conv1d_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,       \
                                     Tensor<T>&, Tensor<T>&);                                    \
  template Conv1dGradients<T> conv1d_backward(const Tensor<T>&, const Tensor<T>&,               \
                                              const Tensor<T>&);                                 \
  template Tensor<T> relu(const Tensor<T>&);                                                     \
  template Tensor<T> relu_backward(const Tensor<T>&, const Tensor<T>&);                          \
  template PoolResult<T> maxpool1d(const Tensor<T>&, std::size_t);                               \
  template PoolResult<T> global_maxpool(const Tensor<T>&);                                       \
  template Tensor<T> maxpool1d_backward(const Tensor<T>&, const PoolResult<T>&);                 \
  template DropoutResult<T> dropout(const Tensor<T>&, double, Mode, Rng&);                       \
  template Tensor<T> dropout_backward(const Tensor<T>&, std::span<const T>);                     \
  template Tensor<T> dense_forward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);        \
  template Tensor<T> dense_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,        \
                                    Tensor<T>&, Tensor<T>&);                                     \
  template SoftmaxXent<T> softmax_xent(std::span<const T>, std::size_t);                         \
  template void glorot_uniform(Tensor<T>&, std::size_t, std::size_t, Rng&);                      \
  template class Conv1dLayer<T>;                                                                 \
  template class ReluLayer<T>;                                                                   \
  template class MaxPoolLayer<T>;                                                                \
  template class FlattenLayer<T>;                                                                \
  template class DropoutLayer<T>;                                                                \
  template class DenseLayer<T>;                                                                  \
  template class EmbeddingLayer<T>;

WORDCNN_INSTANTIATE(float)
WORDCNN_INSTANTIATE(double)

#undef WORDCNN_INSTANTIATE

}  // namespace wordcnn
