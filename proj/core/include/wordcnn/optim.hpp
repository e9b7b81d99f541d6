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

#ifndef WORDCNN_OPTIM_HPP_
#define WORDCNN_OPTIM_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wordcnn/layers.hpp"

namespace wordcnn {

enum class OptimizerKind { Sgd, RmsProp, Nadam };

std::string_view to_string(OptimizerKind kind) noexcept;
/// "sgd", "rmsprop", "nadam".
std::optional<OptimizerKind> parse_optimizer_kind(std::string_view name) noexcept;

/// Update-rule hyperparameters. `defaults()` gives the conventional values:
/// SGD lr 0.01; RMSprop lr 0.001, rho 0.9; Nadam lr 0.002, beta1 0.9,
/// beta2 0.999; epsilon 1e-8 for both adaptive rules.
struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Nadam;
  double learning_rate = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double rho = 0.9;
  double epsilon = 1e-8;

  static OptimizerConfig defaults(OptimizerKind kind);
  void validate() const;
};

/// Per-parameter moment estimates. `m` is unused by RMSprop.
template <std::floating_point T>
struct MomentState {
  std::vector<T> m;
  std::vector<T> v;
  std::int64_t t = 0;
};

/// theta <- theta - lr * g
template <std::floating_point T>
void sgd_step(std::span<T> param, std::span<const T> grad, double learning_rate);

/// v <- rho v + (1 - rho) g^2;  theta <- theta - lr g / (sqrt(v) + eps)
template <std::floating_point T>
void rmsprop_step(std::span<T> param, std::span<const T> grad, MomentState<T>& state,
                  const OptimizerConfig& cfg);

/// Adam with Nesterov momentum (Dozat 2016):
///   t <- t + 1
///   m <- b1 m + (1 - b1) g            v <- b2 v + (1 - b2) g^2
///   m_hat = m / (1 - b1^(t+1))        v_hat = v / (1 - b2^t)
///   theta <- theta - lr (b1 m_hat + (1 - b1) g / (1 - b1^t)) / (sqrt(v_hat) + eps)
template <std::floating_point T>
void nadam_step(std::span<T> param, std::span<const T> grad, MomentState<T>& state,
                const OptimizerConfig& cfg);

/// Applies one update to a set of named parameters. Parameters are visited
/// in name order and frozen (non-trainable) ones are skipped.
template <std::floating_point T>
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config);

  void step(std::vector<Parameter<T>*> params);

  const OptimizerConfig& config() const noexcept { return config_; }
  const MomentState<T>* state(const std::string& name) const;

 private:
  OptimizerConfig config_;
  std::map<std::string, MomentState<T>> state_;
};

}  // namespace wordcnn

#endif  // WORDCNN_OPTIM_HPP_
