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

#include "wordcnn/optim.hpp"

#include <algorithm>
#include <cmath>

#include "wordcnn/errors.hpp"

namespace wordcnn {
namespace {

template <typename T>
void check_sizes(std::span<T> param, std::span<const T> grad) {
  if (param.size() != grad.size()) {
    throw ShapeError("optimizer: parameter has " + std::to_string(param.size()) +
                     " values but gradient has " + std::to_string(grad.size()));
  }
}

template <typename T>
void ensure_state(MomentState<T>& state, std::size_t n, bool with_m) {
  if (with_m && state.m.size() != n) state.m.assign(n, T{0});
  if (state.v.size() != n) state.v.assign(n, T{0});
}

}  // namespace

std::string_view to_string(OptimizerKind kind) noexcept {
  switch (kind) {
    case OptimizerKind::Sgd:
      return "sgd";
    case OptimizerKind::RmsProp:
      return "rmsprop";
    case OptimizerKind::Nadam:
      return "nadam";
  }
  return "unknown";
}

std::optional<OptimizerKind> parse_optimizer_kind(std::string_view name) noexcept {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "rmsprop") return OptimizerKind::RmsProp;
  if (name == "nadam") return OptimizerKind::Nadam;
  return std::nullopt;
}

OptimizerConfig OptimizerConfig::defaults(OptimizerKind kind) {
  OptimizerConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case OptimizerKind::Sgd:
      cfg.learning_rate = 0.01;
      break;
    case OptimizerKind::RmsProp:
      cfg.learning_rate = 0.001;
      break;
    case OptimizerKind::Nadam:
      cfg.learning_rate = 0.002;
      break;
  }
  return cfg;
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must lie in [0, 1)");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
}

template <std::floating_point T>
void sgd_step(std::span<T> param, std::span<const T> grad, double learning_rate) {
  check_sizes(param, grad);
  const T lr = static_cast<T>(learning_rate);
  for (std::size_t i = 0; i < param.size(); ++i) param[i] -= lr * grad[i];
}

template <std::floating_point T>
void rmsprop_step(std::span<T> param, std::span<const T> grad, MomentState<T>& state,
                  const OptimizerConfig& cfg) {
  check_sizes(param, grad);
  ensure_state(state, param.size(), false);
  ++state.t;
  const T rho = static_cast<T>(cfg.rho);
  const T one_minus_rho = static_cast<T>(1.0 - cfg.rho);
  const T lr = static_cast<T>(cfg.learning_rate);
  const T eps = static_cast<T>(cfg.epsilon);
  for (std::size_t i = 0; i < param.size(); ++i) {
    const T g = grad[i];
    state.v[i] = rho * state.v[i] + one_minus_rho * g * g;
    param[i] -= lr * g / (std::sqrt(state.v[i]) + eps);
  }
}

template <std::floating_point T>
void nadam_step(std::span<T> param, std::span<const T> grad, MomentState<T>& state,
                const OptimizerConfig& cfg) {
  check_sizes(param, grad);
  ensure_state(state, param.size(), true);
  ++state.t;
  const double t = static_cast<double>(state.t);
  const T b1 = static_cast<T>(cfg.beta1);
  const T b2 = static_cast<T>(cfg.beta2);
  const T one_minus_b1 = static_cast<T>(1.0 - cfg.beta1);
  const T one_minus_b2 = static_cast<T>(1.0 - cfg.beta2);
  const T m_correction = static_cast<T>(1.0 - std::pow(cfg.beta1, t + 1.0));
  const T g_correction = static_cast<T>(1.0 - std::pow(cfg.beta1, t));
  const T v_correction = static_cast<T>(1.0 - std::pow(cfg.beta2, t));
  const T lr = static_cast<T>(cfg.learning_rate);
  const T eps = static_cast<T>(cfg.epsilon);
  for (std::size_t i = 0; i < param.size(); ++i) {
    const T g = grad[i];
    state.m[i] = b1 * state.m[i] + one_minus_b1 * g;
    state.v[i] = b2 * state.v[i] + one_minus_b2 * g * g;
    const T m_hat = state.m[i] / m_correction;
    const T v_hat = state.v[i] / v_correction;
    const T direction = b1 * m_hat + one_minus_b1 * g / g_correction;
    param[i] -= lr * direction / (std::sqrt(v_hat) + eps);
  }
}

template <std::floating_point T>
Optimizer<T>::Optimizer(OptimizerConfig config) : config_(config) {
  config_.validate();
}

template <std::floating_point T>
void Optimizer<T>::step(std::vector<Parameter<T>*> params) {
  std::sort(params.begin(), params.end(),
            [](const Parameter<T>* a, const Parameter<T>* b) { return a->name < b->name; });
  for (Parameter<T>* p : params) {
    if (!p->trainable) continue;
    std::span<T> value = p->value.data();
    std::span<const T> grad = p->grad.data();
    switch (config_.kind) {
      case OptimizerKind::Sgd:
        sgd_step(value, grad, config_.learning_rate);
        break;
      case OptimizerKind::RmsProp:
        rmsprop_step(value, grad, state_[p->name], config_);
        break;
      case OptimizerKind::Nadam:
        nadam_step(value, grad, state_[p->name], config_);
        break;
    }
  }
}

template <std::floating_point T>
const MomentState<T>* Optimizer<T>::state(const std::string& name) const {
  const auto it = state_.find(name);
  return it == state_.end() ? nullptr : &it->second;
}

template void sgd_step(std::span<float>, std::span<const float>, double);
template void sgd_step(std::span<double>, std::span<const double>, double);
template void rmsprop_step(std::span<float>, std::span<const float>, MomentState<float>&,
                           const OptimizerConfig&);
template void rmsprop_step(std::span<double>, std::span<const double>, MomentState<double>&,
                           const OptimizerConfig&);
template void nadam_step(std::span<float>, std::span<const float>, MomentState<float>&,
                         const OptimizerConfig&);
template void nadam_step(std::span<double>, std::span<const double>, MomentState<double>&,
                         const OptimizerConfig&);
template class Optimizer<float>;
template class Optimizer<double>;

}  // namespace wordcnn
