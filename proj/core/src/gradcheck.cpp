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

#include "wordcnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wordcnn/errors.hpp"

namespace wordcnn {
namespace {

struct Coordinate {
  Parameter<double>* param;
  std::size_t index;
};

std::vector<Coordinate> checkable_coordinates(Model<double>& model) {
  std::vector<Coordinate> coords;
  for (auto* p : model.parameters()) {
    if (!p->trainable) continue;
    // Row 0 of the embedding table is PAD and frozen.
    const std::size_t skip = p->name == "embedding.weight" ? p->value.cols() : 0;
    for (std::size_t i = skip; i < p->value.size(); ++i) coords.push_back({p, i});
  }
  return coords;
}

}  // namespace

GradCheckReport gradient_check(Model<double>& model, std::span<const TokenId> ids,
                               std::size_t label, const GradCheckOptions& options) {
  GradCheckReport report;
  model.zero_grad();
  const double base = model.forward_backward(ids, label, Mode::Eval).loss;
  if (!std::isfinite(base)) {
    const auto layer = model.first_nonfinite_layer(ids, Mode::Eval);
    report.failure = "non-finite loss; first non-finite output at layer " + layer.value_or("loss");
    return report;
  }

  auto coords = checkable_coordinates(model);
  if (coords.size() > options.max_full_coordinates) {
    Rng rng(options.seed);
    shuffle(std::span<Coordinate>(coords), rng);
    coords.resize(std::min(coords.size(), std::max<std::size_t>(200, options.sampled_coordinates)));
  }

  const double eps = options.epsilon;
  for (const auto& [param, index] : coords) {
    const double analytic = param->grad[index];
    const double saved = param->value[index];
    param->value[index] = saved + eps;
    const double plus = model.loss(ids, label, Mode::Eval);
    param->value[index] = saved - eps;
    const double minus = model.loss(ids, label, Mode::Eval);
    param->value[index] = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      report.failure = "non-finite loss while perturbing " + param->name + "[" +
                       std::to_string(index) + "]";
      return report;
    }
    const double numeric = (plus - minus) / (2.0 * eps);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    const double rel = std::abs(analytic - numeric) / denom;
    ++report.coordinates_checked;
    if (rel > report.max_relative_error || report.coordinates_checked == 1) {
      report.max_relative_error = rel;
      report.worst_parameter = param->name;
      report.worst_index = index;
    }
  }
  report.passed = report.max_relative_error < options.tolerance;
  return report;
}

ModelConfig reduced_model_config(ModelVariant variant) {
  constexpr std::size_t kVocab = 20;
  constexpr std::size_t kDim = 8;
  if (variant == ModelVariant::ModelB) {
    ModelBOptions b;
    b.max_len = 50;
    b.feature_maps = 6;
    b.pools = {2, 2, 0};
    b.global_last = true;
    b.dense_hidden = 6;
    return model_b_config(kVocab, kDim, b);
  }
  ModelAOptions a;
  a.max_len = 12;
  a.feature_maps = 6;
  return model_a_config(kVocab, kDim, a);
}

GradCheckReport gradient_check_reduced(ModelVariant variant, double tolerance,
                                       std::uint64_t seed) {
  const ModelConfig config = reduced_model_config(variant);
  Model<double> model(config, nullptr, seed);
  Rng rng(derive_seed(seed, 7));
  // Zero biases put every all-PAD window exactly on the ReLU kink, where a
  // central difference averages the two one-sided slopes.
  for (auto* p : model.parameters()) {
    if (p->name.ends_with(".bias")) {
      for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] = rng.uniform(0.05, 0.15);
    }
  }
  // A PAD tail exercises the frozen row and the padded positions.
  const std::size_t content = config.max_len - config.max_len / 6;
  std::vector<TokenId> ids(config.max_len, kPadId);
  for (std::size_t i = 0; i < content; ++i) {
    ids[i] = static_cast<TokenId>(1 + rng.below(config.vocab_size - 1));
  }
  const auto label = static_cast<std::size_t>(rng.below(2));
  GradCheckOptions options;
  options.tolerance = tolerance;
  options.seed = seed;
  return gradient_check(model, ids, label, options);
}

}  // namespace wordcnn
