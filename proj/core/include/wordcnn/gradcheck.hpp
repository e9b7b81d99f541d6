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

#ifndef WORDCNN_GRADCHECK_HPP_
#define WORDCNN_GRADCHECK_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "wordcnn/model.hpp"

namespace wordcnn {

struct GradCheckOptions {
  double tolerance = 1e-4;
  double epsilon = 1e-5;
  /// Models with at most this many trainable coordinates are checked in
  /// full; larger ones are checked on a random sample.
  std::size_t max_full_coordinates = 20000;
  std::size_t sampled_coordinates = 400;  // at least 200 are always drawn
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  bool passed = false;
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  std::size_t coordinates_checked = 0;
  std::string failure;  // set when a non-finite value stopped the check
};

/// Compares backprop gradients with central differences
///   n = (L(theta + eps) - L(theta - eps)) / (2 eps)
/// using relative error |a - n| / max(|a|, |n|, 1e-8). The forward pass runs
/// in Eval mode. Frozen parameters and the PAD embedding row are excluded:
/// they never receive updates, so their analytic gradient is zero by
/// construction.
GradCheckReport gradient_check(Model<double>& model, std::span<const TokenId> ids,
                               std::size_t label, const GradCheckOptions& options = {});

/// The small configurations used for routine gradient checks: vocab 20,
/// D 8, max_len 12 (Model A) or 50 (Model B, pools 2/2/global).
ModelConfig reduced_model_config(ModelVariant variant);

/// Builds the reduced model for `variant` with seeded random weights and a
/// seeded random input, then runs gradient_check.
GradCheckReport gradient_check_reduced(ModelVariant variant, double tolerance,
                                       std::uint64_t seed);

}  // namespace wordcnn

#endif  // WORDCNN_GRADCHECK_HPP_
