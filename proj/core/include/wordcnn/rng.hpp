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

#ifndef WORDCNN_RNG_HPP_
#define WORDCNN_RNG_HPP_

#include <cstdint>
#include <span>
#include <utility>

namespace wordcnn {

/// SplitMix64 generator (Steele, Lea and Flood 2014). 64 bits of state, one
/// add and three xor-shift-multiply rounds per output. Every random decision
/// in the library (shuffles, splits, folds, initialization, dropout) is drawn
/// from this generator through the helpers below, never through
/// <random> distributions, whose outputs are implementation-defined. Results
/// are therefore identical across compilers and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept;

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, bound). `bound` must be positive. Unbiased
  /// (rejection sampling on the top of the range).
  std::uint64_t below(std::uint64_t bound) noexcept;

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// Mixes a base seed with a stream index into an independent seed, so that
/// e.g. epoch 3 of fold 2 gets a reproducible generator of its own.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// In-place Fisher-Yates shuffle driven by `rng`.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) noexcept {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace wordcnn

#endif  // WORDCNN_RNG_HPP_
