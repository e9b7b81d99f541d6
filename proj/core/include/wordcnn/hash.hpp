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

#ifndef WORDCNN_HASH_HPP_
#define WORDCNN_HASH_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace wordcnn {

/// Incremental 64-bit FNV-1a. Used for config hashes and dataset
/// fingerprints in run logs; not a cryptographic hash.
class Fnv1a64 {
 public:
  void update(std::span<const std::byte> bytes) noexcept;
  void update(std::string_view text) noexcept;
  template <typename T>
  void update_value(const T& value) noexcept {
    update(std::as_bytes(std::span<const T, 1>(&value, 1)));
  }
  std::uint64_t digest() const noexcept { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xCBF29CE484222325ULL;
};

std::string to_hex(std::uint64_t value);

}  // namespace wordcnn

#endif  // WORDCNN_HASH_HPP_
