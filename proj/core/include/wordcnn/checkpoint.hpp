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

#ifndef WORDCNN_CHECKPOINT_HPP_
#define WORDCNN_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "wordcnn/model.hpp"

namespace wordcnn {

inline constexpr char kCheckpointMagic[4] = {'W', 'C', 'N', 'N'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

/// Layout (all integers little-endian):
///
///   "WCNN"  u16 version
///   u32 n   n bytes of canonical ModelConfig text
///   u32 parameter count
///   per parameter, in name order:
///     u32 n  n bytes of UTF-8 name
///     u32 rank, rank x u32 dims
///     prod(dims) x float32
///
/// Double-precision models are narrowed to float32 on save.
template <std::floating_point T>
void save_checkpoint(const Model<T>& model, std::ostream& out);

template <std::floating_point T>
std::string checkpoint_bytes(const Model<T>& model);

/// Rebuilds the model described by the checkpoint. Throws FormatError on a
/// bad magic or version, truncation, or parameters that do not match the
/// stored config. Nothing partially loaded escapes.
template <std::floating_point T = float>
Model<T> load_checkpoint(std::istream& in);

template <std::floating_point T = float>
Model<T> load_checkpoint(std::string_view bytes);

void save_checkpoint_file(const Model<float>& model, const std::filesystem::path& path);
Model<float> load_checkpoint_file(const std::filesystem::path& path);

}  // namespace wordcnn

#endif  // WORDCNN_CHECKPOINT_HPP_
