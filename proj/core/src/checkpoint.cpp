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

#include "wordcnn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "wordcnn/errors.hpp"

namespace wordcnn {
namespace {

constexpr std::uint32_t kMaxStringBytes = 1u << 24;
constexpr std::uint32_t kMaxRank = 8;

void put_u16(std::ostream& out, std::uint16_t v) {
  const char bytes[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
  out.write(bytes, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 4);
}

void put_string(std::ostream& out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(char* dst, std::size_t n, const char* what) {
    if (!in_.read(dst, static_cast<std::streamsize>(n))) {
      throw FormatError(std::string("truncated checkpoint while reading ") + what);
    }
  }
  std::uint16_t u16(const char* what) {
    unsigned char b[2];
    bytes(reinterpret_cast<char*>(b), 2, what);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32(const char* what) {
    unsigned char b[4];
    bytes(reinterpret_cast<char*>(b), 4, what);
    return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
           (std::uint32_t{b[3]} << 24);
  }
  std::string string(const char* what) {
    const std::uint32_t n = u32(what);
    if (n > kMaxStringBytes) throw FormatError(std::string("implausible length for ") + what);
    std::string s(n, '\0');
    bytes(s.data(), n, what);
    return s;
  }

 private:
  std::istream& in_;
};

}  // namespace

template <std::floating_point T>
void save_checkpoint(const Model<T>& model, std::ostream& out) {
  out.write(kCheckpointMagic, 4);
  put_u16(out, kCheckpointVersion);
  put_string(out, to_canonical_text(model.config()));
  const auto params = model.parameters();
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  std::vector<char> raw;
  for (const auto* p : params) {
    put_string(out, p->name);
    put_u32(out, static_cast<std::uint32_t>(p->value.rank()));
    for (std::size_t d : p->value.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    raw.resize(p->value.size() * 4);
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(p->value[i]));
      for (int b = 0; b < 4; ++b) raw[4 * i + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  }
}

template <std::floating_point T>
std::string checkpoint_bytes(const Model<T>& model) {
  std::ostringstream out(std::ios::binary);
  save_checkpoint(model, out);
  return std::move(out).str();
}

template <std::floating_point T>
Model<T> load_checkpoint(std::istream& in) {
  Reader reader(in);
  char magic[4];
  reader.bytes(magic, 4, "magic");
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0) throw FormatError("not a WCNN checkpoint");
  const auto version = reader.u16("version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const ModelConfig config = model_config_from_text(reader.string("config"));

  std::map<std::string, Tensor<float>> stored;
  const std::uint32_t count = reader.u32("parameter count");
  std::vector<char> raw;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = reader.string("parameter name");
    const std::uint32_t rank = reader.u32("rank");
    if (rank == 0 || rank > kMaxRank) throw FormatError("bad rank for parameter " + name);
    Shape shape(rank);
    for (auto& d : shape) {
      d = reader.u32("dimension");
      if (d == 0) throw FormatError("zero extent in parameter " + name);
    }
    const std::size_t n = shape_size(shape);
    // Guard the allocation against garbage dimensions before reading data.
    if (n > (std::size_t{1} << 33)) throw FormatError("implausible size for parameter " + name);
    raw.resize(n * 4);
    reader.bytes(raw.data(), raw.size(), "parameter data");
    std::vector<float> values(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto* b = reinterpret_cast<const unsigned char*>(raw.data() + 4 * k);
      values[k] = std::bit_cast<float>(std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) |
                                       (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24));
    }
    if (!stored.emplace(name, Tensor<float>(std::move(shape), std::move(values))).second) {
      throw FormatError("duplicate parameter " + name);
    }
  }

  Model<T> model = [&] {
    try {
      return Model<T>(config, nullptr, 0);
    } catch (const Error& e) {
      throw FormatError(std::string("checkpoint config is invalid: ") + e.what());
    }
  }();
  const auto params = model.parameters();
  if (params.size() != stored.size()) {
    throw FormatError("checkpoint has " + std::to_string(stored.size()) +
                      " parameters, the model needs " + std::to_string(params.size()));
  }
  for (auto* p : params) {
    const auto it = stored.find(p->name);
    if (it == stored.end()) throw FormatError("checkpoint lacks parameter " + p->name);
    if (it->second.shape() != p->value.shape()) {
      throw FormatError("parameter " + p->name + " has shape " + shape_string(it->second.shape()) +
                        ", expected " + shape_string(p->value.shape()));
    }
    p->value = tensor_cast<T>(it->second);
  }
  return model;
}

template <std::floating_point T>
Model<T> load_checkpoint(std::string_view bytes) {
  std::istringstream in(std::string(bytes), std::ios::binary);
  return load_checkpoint<T>(in);
}

void save_checkpoint_file(const Model<float>& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write checkpoint " + path.string());
  save_checkpoint(model, out);
  if (!out) throw InputError("failed writing checkpoint " + path.string());
}

Model<float> load_checkpoint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint " + path.string());
  return load_checkpoint<float>(in);
}

template void save_checkpoint(const Model<float>&, std::ostream&);
template void save_checkpoint(const Model<double>&, std::ostream&);
template std::string checkpoint_bytes(const Model<float>&);
template std::string checkpoint_bytes(const Model<double>&);
template Model<float> load_checkpoint<float>(std::istream&);
template Model<double> load_checkpoint<double>(std::istream&);
template Model<float> load_checkpoint<float>(std::string_view);
template Model<double> load_checkpoint<double>(std::string_view);

}  // namespace wordcnn
