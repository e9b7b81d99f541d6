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

#include <benchmark/benchmark.h>

#include <sstream>
#include <vector>

#include "wordcnn/embed.hpp"
#include "wordcnn/layers.hpp"
#include "wordcnn/model.hpp"
#include "wordcnn/rng.hpp"

namespace {

using namespace wordcnn;

void fill(Tensor<float>& t, Rng& rng) {
  for (auto& v : t.storage()) v = static_cast<float>(rng.uniform(-1, 1));
}

void BM_Conv1dForward(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  const std::size_t dim = 100, maps = 100, k = 3;
  Rng rng(1);
  Tensor<float> in({len, dim}), w({maps, k, dim}), b({maps});
  fill(in, rng);
  fill(w, rng);
  fill(b, rng);
  for (auto _ : state) benchmark::DoNotOptimize(conv1d_forward(in, w, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>((len - k + 1) * maps * k * dim));
}
BENCHMARK(BM_Conv1dForward)->Arg(100)->Arg(1000);

std::vector<TokenId> random_ids(std::size_t len, std::size_t vocab, Rng& rng) {
  std::vector<TokenId> ids(len, kPadId);
  for (std::size_t i = 0; i < len / 2; ++i) ids[i] = static_cast<TokenId>(2 + rng.below(vocab - 2));
  return ids;
}

void BM_ModelForwardBackward(benchmark::State& state) {
  const bool model_b = state.range(0) == 1;
  const auto cfg = model_b ? model_b_config(20000, 100) : model_a_config(20000, 100);
  Model<float> model(cfg, nullptr, 5);
  Rng rng(2);
  const auto ids = random_ids(cfg.max_len, cfg.vocab_size, rng);
  for (auto _ : state) {
    model.zero_grad();
    benchmark::DoNotOptimize(model.forward_backward(ids, 1, Mode::Train));
  }
  state.SetLabel(model_b ? "model B" : "model A");
}
BENCHMARK(BM_ModelForwardBackward)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ModelForwardEval(benchmark::State& state) {
  const auto cfg = model_a_config(20000, 100);
  Model<float> model(cfg, nullptr, 5);
  Rng rng(3);
  const auto ids = random_ids(cfg.max_len, cfg.vocab_size, rng);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(ids, Mode::Eval));
}
BENCHMARK(BM_ModelForwardEval)->Unit(benchmark::kMicrosecond);

void BM_ParseBinaryVectors(benchmark::State& state) {
  WordVectorTable table(300);
  Rng rng(4);
  std::vector<float> v(300);
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    for (auto& x : v) x = static_cast<float>(rng.uniform(-1, 1));
    table.add("word" + std::to_string(i), v);
  }
  std::ostringstream out;
  write_binary_vectors(out, table);
  const std::string bytes = out.str();
  for (auto _ : state) {
    std::istringstream in(bytes);
    benchmark::DoNotOptimize(parse_binary_vectors(in));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_ParseBinaryVectors)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
