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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "synthetic.hpp"
#include "wordcnn/checkpoint.hpp"
#include "wordcnn/errors.hpp"
#include "wordcnn/model.hpp"
#include "wordcnn/text.hpp"
#include "wordcnn/train.hpp"

using namespace wordcnn;

namespace {

struct Corpus {
  Vocabulary vocab;
  std::vector<LabeledExample> examples;
};

Corpus encoded_corpus(std::size_t n, std::uint64_t seed, std::size_t max_len = 20) {
  const auto reviews = wordcnn::testing::planted_bigram_corpus(n, seed);
  std::vector<std::vector<std::string>> tokens;
  for (const auto& r : reviews) tokens.push_back(tokenize(r.text));
  Corpus c{build_vocabulary(tokens, 100), {}};
  for (std::size_t i = 0; i < reviews.size(); ++i) {
    c.examples.push_back({encode(tokens[i], c.vocab, max_len), reviews[i].label});
  }
  return c;
}

ModelConfig small_a(std::size_t vocab, std::size_t region = 2, std::size_t max_len = 20) {
  return model_a_config(vocab, 8, {region, 12, 2, 0.2, max_len});
}

TrainConfig quick(std::size_t epochs, std::uint64_t seed = 0) {
  TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.epochs = epochs;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("train config defaults follow the Model A regime") {
  TrainConfig cfg;
  CHECK(cfg.batch_size == 500);
  CHECK(cfg.epochs == 3);
  CHECK(cfg.optimizer.kind == OptimizerKind::Nadam);
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("evaluate: all-positive model on 3 positive + 1 negative") {
  Model<float> m(small_a(10, 2, 6), nullptr, 1);
  m.find_parameter("output.weight")->value.fill(0.0f);
  auto& bias = m.find_parameter("output.bias")->value;
  bias[0] = 0.0f;
  bias[1] = 5.0f;
  std::vector<LabeledExample> ex;
  for (int i = 0; i < 3; ++i) ex.push_back({{2, 3, 0, 0, 0, 0}, Polarity::Positive});
  ex.push_back({{4, 0, 0, 0, 0, 0}, Polarity::Negative});
  const auto metrics = evaluate(m, ex);
  CHECK(metrics.accuracy == 0.75);
  CHECK(metrics.example_count == 4);
  CHECK(metrics.confusion[1][1] == 3);
  CHECK(metrics.confusion[0][1] == 1);
  CHECK(evaluate(m, ex) == metrics);
  CHECK_THROWS_AS(evaluate(m, std::span<const LabeledExample>{}), InputError);
}

TEST_CASE("evaluate: ties go to the lower class") {
  Model<float> m(small_a(10, 2, 6), nullptr, 1);
  m.find_parameter("output.weight")->value.fill(0.0f);
  m.find_parameter("output.bias")->value.fill(0.0f);
  const std::vector<TokenId> ids{2, 3, 0, 0, 0, 0};
  CHECK(m.predict(ids).label == 0);
}

TEST_CASE("evaluate: results do not depend on the thread count") {
  const auto c = encoded_corpus(97, 3);
  Model<float> m(small_a(c.vocab.size()), nullptr, 2);
  const auto one = evaluate(m, c.examples, 1);
  const auto three = evaluate(m, c.examples, 3);
  const auto many = evaluate(m, c.examples, 16);
  CHECK(one == three);
  CHECK(one == many);
  std::size_t total = 0;
  for (const auto& row : one.confusion) total += row[0] + row[1];
  CHECK(total == one.example_count);
  CHECK(one.accuracy == double(one.confusion[0][0] + one.confusion[1][1]) / one.example_count);
}

TEST_CASE("fit: two identical runs give bitwise-identical parameters") {
  const auto c = encoded_corpus(120, 5);
  Model<float> a(small_a(c.vocab.size()), nullptr, 9);
  Model<float> b(small_a(c.vocab.size()), nullptr, 9);
  const auto ha = fit(a, c.examples, {}, quick(2, 9));
  const auto hb = fit(b, c.examples, {}, quick(2, 9));
  CHECK(checkpoint_bytes(a) == checkpoint_bytes(b));
  REQUIRE(ha.history.size() == 2);
  CHECK(ha.history[1].train == hb.history[1].train);
}

TEST_CASE("fit: epochs = 0 leaves the model untouched") {
  const auto c = encoded_corpus(30, 6);
  Model<float> m(small_a(c.vocab.size()), nullptr, 1);
  const auto before = checkpoint_bytes(m);
  const auto result = fit(m, c.examples, {}, quick(0));
  CHECK(result.history.empty());
  CHECK(checkpoint_bytes(m) == before);
}

TEST_CASE("fit: validation is reported, interval evaluations when asked") {
  const auto c = encoded_corpus(100, 7);
  const std::span<const LabeledExample> all(c.examples);
  Model<float> m(small_a(c.vocab.size()), nullptr, 1);
  auto cfg = quick(2);
  cfg.eval_every = 2;
  const auto result = fit(m, all.subspan(0, 80), all.subspan(80), cfg);
  REQUIRE(result.history.size() == 2);
  REQUIRE(result.history[0].validation.has_value());
  CHECK(result.history[0].validation->example_count == 20);
  CHECK(result.history[0].train.example_count == 80);
  CHECK(result.interval_evaluations.size() == 2 * (5 / 2));
  CHECK_THROWS_AS(fit(m, all.subspan(0, 0), all, cfg), InputError);
}

TEST_CASE("fit: first-batch loss sits near ln 2") {
  const auto c = encoded_corpus(64, 8);
  Model<float> m(small_a(c.vocab.size()), nullptr, 3);
  auto cfg = quick(1);
  cfg.batch_size = 64;
  const auto result = fit(m, c.examples, {}, cfg);
  const double loss = result.history[0].train.loss;
  CHECK(loss >= 0.5 * std::log(2.0));
  CHECK(loss <= 2.0 * std::log(2.0));
}

TEST_CASE("fit: non-finite loss aborts with epoch and batch") {
  const auto c = encoded_corpus(40, 9);
  Model<float> m(small_a(c.vocab.size()), nullptr, 1);
  m.find_parameter("output.bias")->value[0] = std::numeric_limits<float>::quiet_NaN();
  try {
    fit(m, c.examples, {}, quick(1));
    FAIL("expected a numeric error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("epoch 1, batch 1") != std::string::npos);
  }
}

TEST_CASE("cross_validate: fold arithmetic, unweighted mean, order invariance") {
  const auto c = encoded_corpus(9, 10);
  const ModelFactory factory = [&](std::uint64_t seed) {
    return Model<float>(small_a(c.vocab.size()), nullptr, seed);
  };
  const auto cv = cross_validate(c.examples, factory, quick(1), {3, 0, true});
  REQUIRE(cv.folds.size() == 3);
  double sum = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(cv.folds[i].fold == i);
    CHECK(cv.folds[i].test.example_count == 3);
    CHECK(cv.folds[i].train_size == 6);
    sum += cv.folds[i].test.accuracy;
  }
  CHECK(cv.mean_accuracy == doctest::Approx(sum / 3).epsilon(1e-15));

  CvOptions reversed;
  reversed.order = {2, 1, 0};
  const auto cv2 = cross_validate(c.examples, factory, quick(1), {3, 0, true}, reversed);
  CvOptions threaded;
  threaded.threads = 3;
  const auto cv3 = cross_validate(c.examples, factory, quick(1), {3, 0, true}, threaded);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(cv2.folds[i].test == cv.folds[i].test);
    CHECK(cv3.folds[i].test == cv.folds[i].test);
  }
  CvOptions bad;
  bad.order = {0, 0, 1};
  CHECK_THROWS_AS(cross_validate(c.examples, factory, quick(1), {3, 0, true}, bad), ConfigError);
}

TEST_CASE("sweep over 2,3,5 yields three rows") {
  const auto c = encoded_corpus(30, 11);
  const RegionModelFactory factory = [&](std::size_t k, std::uint64_t seed) {
    return Model<float>(small_a(c.vocab.size(), k), nullptr, seed);
  };
  const std::vector<std::size_t> sizes{2, 3, 5};
  const auto rows = sweep_region_sizes(c.examples, sizes, factory, quick(1), {3, 1, true});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].region_size == 2);
  CHECK(rows[2].region_size == 5);
  for (const auto& r : rows) CHECK(r.cv.folds.size() == 3);
}

TEST_CASE("compare_optimizers: paired rows, both fit the synthetic corpus") {
  const auto c = encoded_corpus(300, 12);
  const std::span<const LabeledExample> all(c.examples);
  const ModelFactory factory = [&](std::uint64_t seed) {
    return Model<float>(small_a(c.vocab.size()), nullptr, seed);
  };
  auto nadam = quick(15, 4);
  auto rms = nadam;
  rms.optimizer = OptimizerConfig::defaults(OptimizerKind::RmsProp);
  const auto cmp = compare_optimizers(all.subspan(0, 250), all.subspan(250), factory, nadam, rms);
  CHECK(cmp.runs[0].optimizer.kind == OptimizerKind::Nadam);
  CHECK(cmp.runs[1].optimizer.kind == OptimizerKind::RmsProp);
  CHECK_FALSE(cmp.data_hash.empty());
  CHECK(cmp.runs[0].train.accuracy >= 0.95);
  CHECK(cmp.runs[1].train.accuracy >= 0.95);

  auto other = rms;
  other.epochs = 1;
  CHECK_THROWS_AS(compare_optimizers(all.subspan(0, 250), all.subspan(250), factory, nadam, other),
                  ConfigError);
}

TEST_CASE("fingerprint depends on labels and ids") {
  auto c = encoded_corpus(20, 13);
  const auto f1 = fingerprint(c.examples);
  CHECK(f1.count == 20);
  CHECK(fingerprint(c.examples).hash == f1.hash);
  c.examples[3].label = c.examples[3].label == Polarity::Positive ? Polarity::Negative : Polarity::Positive;
  CHECK(fingerprint(c.examples).hash != f1.hash);
}
