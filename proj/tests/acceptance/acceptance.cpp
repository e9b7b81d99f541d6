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

// Acceptance suite: one [PASS]/[FAIL]/[SKIP] line per criterion. Exits
// non-zero when any criterion fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "support.hpp"
#include "synthetic.hpp"
#include "wordcnn/checkpoint.hpp"
#include "wordcnn/corpus.hpp"
#include "wordcnn/embed.hpp"
#include "wordcnn/layers.hpp"
#include "wordcnn/model.hpp"
#include "wordcnn/text.hpp"
#include "wordcnn/train.hpp"

using nlohmann::json;
using namespace wordcnn;
using wordcnn::testing::slurp;
using wordcnn::testing::spit;
using wordcnn::testing::TempDir;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

Outcome fail(std::string d) { return {Verdict::Fail, std::move(d)}; }
Outcome check(bool ok, std::string d) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(d)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// --- criteria --------------------------------------------------------------

Outcome gradient_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;
  for (const char* model : {"a", "b"}) {
    const auto r = cli_run({"gradcheck", "--model", model, "--tolerance", "1e-4"});
    if (r.code != 0 && r.code != cli::kExitNumeric) return fail(std::string("gradcheck exited ") + std::to_string(r.code));
    const auto report = json::parse(r.out);
    const double err = report["max_relative_error"].get<double>();
    ok = ok && r.code == 0 && report["result"] == "PASS" && err < 1e-4;
    detail += std::string(detail.empty() ? "" : ", ") + "model " + model + " max rel err " + fmt(err);
  }
  const double secs = seconds_since(t0);
  return check(ok && secs < 60.0, detail + ", " + fmt(secs) + " s");
}

Outcome convolution_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20240601);
  std::size_t mismatches = 0;
  for (int round = 0; round < 1000; ++round) {
    const std::size_t len = 1 + rng.below(32), dim = 1 + rng.below(16), fc = 1 + rng.below(8);
    const std::size_t k = 1 + rng.below(len);
    Tensor<float> in({len, dim}), w({fc, k, dim}), b({fc});
    for (auto& v : in.storage()) v = static_cast<float>(rng.uniform(-2, 2));
    for (auto& v : w.storage()) v = static_cast<float>(rng.uniform(-1, 1));
    for (auto& v : b.storage()) v = static_cast<float>(rng.uniform(-1, 1));
    const auto out = conv1d_forward(in, w, b);
    // Naive triple loop: zero accumulator, j outer, d inner, then bias.
    for (std::size_t t = 0; t + k <= len; ++t) {
      for (std::size_t f = 0; f < fc; ++f) {
        float acc = 0.0f;
        for (std::size_t j = 0; j < k; ++j) {
          for (std::size_t d = 0; d < dim; ++d) acc += in[(t + j) * dim + d] * w[(f * k + j) * dim + d];
        }
        const float expect = b[f] + acc;
        if (std::memcmp(&expect, &out[t * fc + f], sizeof(float)) != 0) ++mismatches;
      }
    }
  }
  const double secs = seconds_since(t0);
  return check(mismatches == 0 && secs < 10.0,
               "1000 shapes, " + std::to_string(mismatches) + " inexact outputs, " + fmt(secs) + " s");
}

Outcome softmax_criterion() {
  Rng rng(77);
  double worst_fd = 0.0, worst_sum = 0.0;
  bool analytic_ok = true;
  for (int round = 0; round < 2000; ++round) {
    const std::size_t c = 2 + rng.below(6);
    std::vector<double> z(c);
    const double scale = round % 2 == 0 ? 1000.0 : 4.0;
    for (auto& v : z) v = rng.uniform(-scale, scale);
    if (round % 7 == 0) z[0] = 1000.0, z[1] = -1000.0;
    const std::size_t label = rng.below(c);
    const auto s = softmax_xent<double>(z, label);
    double sum = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      sum += s.probs[i];
      if (s.grad_logits[i] != s.probs[i] - (i == label ? 1.0 : 0.0)) analytic_ok = false;
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    if (scale > 100.0) continue;
    for (std::size_t i = 0; i < c; ++i) {
      auto p = z, m = z;
      p[i] += 1e-5;
      m[i] -= 1e-5;
      const double n = (softmax_xent<double>(p, label).loss - softmax_xent<double>(m, label).loss) / 2e-5;
      const double a = s.grad_logits[i];
      worst_fd = std::max(worst_fd, std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8}));
    }
  }
  return check(analytic_ok && worst_fd < 1e-6 && worst_sum <= 1e-6,
               "max FD rel err " + fmt(worst_fd) + ", max |sum-1| " + fmt(worst_sum));
}

Outcome shape_reproduction() {
  const auto trace = shape_trace(model_b_config(100000, 300));
  const auto lengths = sequence_lengths(trace);
  const std::vector<std::size_t> expected{1000, 996, 199, 195, 39, 35, 1};
  std::string chain;
  for (std::size_t l : lengths) chain += (chain.empty() ? "" : "->") + std::to_string(l);
  return check(lengths == expected, chain);
}

Outcome overfit() {
  const auto t0 = std::chrono::steady_clock::now();
  ModelBOptions opts;
  opts.max_len = 50;
  opts.feature_maps = 32;
  opts.pools = {2, 2, 0};
  opts.global_last = true;
  opts.dense_hidden = 32;
  const auto cfg = model_b_config(50, 16, opts);
  // Random token sequences with random labels: only memorization fits them.
  Rng rng(64);
  std::vector<LabeledExample> examples;
  for (int i = 0; i < 64; ++i) {
    LabeledExample ex{std::vector<TokenId>(cfg.max_len, kPadId), rng.below(2) ? Polarity::Positive : Polarity::Negative};
    const std::size_t n = 10 + rng.below(41);
    for (std::size_t j = 0; j < n; ++j) ex.token_ids[j] = static_cast<TokenId>(2 + rng.below(cfg.vocab_size - 2));
    examples.push_back(std::move(ex));
  }
  Model<float> model(cfg, nullptr, 3);
  TrainConfig tc;
  tc.batch_size = 16;
  tc.epochs = 50;
  tc.seed = 3;
  fit(model, examples, {}, tc);
  const auto m = evaluate(model, examples);
  const double secs = seconds_since(t0);
  return check(m.accuracy == 1.0 && secs < 120.0,
               "train accuracy " + fmt(m.accuracy) + " after 50 epochs, " + fmt(secs) + " s");
}

Outcome planted_signal() {
  const auto reviews = wordcnn::testing::planted_bigram_corpus(2000, 2026);
  // Oracle: exact bigram lookup.
  std::size_t oracle_hits = 0;
  for (const auto& r : reviews) {
    const auto toks = tokenize(r.text);
    std::optional<Polarity> guess;
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
      if (toks[i] == "alpha" && toks[i + 1] == "beta") guess = Polarity::Positive;
      if (toks[i] == "beta" && toks[i + 1] == "alpha") guess = Polarity::Negative;
    }
    if (guess == r.label) ++oracle_hits;
  }
  if (oracle_hits != reviews.size()) return fail("bigram oracle scored " + std::to_string(oracle_hits));

  std::vector<std::vector<std::string>> tokens;
  for (const auto& r : reviews) tokens.push_back(tokenize(r.text));
  SplitPlan plan;
  plan.train_fraction = 0.8;
  plan.seed = 1;
  const auto parts = split(reviews.size(), plan);
  VocabularyBuilder builder;
  for (std::size_t i : parts.train) builder.add(tokens[i]);
  const auto vocab = builder.build(1000);
  std::vector<LabeledExample> examples;
  for (std::size_t i = 0; i < reviews.size(); ++i) examples.push_back({encode(tokens[i], vocab, 24), reviews[i].label});

  std::map<std::size_t, double> held_out;
  for (std::size_t region : {1, 2}) {
    Model<float> model(model_a_config(vocab.size(), 16, {region, 32, 2, 0.2, 24}), nullptr, 11);
    TrainConfig tc;
    tc.batch_size = 32;
    tc.epochs = 10;
    tc.seed = 11;
    fit(model, examples, parts.train, {}, tc);
    held_out[region] = evaluate(model, examples, parts.test).accuracy;
  }
  return check(held_out[2] >= 0.95 && held_out[2] > held_out[1],
               "oracle 100%, held-out accuracy k=2 " + fmt(held_out[2]) + ", k=1 " + fmt(held_out[1]));
}

std::string random_token(Rng& rng) {
  static const char* const pieces[] = {"a", "k", "Z", "3", "é", "ø", "ж", "語", "-", "'"};
  std::string t;
  const std::size_t n = 1 + rng.below(10);
  for (std::size_t i = 0; i < n; ++i) t += pieces[rng.below(std::size(pieces))];
  return t;
}

WordVectorTable random_table(Rng& rng, bool arbitrary_bits) {
  WordVectorTable table(1 + rng.below(16));
  const std::size_t n = 1 + rng.below(24);
  std::vector<float> v(table.dimension());
  while (table.size() < n) {
    for (auto& x : v) {
      if (arbitrary_bits) {
        do {
          x = std::bit_cast<float>(static_cast<std::uint32_t>(rng.next_u64()));
        } while (!std::isfinite(x));
      } else {
        x = static_cast<float>(rng.uniform(-1, 1));
      }
    }
    table.add(random_token(rng), v);
  }
  return table;
}

Outcome format_fidelity() {
  Rng rng(500);
  std::size_t bin_bad = 0, text_bad = 0, vocab_bad = 0, ckpt_bad = 0;
  for (int i = 0; i < 500; ++i) {
    auto table = random_table(rng, true);
    table.binary_newlines = rng.below(2) == 0;
    std::ostringstream a;
    write_binary_vectors(a, table);
    std::istringstream in(a.str());
    std::ostringstream b;
    write_binary_vectors(b, parse_binary_vectors(in));
    bin_bad += a.str() != b.str();
  }
  for (int i = 0; i < 500; ++i) {
    const auto table = random_table(rng, rng.below(2) == 0);
    const bool header = rng.below(2) == 0;
    std::ostringstream a;
    write_text_vectors(a, table, header);
    std::istringstream in(a.str());
    std::ostringstream b;
    write_text_vectors(b, parse_text_vectors(in, header), header);
    text_bad += a.str() != b.str();
  }
  for (int i = 0; i < 500; ++i) {
    std::vector<std::vector<std::string>> streams(1 + rng.below(5));
    for (auto& s : streams) {
      const std::size_t n = rng.below(40);
      for (std::size_t j = 0; j < n; ++j) s.push_back(random_token(rng));
    }
    const auto vocab = build_vocabulary(streams, 1 + rng.below(50));
    std::ostringstream a;
    write_vocabulary(a, vocab);
    std::istringstream in(a.str());
    std::ostringstream b;
    write_vocabulary(b, read_vocabulary(in));
    vocab_bad += a.str() != b.str();
  }
  for (int i = 0; i < 500; ++i) {
    ModelConfig c;
    if (rng.below(2) == 0) {
      c = model_a_config(3 + rng.below(40), 1 + rng.below(8),
                         {1 + rng.below(3), 1 + rng.below(8), 1 + rng.below(2), 0.2, 8 + rng.below(16)});
    } else {
      ModelBOptions o;
      o.max_len = 20 + rng.below(20);
      o.region_size = 1 + rng.below(3);
      o.feature_maps = 1 + rng.below(6);
      o.pools = {2, 2, 0};
      o.global_last = true;
      o.dense_hidden = 1 + rng.below(6);
      c = model_b_config(3 + rng.below(40), 1 + rng.below(8), o);
    }
    Model<float> m(c, nullptr, rng.next_u64());
    const auto a = checkpoint_bytes(m);
    ckpt_bad += checkpoint_bytes(load_checkpoint<float>(a)) != a;
  }
  return check(bin_bad + text_bad + vocab_bad + ckpt_bad == 0,
               "500 each; mismatches binary " + std::to_string(bin_bad) + ", text " + std::to_string(text_bad) +
                   ", vocab " + std::to_string(vocab_bad) + ", checkpoint " + std::to_string(ckpt_bad));
}

void write_planted_tsv(const std::filesystem::path& path, std::size_t n, std::uint64_t seed) {
  std::ofstream out(path);
  for (const auto& r : wordcnn::testing::planted_bigram_corpus(n, seed)) {
    write_tsv_record(out, {r.label, r.label == Polarity::Positive ? 5 : 1, r.text});
  }
}

Outcome determinism() {
  TempDir dir("acceptance-determinism");
  write_planted_tsv(dir / "data.tsv", 400, 8);
  json cfg = {{"model", "a"},          {"data", (dir / "data.tsv").string()},
              {"max_len", 24},         {"embedding_dim", 12},
              {"feature_maps", 16},    {"batch_size", 32},
              {"epochs", 3},           {"split", "fraction"},
              {"train_fraction", 0.8}, {"seed", 42},
              {"checkpoint", (dir / "run.ckpt").string()}};
  spit(dir / "cfg.json", cfg.dump());
  if (cli_run({"train", "--config", (dir / "cfg.json").string()}).code != 0) return fail("first train run failed");
  const auto first = slurp(dir / "run.ckpt");
  if (cli_run({"train", "--config", (dir / "cfg.json").string()}).code != 0) return fail("second train run failed");
  const bool same_ckpt = slurp(dir / "run.ckpt") == first;

  cfg.erase("split");
  cfg.erase("train_fraction");
  spit(dir / "cv.json", cfg.dump());
  const auto natural = cli_run({"cv", "--config", (dir / "cv.json").string(), "--folds", "3"});
  const auto permuted = cli_run({"cv", "--config", (dir / "cv.json").string(), "--folds", "3", "--fold-order", "2,0,1"});
  if (natural.code != 0 || permuted.code != 0) return fail("cv run failed");
  const bool same_cv = json::parse(natural.out)["folds"] == json::parse(permuted.out)["folds"];
  return check(same_ckpt && same_cv, std::string("checkpoints ") + (same_ckpt ? "identical" : "differ") +
                                         ", cv folds under order 2,0,1 " + (same_cv ? "identical" : "differ"));
}

Outcome pipeline_counts() {
  TempDir dir("acceptance-pipeline");
  Rng rng(4100);
  std::size_t threes = 0, total = 14000;
  {
    std::ofstream out(dir / "reviews.json");
    for (std::size_t i = 0; i < total; ++i) {
      const int stars = 1 + static_cast<int>(rng.below(5));
      threes += stars == 3;
      out << json{{"review_id", "r" + std::to_string(i)}, {"business_id", "b" + std::to_string(i % 37)},
                  {"stars", stars}, {"text", "review number " + std::to_string(i)}}
                 .dump()
          << '\n';
    }
  }
  const auto r = cli_run({"prepare", "--reviews", (dir / "reviews.json").string(), "--out", (dir / "out.tsv").string()});
  if (r.code != 0) return fail("prepare failed: " + r.err);
  const auto stats = json::parse(r.out);
  std::ifstream tsv_in(dir / "out.tsv");
  const auto tsv = read_tsv(tsv_in);
  bool no_three = true;
  for (const auto& rec : tsv.records) no_three = no_three && rec.stars != 3;
  const bool drop_ok = stats["dropped_3_star"] == threes && tsv.records.size() == total - threes && no_three;

  SplitPlan plan;
  plan.mode = SplitMode::FixedCounts;
  plan.train_count = 8200;
  plan.validation_count = 2000;
  plan.test_count = 900;
  plan.seed = 7;
  const auto parts = split(tsv.records.size(), plan);
  const bool split_ok = parts.train.size() == 8200 && parts.validation.size() == 2000 && parts.test.size() == 900;
  return check(drop_ok && split_ok,
               std::to_string(threes) + " of " + std::to_string(total) + " records were 3-star and dropped, " +
                   std::to_string(tsv.records.size()) + " written; split " + std::to_string(parts.train.size()) +
                   "/" + std::to_string(parts.validation.size()) + "/" + std::to_string(parts.test.size()));
}

Outcome yelp_scale() {
  const char* tsv = std::getenv("WORDCNN_YELP_TSV");
  const char* vec = std::getenv("WORDCNN_FASTTEXT_VEC");
  if (tsv == nullptr || vec == nullptr) {
    return {Verdict::Skip, "needs WORDCNN_YELP_TSV and WORDCNN_FASTTEXT_VEC (prepared Yelp TSV, fastText .vec)"};
  }
  TempDir dir("acceptance-yelp");
  const json cfg = {{"model", "a"},
                    {"data", tsv},
                    {"embeddings", "fasttext_text"},
                    {"embeddings_path", vec},
                    {"split", "fixed"},
                    {"train_count", 82000},
                    {"validation_count", 20000},
                    {"test_count", 9000},
                    {"checkpoint", (dir / "yelp.ckpt").string()}};
  spit(dir / "cfg.json", cfg.dump());
  const auto r = cli_run({"train", "--config", (dir / "cfg.json").string()});
  if (r.code != 0) return fail("train exited " + std::to_string(r.code) + ": " + r.err);
  const double acc = json::parse(r.out)["metrics"]["test"]["accuracy"].get<double>() * 100.0;
  return check(std::abs(acc - 94.73) <= 2.0, "test accuracy " + fmt(acc) + "% (target 94.73 +/- 2.0)");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient correctness", gradient_correctness},
      {"convolution oracle", convolution_oracle},
      {"softmax cross-entropy", softmax_criterion},
      {"shape reproduction", shape_reproduction},
      {"overfit", overfit},
      {"planted-signal generalization", planted_signal},
      {"format fidelity", format_fidelity},
      {"determinism", determinism},
      {"data pipeline counts", pipeline_counts},
      {"yelp-scale accuracy", yelp_scale},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.verdict == Verdict::Pass ? "[PASS]" : o.verdict == Verdict::Fail ? "[FAIL]" : "[SKIP]";
    failures += o.verdict == Verdict::Fail;
    std::cout << tag << ' ' << name << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
