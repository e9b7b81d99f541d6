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

#include <nlohmann/json.hpp>
#include <sstream>

#include "commands.hpp"
#include "run_config.hpp"
#include "support.hpp"
#include "synthetic.hpp"
#include "wordcnn/corpus.hpp"
#include "wordcnn/embed.hpp"
#include "wordcnn/errors.hpp"

using nlohmann::json;
using namespace wordcnn;
using wordcnn::testing::slurp;
using wordcnn::testing::spit;
using wordcnn::testing::TempDir;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void write_planted_tsv(const std::filesystem::path& path, std::size_t n, std::uint64_t seed) {
  std::ofstream out(path);
  for (const auto& r : wordcnn::testing::planted_bigram_corpus(n, seed)) {
    write_tsv_record(out, {r.label, r.label == Polarity::Positive ? 5 : 1, r.text});
  }
}

json small_config(const TempDir& dir) {
  return {{"model", "a"},
          {"data", (dir / "data.tsv").string()},
          {"max_len", 20},
          {"embedding_dim", 8},
          {"feature_maps", 8},
          {"batch_size", 16},
          {"epochs", 2},
          {"split", "fraction"},
          {"train_fraction", 0.8},
          {"seed", 5},
          {"checkpoint", (dir / "model.ckpt").string()},
          {"run_log", (dir / "runs.jsonl").string()}};
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run_cli({"train"}).code == cli::kExitUsage);
  CHECK(run_cli({"--help"}).code == cli::kExitOk);
}

TEST_CASE("prepare: drops 3-star reviews and reports counts") {
  TempDir dir("prepare");
  spit(dir / "reviews.json",
       R"({"stars":5,"text":"Great!","business_id":"b1"})" "\n"
       R"({"stars":3,"text":"meh","business_id":"b1"})" "\n"
       R"({"stars":1,"text":"Awful\tplace","business_id":"b2"})" "\n"
       R"({"stars":2,"text":"bad","business_id":"b3"})" "\n"
       R"({"stars":4,"text":"good","business_id":"b3"})" "\n");
  const auto r = run_cli({"prepare", "--reviews", (dir / "reviews.json").string(), "--out",
                          (dir / "out.tsv").string()});
  REQUIRE(r.code == 0);
  const auto stats = json::parse(r.out);
  CHECK(stats["lines"] == 5);
  CHECK(stats["dropped_3_star"] == 1);
  CHECK(stats["written"] == 4);
  CHECK(stats["filtered_by_city"] == 0);
  CHECK(slurp(dir / "out.tsv") == "1\t5\tGreat!\n0\t1\tAwful place\n0\t2\tbad\n1\t4\tgood\n");

  spit(dir / "business.json",
       R"({"business_id":"b1","city":"Las Vegas"})" "\n"
       R"({"business_id":"b2","city":"Toronto"})" "\n"
       R"({"business_id":"b3","city":"madison "})" "\n");
  const auto filtered = run_cli({"prepare", "--reviews", (dir / "reviews.json").string(), "--business",
                                 (dir / "business.json").string(), "--cities", "Las Vegas,Madison",
                                 "--out", (dir / "city.tsv").string()});
  REQUIRE(filtered.code == 0);
  CHECK(json::parse(filtered.out)["filtered_by_city"] == 1);
  CHECK(json::parse(filtered.out)["written"] == 3);

  CHECK(run_cli({"prepare", "--reviews", (dir / "missing.json").string(), "--out",
                 (dir / "x.tsv").string()})
            .code == cli::kExitUsage);
}

TEST_CASE("vocab: capacity, determinism, empty data") {
  TempDir dir("vocab");
  spit(dir / "d.tsv", "1\t5\tx y z y\n0\t1\tz z\n");
  const auto r = run_cli({"vocab", "--data", (dir / "d.tsv").string(), "--capacity", "2", "--out",
                          (dir / "v1.txt").string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "v1.txt") == "z\t3\ny\t2\n");
  CHECK(json::parse(r.out)["coverage"].get<double>() == doctest::Approx(5.0 / 6.0));
  run_cli({"vocab", "--data", (dir / "d.tsv").string(), "--capacity", "2", "--out", (dir / "v2.txt").string()});
  CHECK(slurp(dir / "v1.txt") == slurp(dir / "v2.txt"));
  spit(dir / "empty.tsv", "");
  CHECK(run_cli({"vocab", "--data", (dir / "empty.tsv").string(), "--out", (dir / "v3.txt").string()}).code ==
        cli::kExitUsage);
}

TEST_CASE("config: unknown keys are rejected before any work") {
  TempDir dir("config");
  auto cfg = small_config(dir);
  cfg["dropuot"] = 0.2;
  spit(dir / "c.json", cfg.dump());
  const auto r = run_cli({"train", "--config", (dir / "c.json").string()});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("dropuot") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "model.ckpt"));

  spit(dir / "ok.json", small_config(dir).dump());
  const auto o = run_cli({"train", "--config", (dir / "ok.json").string(), "--override", "dropuot=0.2"});
  CHECK(o.code == cli::kExitUsage);
}

TEST_CASE("config: per-model defaults and overrides") {
  const auto a = cli::resolve_config(json{{"model", "a"}}, {});
  CHECK(a.region_size == 2);
  CHECK(a.feature_maps == 300);
  CHECK(a.dropout == 0.2);
  CHECK(a.train.batch_size == 500);
  CHECK(a.train.epochs == 3);
  CHECK(a.vocab_capacity == 100000);
  CHECK(a.max_len == 1000);
  const auto b = cli::resolve_config(json{{"model", "b"}}, {});
  CHECK(b.region_size == 5);
  CHECK(b.feature_maps == 128);
  CHECK(b.pools == std::vector<std::size_t>{5, 5, 35});
  CHECK(b.dropout == 0.5);
  CHECK(b.train.batch_size == 128);
  CHECK(b.train.epochs == 2);
  const auto o = cli::resolve_config(json{{"model", "a"}}, {cli::parse_override("epochs=7"),
                                                           cli::parse_override("optimizer=rmsprop")});
  CHECK(o.train.epochs == 7);
  CHECK(o.train.optimizer.kind == OptimizerKind::RmsProp);
  CHECK(o.train.optimizer.learning_rate == 0.001);
  CHECK_THROWS_AS(cli::resolve_config(json{{"embeddings", "glove_text"}}, {}), ConfigError);
  CHECK_THROWS_AS(cli::parse_override("novalue"), ConfigError);
}

TEST_CASE("train, eval, predict and the run log") {
  TempDir dir("train");
  write_planted_tsv(dir / "data.tsv", 300, 1);
  auto cfg = small_config(dir);
  cfg["epochs"] = 12;
  spit(dir / "c.json", cfg.dump());
  const auto t = run_cli({"train", "--config", (dir / "c.json").string()});
  REQUIRE(t.code == 0);
  const auto result = json::parse(t.out);
  CHECK(result["history"].size() == 12);
  CHECK(result["metrics"].contains("test"));
  CHECK(std::filesystem::exists(dir / "model.ckpt.vocab"));

  std::ifstream log(dir / "runs.jsonl");
  std::string line;
  REQUIRE(std::getline(log, line));
  const auto entry = json::parse(line);
  for (const char* key : {"timestamp", "config_hash", "command", "dataset", "metrics", "history", "config"}) {
    CHECK(entry.contains(key));
  }
  CHECK(entry["config"]["epochs"] == 12);
  CHECK(entry["dataset"]["count"] == 300);

  const auto e = run_cli({"eval", "--checkpoint", (dir / "model.ckpt").string(), "--data",
                          (dir / "data.tsv").string()});
  REQUIRE(e.code == 0);
  const auto metrics = json::parse(e.out);
  CHECK(metrics["example_count"] == 300);
  CHECK(metrics["accuracy"].get<double>() > 0.9);
  CHECK(run_cli({"eval", "--checkpoint", (dir / "model.ckpt").string(), "--data", (dir / "data.tsv").string()})
            .out == e.out);

  const auto pos = run_cli({"predict", "--checkpoint", (dir / "model.ckpt").string(), "--text",
                            "the food alpha beta again"});
  REQUIRE(pos.code == 0);
  const auto p = json::parse(pos.out);
  CHECK(p["label"] == "positive");
  CHECK(p["p_negative"].get<double>() + p["p_positive"].get<double>() == doctest::Approx(1.0));
  const auto neg = run_cli({"predict", "--checkpoint", (dir / "model.ckpt").string(), "--text",
                            "the food beta alpha again"});
  CHECK(json::parse(neg.out)["label"] == "negative");

  spit(dir / "bad.ckpt", "WCNN garbage");
  CHECK(run_cli({"eval", "--checkpoint", (dir / "bad.ckpt").string(), "--data", (dir / "data.tsv").string(),
                 "--vocab", (dir / "model.ckpt.vocab").string()})
            .code == cli::kExitUsage);
  spit(dir / "short.vocab", "alpha\t1\n");
  CHECK(run_cli({"eval", "--checkpoint", (dir / "model.ckpt").string(), "--data", (dir / "data.tsv").string(),
                 "--vocab", (dir / "short.vocab").string()})
            .code == cli::kExitUsage);
}

TEST_CASE("train: divergence exits with 3") {
  TempDir dir("diverge");
  write_planted_tsv(dir / "data.tsv", 64, 2);
  auto cfg = small_config(dir);
  cfg["optimizer"] = "sgd";
  cfg["learning_rate"] = 1e38;
  cfg["epochs"] = 3;
  spit(dir / "c.json", cfg.dump());
  const auto r = run_cli({"train", "--config", (dir / "c.json").string()});
  CHECK(r.code == cli::kExitNumeric);
  CHECK(r.err.find("non-finite") != std::string::npos);
}

TEST_CASE("train is bitwise reproducible") {
  TempDir dir("determinism");
  write_planted_tsv(dir / "data.tsv", 120, 3);
  auto cfg = small_config(dir);
  spit(dir / "c.json", cfg.dump());
  REQUIRE(run_cli({"train", "--config", (dir / "c.json").string()}).code == 0);
  const auto first = slurp(dir / "model.ckpt");
  REQUIRE(run_cli({"train", "--config", (dir / "c.json").string()}).code == 0);
  CHECK(slurp(dir / "model.ckpt") == first);
  REQUIRE(run_cli({"train", "--config", (dir / "c.json").string(), "--override", "seed=6"}).code == 0);
  CHECK(slurp(dir / "model.ckpt") != first);
}

TEST_CASE("cv, sweep and compare") {
  TempDir dir("cv");
  write_planted_tsv(dir / "data.tsv", 90, 4);
  auto cfg = small_config(dir);
  cfg.erase("split");
  cfg.erase("train_fraction");
  spit(dir / "c.json", cfg.dump());
  const auto a = run_cli({"cv", "--config", (dir / "c.json").string(), "--folds", "3"});
  REQUIRE(a.code == 0);
  const auto b = run_cli({"cv", "--config", (dir / "c.json").string(), "--folds", "3", "--fold-order", "1,2,0"});
  REQUIRE(b.code == 0);
  CHECK(json::parse(a.out)["folds"] == json::parse(b.out)["folds"]);
  CHECK(json::parse(a.out)["folds"].size() == 3);

  const auto s = run_cli({"sweep", "--config", (dir / "c.json").string(), "--region-sizes", "1,2,3", "--table",
                          (dir / "table.tsv").string()});
  REQUIRE(s.code == 0);
  CHECK(json::parse(s.out)["rows"].size() == 3);
  CHECK(slurp(dir / "table.tsv").rfind("region_size\tmean_accuracy\tstddev_accuracy\n", 0) == 0);

  auto split_cfg = small_config(dir);
  spit(dir / "s.json", split_cfg.dump());
  const auto c = run_cli({"compare", "--config", (dir / "s.json").string(), "--optimizers", "nadam,rmsprop"});
  REQUIRE(c.code == 0);
  const auto rows = json::parse(c.out)["rows"];
  REQUIRE(rows.size() == 2);
  CHECK(rows[0]["data_hash"] == rows[1]["data_hash"]);
  CHECK(rows[0]["optimizer"] == "nadam");
  CHECK(rows[1]["learning_rate"] == 0.001);
  CHECK(run_cli({"compare", "--config", (dir / "s.json").string(), "--optimizers", "nadam"}).code ==
        cli::kExitUsage);
}

TEST_CASE("gradcheck and describe") {
  const auto g = run_cli({"gradcheck", "--model", "b", "--tolerance", "1e-4"});
  REQUIRE(g.code == 0);
  const auto report = json::parse(g.out);
  CHECK(report["result"] == "PASS");
  CHECK(report["max_relative_error"].get<double>() < 1e-4);
  CHECK(run_cli({"gradcheck", "--model", "z"}).code == cli::kExitUsage);

  const auto d = run_cli({"describe", "--model", "b", "--embedding-dim", "300"});
  REQUIRE(d.code == 0);
  const auto desc = json::parse(d.out);
  CHECK(desc["sequence_lengths"] == json::array({1000, 996, 199, 195, 39, 35, 1}));
  CHECK(desc["chain"].get<std::string>().rfind("1000 -> 996 -> 199 -> 195 -> 39 -> 35 -> 1", 0) == 0);
  CHECK(run_cli({"describe", "--model", "b", "--max-len", "100"}).code == cli::kExitUsage);
}

TEST_CASE("inspect-vectors") {
  TempDir dir("vectors");
  WordVectorTable t(3);
  t.add("a", std::vector<float>{1, 2, 3});
  t.add("b", std::vector<float>{4, 5, 6});
  std::ostringstream bin;
  write_binary_vectors(bin, t);
  spit(dir / "v.bin", bin.str());
  const auto r = run_cli({"inspect-vectors", "--path", (dir / "v.bin").string(), "--format", "word2vec_binary"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "format word2vec_binary\ncount 2\ndimension 3\nskipped 0\n");
  spit(dir / "dup.txt", "a 1\nb 2\na 3\n");
  const auto d = run_cli({"inspect-vectors", "--path", (dir / "dup.txt").string(), "--format", "glove_text"});
  CHECK(d.out == "format glove_text\ncount 2\ndimension 1\nskipped 1\n");
  CHECK(run_cli({"inspect-vectors", "--path", (dir / "dup.txt").string(), "--format", "bogus"}).code ==
        cli::kExitUsage);
}
