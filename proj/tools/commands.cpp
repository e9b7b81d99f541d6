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

#include "commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "run_config.hpp"
#include "wordcnn/checkpoint.hpp"
#include "wordcnn/corpus.hpp"
#include "wordcnn/embed.hpp"
#include "wordcnn/errors.hpp"
#include "wordcnn/gradcheck.hpp"
#include "wordcnn/hash.hpp"
#include "wordcnn/model.hpp"
#include "wordcnn/text.hpp"
#include "wordcnn/train.hpp"

namespace wordcnn::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::size_t thread_count() {
  const char* env = std::getenv("WORDCNN_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || n < 1) {
    throw ConfigError("WORDCNN_THREADS must be a positive integer");
  }
  return static_cast<std::size_t>(n);
}

std::ifstream open_input(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(std::string("cannot read ") + what + " " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path, const char* what) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(std::string("cannot write ") + what + " " + path.string());
  return out;
}

fs::path vocab_sidecar(const fs::path& checkpoint) {
  fs::path p = checkpoint;
  p += ".vocab";
  return p;
}

json metrics_json(const Metrics& m) {
  return {{"accuracy", m.accuracy},
          {"loss", m.loss},
          {"example_count", m.example_count},
          {"confusion", {{m.confusion[0][0], m.confusion[0][1]}, {m.confusion[1][0], m.confusion[1][1]}}}};
}

json history_json(const FitResult& fit) {
  json epochs = json::array();
  for (const auto& rec : fit.history) {
    json e = {{"epoch", rec.epoch}, {"train", metrics_json(rec.train)}};
    if (rec.validation) e["validation"] = metrics_json(*rec.validation);
    epochs.push_back(std::move(e));
  }
  return epochs;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void append_run_log(const RunConfig& rc, const std::string& command, const DatasetFingerprint& data,
                    json metrics, json history) {
  if (rc.run_log.empty()) return;
  const std::string canonical = rc.effective.dump();
  Fnv1a64 h;
  h.update(canonical);
  const json entry = {{"timestamp", utc_timestamp()},
                      {"config_hash", h.hex()},
                      {"command", command},
                      {"config", rc.effective},
                      {"dataset", {{"count", data.count}, {"hash", data.hash}}},
                      {"metrics", std::move(metrics)},
                      {"history", std::move(history)}};
  std::ofstream log(rc.run_log, std::ios::app);
  if (!log) throw InputError("cannot append to run log " + rc.run_log.string());
  log << entry.dump() << '\n';
}

// --- Data preparation shared by train / cv / sweep / compare ----------------

struct Workspace {
  Vocabulary vocab;
  std::vector<LabeledExample> examples;
  SplitResult split;  // indices into `examples`
  std::size_t malformed = 0;
  std::size_t no_tokens = 0;
  std::optional<WordVectorTable> table;
  std::size_t embedding_dim = 100;
  ModelConfig model;
};

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

ModelConfig model_config_for(const RunConfig& rc, std::size_t vocab_size, std::size_t dim,
                             std::size_t region_size) {
  ModelConfig c;
  if (rc.model == ModelVariant::ModelA) {
    ModelAOptions a;
    a.region_size = region_size;
    a.feature_maps = rc.feature_maps;
    a.pool = rc.pools.front();
    a.dropout = rc.dropout;
    a.max_len = rc.max_len;
    c = model_a_config(vocab_size, dim, a);
  } else {
    ModelBOptions b;
    b.region_size = region_size;
    b.feature_maps = rc.feature_maps;
    b.pools = rc.pools;
    b.global_last = rc.global_pool;
    b.dropout = rc.dropout;
    b.dense_hidden = rc.dense_hidden;
    b.max_len = rc.max_len;
    c = model_b_config(vocab_size, dim, b);
  }
  c.global_pool = rc.global_pool;
  c.dense_hidden = rc.dense_hidden;
  c.embeddings_trainable = rc.embeddings_trainable;
  return c;
}

Workspace prepare_workspace(const RunConfig& rc, std::ostream& err) {
  if (rc.data.empty()) throw ConfigError("config key 'data' is required");
  Workspace ws;
  auto in = open_input(rc.data, "dataset");
  auto tsv = read_tsv(in);
  ws.malformed = tsv.malformed;

  std::vector<TsvRecord> records;
  std::vector<std::vector<std::string>> tokens;
  for (auto& r : tsv.records) {
    auto t = tokenize(r.text);
    if (t.empty()) {
      ++ws.no_tokens;
      continue;
    }
    tokens.push_back(std::move(t));
    records.push_back(std::move(r));
  }
  if (records.empty()) throw InputError("dataset " + rc.data.string() + " has no usable examples");

  switch (rc.split) {
    case SplitKind::None:
      ws.split.train = all_indices(records.size());
      break;
    case SplitKind::Fraction:
    case SplitKind::Fixed:
      ws.split = split(records.size(), rc.split_plan);
      break;
  }

  if (!rc.vocab.empty()) {
    auto vin = open_input(rc.vocab, "vocabulary");
    ws.vocab = read_vocabulary(vin);
  } else {
    VocabularyBuilder builder;
    for (std::size_t i : ws.split.train) builder.add(tokens[i]);
    ws.vocab = builder.build(rc.vocab_capacity);
  }

  ws.examples.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    ws.examples.push_back({encode(tokens[i], ws.vocab, rc.max_len), records[i].label});
  }

  if (rc.embeddings != EmbeddingSource::Random) {
    const auto format = parse_vector_format(to_string(rc.embeddings));
    ws.table = load_vectors(rc.embeddings_path, *format);
    err << "loaded " << ws.table->size() << " vectors of dimension " << ws.table->dimension()
        << " from " << rc.embeddings_path.string() << '\n';
  }
  if (rc.embedding_dim) {
    ws.embedding_dim = *rc.embedding_dim;
  } else if (ws.table) {
    ws.embedding_dim = ws.table->dimension();
  }
  ws.model = model_config_for(rc, ws.vocab.size(), ws.embedding_dim, rc.region_size);
  shape_trace(ws.model);
  err << "examples: " << ws.examples.size() << " (train " << ws.split.train.size() << ", validation "
      << ws.split.validation.size() << ", test " << ws.split.test.size() << "), vocabulary "
      << ws.vocab.size() << ", skipped " << ws.malformed << " malformed and " << ws.no_tokens
      << " token-less lines\n";
  return ws;
}

RegionModelFactory region_factory(const RunConfig& rc, const Workspace& ws) {
  return [&rc, &ws](std::size_t region_size, std::uint64_t seed) {
    const ModelConfig cfg = model_config_for(rc, ws.vocab.size(), ws.embedding_dim, region_size);
    const EmbeddingMatrix m = assemble_matrix(ws.vocab, ws.table ? &*ws.table : nullptr,
                                              ws.embedding_dim, seed, rc.embeddings_trainable);
    return Model<float>(cfg, &m, seed);
  };
}

std::vector<LabeledExample> gather(const std::vector<LabeledExample>& all,
                                   const std::vector<std::size_t>& idx) {
  std::vector<LabeledExample> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

RunConfig load_run_config(const std::string& config_path, const std::vector<std::string>& overrides) {
  json doc = config_path.empty() ? json::object() : read_config_file(config_path);
  std::vector<std::pair<std::string, json>> parsed;
  for (const auto& o : overrides) parsed.push_back(parse_override(o));
  return resolve_config(std::move(doc), parsed);
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(item, &pos);
      if (pos != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad ") + what + " list '" + text + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string("empty ") + what + " list");
  return out;
}

// --- Commands ---------------------------------------------------------------

struct PrepareArgs {
  std::string reviews, business, cities, out;
};

int cmd_prepare(const PrepareArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<BusinessSet> allowlist;
  std::size_t business_malformed = 0;
  if (!a.cities.empty()) {
    if (a.business.empty()) throw ConfigError("--cities requires --business");
    std::vector<std::string> cities;
    std::stringstream ss(a.cities);
    for (std::string c; std::getline(ss, c, ',');) cities.push_back(c);
    auto bin = open_input(a.business, "business file");
    auto result = build_city_allowlist(bin, cities);
    business_malformed = result.malformed;
    allowlist = std::move(result.business_ids);
    err << "businesses in selected cities: " << allowlist->size() << '\n';
  }
  auto rin = open_input(a.reviews, "review file");
  auto tsv = open_output(a.out, "dataset");
  ReviewReader reader(rin, allowlist ? &*allowlist : nullptr);
  std::size_t dropped = 0;
  std::size_t written = 0;
  while (auto review = reader.next()) {
    const auto label = map_label(review->stars);
    if (!label) {
      ++dropped;
      continue;
    }
    write_tsv_record(tsv, {*label, review->stars, review->text});
    ++written;
  }
  const auto& s = reader.stats();
  out << json{{"lines", s.lines},
              {"filtered_by_city", s.filtered},
              {"dropped_3_star", dropped},
              {"malformed", s.malformed},
              {"business_malformed", business_malformed},
              {"written", written}}
             .dump()
      << '\n';
  return kExitOk;
}

int cmd_vocab(const std::string& data, std::size_t capacity, const std::string& out_path,
              std::ostream& out) {
  auto in = open_input(data, "dataset");
  const auto tsv = read_tsv(in);
  if (tsv.records.empty()) throw InputError("dataset " + data + " is empty");
  VocabularyBuilder builder;
  for (const auto& r : tsv.records) builder.add(tokenize(r.text));
  const Vocabulary vocab = builder.build(capacity);
  auto vout = open_output(out_path, "vocabulary");
  write_vocabulary(vout, vocab);
  std::uint64_t retained = 0;
  for (auto id = kFirstCorpusId; id < static_cast<TokenId>(vocab.size()); ++id) retained += vocab.frequency(id);
  const double coverage =
      builder.total_tokens() == 0 ? 0.0 : static_cast<double>(retained) / static_cast<double>(builder.total_tokens());
  out << json{{"size", vocab.size()},
              {"tokens", vocab.size() - 2},
              {"distinct_tokens", builder.distinct_tokens()},
              {"coverage", coverage}}
             .dump()
      << '\n';
  return kExitOk;
}

int cmd_train(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  if (rc.checkpoint.empty()) throw ConfigError("config key 'checkpoint' is required for train");
  const std::size_t threads = thread_count();
  Workspace ws = prepare_workspace(rc, err);
  const auto factory = region_factory(rc, ws);
  Model<float> model = factory(rc.region_size, rc.train.seed);

  const FitResult fit_result = fit(model, ws.examples, ws.split.train, ws.split.validation, rc.train);
  for (const auto& rec : fit_result.history) {
    err << "epoch " << rec.epoch << ": train acc " << rec.train.accuracy << " loss " << rec.train.loss;
    if (rec.validation) err << ", validation acc " << rec.validation->accuracy;
    err << '\n';
  }

  json metrics = json::object();
  metrics["train"] = metrics_json(evaluate(model, ws.examples, ws.split.train, threads));
  if (!ws.split.validation.empty()) {
    metrics["validation"] = metrics_json(evaluate(model, ws.examples, ws.split.validation, threads));
  }
  if (!ws.split.test.empty()) {
    metrics["test"] = metrics_json(evaluate(model, ws.examples, ws.split.test, threads));
  }

  save_checkpoint_file(model, rc.checkpoint);
  {
    auto vout = open_output(vocab_sidecar(rc.checkpoint), "vocabulary");
    write_vocabulary(vout, ws.vocab);
  }
  const auto data = fingerprint(ws.examples);
  const json history = history_json(fit_result);
  append_run_log(rc, "train", data, metrics, history);
  out << json{{"checkpoint", rc.checkpoint.string()},
              {"vocab", vocab_sidecar(rc.checkpoint).string()},
              {"dataset", {{"count", data.count}, {"hash", data.hash}}},
              {"metrics", metrics},
              {"history", history}}
             .dump()
      << '\n';
  return kExitOk;
}

Model<float> load_model_and_vocab(const std::string& checkpoint, const std::string& vocab_path,
                                  Vocabulary& vocab) {
  Model<float> model = load_checkpoint_file(checkpoint);
  const fs::path vp = vocab_path.empty() ? vocab_sidecar(checkpoint) : fs::path(vocab_path);
  auto vin = open_input(vp, "vocabulary");
  vocab = read_vocabulary(vin);
  if (vocab.size() != model.config().vocab_size) {
    throw FormatError("vocabulary " + vp.string() + " has " + std::to_string(vocab.size()) +
                      " entries but the checkpoint expects " + std::to_string(model.config().vocab_size));
  }
  return model;
}

int cmd_eval(const std::string& checkpoint, const std::string& data, const std::string& vocab_path,
             std::ostream& out) {
  Vocabulary vocab;
  Model<float> model = load_model_and_vocab(checkpoint, vocab_path, vocab);
  auto in = open_input(data, "dataset");
  const auto tsv = read_tsv(in);
  std::vector<LabeledExample> examples;
  std::size_t no_tokens = 0;
  for (const auto& r : tsv.records) {
    if (auto ex = make_example(r.text, r.label, vocab, model.config().max_len)) {
      examples.push_back(std::move(*ex));
    } else {
      ++no_tokens;
    }
  }
  const Metrics m = evaluate(model, examples, thread_count());
  json result = metrics_json(m);
  result["skipped"] = {{"malformed", tsv.malformed}, {"no_tokens", no_tokens}};
  out << result.dump() << '\n';
  return kExitOk;
}

json cv_json(const CvResult& cv) {
  json folds = json::array();
  for (const auto& f : cv.folds) {
    folds.push_back({{"fold", f.fold}, {"train_size", f.train_size}, {"test", metrics_json(f.test)}});
  }
  return {{"folds", folds}, {"mean_accuracy", cv.mean_accuracy}, {"stddev_accuracy", cv.stddev_accuracy}};
}

std::vector<LabeledExample> cv_examples(const Workspace& ws) {
  std::vector<std::size_t> idx = ws.split.train;
  idx.insert(idx.end(), ws.split.validation.begin(), ws.split.validation.end());
  std::sort(idx.begin(), idx.end());
  return gather(ws.examples, idx);
}

int cmd_cv(RunConfig rc, std::size_t folds, const std::string& fold_order, std::ostream& out,
           std::ostream& err) {
  if (folds > 0) rc.folds.k = folds;
  rc.effective["folds"] = rc.folds.k;
  Workspace ws = prepare_workspace(rc, err);
  const auto examples = cv_examples(ws);
  const auto factory = region_factory(rc, ws);
  CvOptions options;
  options.threads = thread_count();
  if (!fold_order.empty()) options.order = parse_size_list(fold_order, "fold order");
  const ModelFactory per_seed = [&](std::uint64_t seed) { return factory(rc.region_size, seed); };
  const CvResult cv = cross_validate(examples, per_seed, rc.train, rc.folds, options);
  for (const auto& f : cv.folds) err << "fold " << f.fold << ": accuracy " << f.test.accuracy << '\n';
  const json result = cv_json(cv);
  append_run_log(rc, "cv", fingerprint(examples), result, json::array());
  out << result.dump() << '\n';
  return kExitOk;
}

int cmd_sweep(RunConfig rc, const std::string& sizes_text, std::size_t folds,
              const std::string& table_path, std::ostream& out, std::ostream& err) {
  if (rc.model != ModelVariant::ModelA) throw ConfigError("the region-size sweep uses model a");
  if (!sizes_text.empty()) rc.region_sizes = parse_size_list(sizes_text, "region size");
  if (folds > 0) rc.folds.k = folds;
  rc.effective["region_sizes"] = rc.region_sizes;
  rc.effective["folds"] = rc.folds.k;
  Workspace ws = prepare_workspace(rc, err);
  for (std::size_t size : rc.region_sizes) {
    shape_trace(model_config_for(rc, ws.vocab.size(), ws.embedding_dim, size));
  }
  const auto examples = cv_examples(ws);
  CvOptions options;
  options.threads = thread_count();
  const auto rows = sweep_region_sizes(examples, rc.region_sizes, region_factory(rc, ws), rc.train,
                                       rc.folds, options);
  json table = json::array();
  for (const auto& row : rows) {
    json accs = json::array();
    for (const auto& f : row.cv.folds) accs.push_back(f.test.accuracy);
    table.push_back({{"region_size", row.region_size},
                     {"mean_accuracy", row.cv.mean_accuracy},
                     {"stddev_accuracy", row.cv.stddev_accuracy},
                     {"fold_accuracies", accs}});
    err << "region size " << row.region_size << ": mean accuracy " << row.cv.mean_accuracy << '\n';
  }
  if (!table_path.empty()) {
    auto t = open_output(table_path, "sweep table");
    t << "region_size\tmean_accuracy\tstddev_accuracy\n";
    for (const auto& row : rows) {
      t << row.region_size << '\t' << row.cv.mean_accuracy << '\t' << row.cv.stddev_accuracy << '\n';
    }
  }
  const json result = {{"rows", table}};
  append_run_log(rc, "sweep", fingerprint(examples), result, json::array());
  out << result.dump() << '\n';
  return kExitOk;
}

int cmd_compare(RunConfig rc, const std::string& optimizers, std::ostream& out, std::ostream& err) {
  std::vector<OptimizerKind> kinds;
  std::stringstream ss(optimizers);
  for (std::string name; std::getline(ss, name, ',');) {
    const auto kind = parse_optimizer_kind(name);
    if (!kind) throw ConfigError("unknown optimizer '" + name + "'");
    kinds.push_back(*kind);
  }
  if (kinds.size() != 2) throw ConfigError("--optimizers needs exactly two names");
  Workspace ws = prepare_workspace(rc, err);
  const auto train = gather(ws.examples, ws.split.train);
  const auto test = gather(ws.examples, ws.split.test.empty() ? ws.split.validation : ws.split.test);
  const auto factory = region_factory(rc, ws);
  const ModelFactory per_seed = [&](std::uint64_t seed) { return factory(rc.region_size, seed); };
  std::array<TrainConfig, 2> cfgs{rc.train, rc.train};
  for (std::size_t i = 0; i < 2; ++i) {
    // Each optimizer keeps its own default learning rate unless the config
    // set one for that optimizer.
    const bool custom_lr = rc.learning_rate_explicit && rc.train.optimizer.kind == kinds[i];
    const double lr = rc.train.optimizer.learning_rate;
    cfgs[i].optimizer = OptimizerConfig::defaults(kinds[i]);
    if (custom_lr) cfgs[i].optimizer.learning_rate = lr;
  }
  const auto cmp = compare_optimizers(train, test, per_seed, cfgs[0], cfgs[1], thread_count());
  json rows = json::array();
  for (const auto& run : cmp.runs) {
    json row = {{"optimizer", std::string(to_string(run.optimizer.kind))},
                {"learning_rate", run.optimizer.learning_rate},
                {"data_hash", cmp.data_hash},
                {"train", metrics_json(run.train)}};
    if (!test.empty()) row["test"] = metrics_json(run.test);
    rows.push_back(std::move(row));
  }
  const json result = {{"rows", rows}};
  append_run_log(rc, "compare", fingerprint(train), result, json::array());
  out << result.dump() << '\n';
  return kExitOk;
}

int cmd_gradcheck(const std::string& model, double tolerance, std::uint64_t seed, std::ostream& out) {
  const auto variant = parse_model_variant(model);
  if (!variant || *variant == ModelVariant::Custom) throw ConfigError("--model must be a or b");
  const auto report = gradient_check_reduced(*variant, tolerance, seed);
  json result = {{"model", model},
                 {"result", report.passed ? "PASS" : "FAIL"},
                 {"max_relative_error", report.max_relative_error},
                 {"tolerance", tolerance},
                 {"coordinates", report.coordinates_checked},
                 {"worst_parameter", report.worst_parameter},
                 {"worst_index", report.worst_index}};
  if (!report.failure.empty()) result["failure"] = report.failure;
  out << result.dump() << '\n';
  return report.passed ? kExitOk : kExitNumeric;
}

struct DescribeArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string model;
  std::size_t max_len = 0;
  std::size_t embedding_dim = 0;
  std::size_t vocab_size = 0;
};

int cmd_describe(const DescribeArgs& a, std::ostream& out) {
  std::vector<std::string> overrides = a.overrides;
  if (!a.model.empty()) overrides.push_back("model=" + a.model);
  if (a.max_len > 0) overrides.push_back("max_len=" + std::to_string(a.max_len));
  const RunConfig rc = load_run_config(a.config, overrides);
  const std::size_t dim = a.embedding_dim > 0 ? a.embedding_dim : rc.embedding_dim.value_or(100);
  const std::size_t vocab = a.vocab_size > 0 ? a.vocab_size : rc.vocab_capacity + 2;
  const ModelConfig cfg = model_config_for(rc, vocab, dim, rc.region_size);
  const ShapeTrace trace = shape_trace(cfg);
  json layers = json::array();
  for (const auto& e : trace) layers.push_back({{"layer", e.layer}, {"shape", e.shape}});
  out << json{{"model", std::string(to_string(cfg.variant))},
              {"chain", describe_chain(trace)},
              {"sequence_lengths", sequence_lengths(trace)},
              {"layers", layers}}
             .dump()
      << '\n';
  return kExitOk;
}

int cmd_predict(const std::string& checkpoint, const std::string& text, const std::string& vocab_path,
                std::ostream& out) {
  Vocabulary vocab;
  Model<float> model = load_model_and_vocab(checkpoint, vocab_path, vocab);
  const auto tokens = tokenize(text);
  if (tokens.empty()) throw InputError("text has no tokens");
  const auto ids = encode(tokens, vocab, model.config().max_len);
  const Prediction p = model.predict(ids);
  out << json{{"label", p.label == 1 ? "positive" : "negative"},
              {"label_id", p.label},
              {"p_negative", p.probs[0]},
              {"p_positive", p.probs[1]}}
             .dump()
      << '\n';
  return kExitOk;
}

int cmd_inspect_vectors(const std::string& path, const std::string& format_name, std::ostream& out) {
  const auto format = parse_vector_format(format_name);
  if (!format) throw ConfigError("--format must be glove_text, fasttext_text or word2vec_binary");
  const WordVectorTable table = load_vectors(path, *format);
  out << "format " << to_string(*format) << '\n'
      << "count " << table.size() << '\n'
      << "dimension " << table.dimension() << '\n'
      << "skipped " << table.duplicates + table.invalid_utf8 << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Word-level CNN sentiment classification toolkit", "wordcnn"};
  app.require_subcommand(1);

  PrepareArgs prepare;
  auto* prepare_cmd = app.add_subcommand("prepare", "Filter, label and materialize a review dump as TSV");
  prepare_cmd->add_option("--reviews", prepare.reviews, "review JSON-lines file")->required();
  prepare_cmd->add_option("--business", prepare.business, "business JSON-lines file");
  prepare_cmd->add_option("--cities", prepare.cities, "comma-separated city names");
  prepare_cmd->add_option("--out", prepare.out, "output TSV")->required();

  std::string vocab_data, vocab_out;
  std::size_t vocab_capacity = 100000;
  auto* vocab_cmd = app.add_subcommand("vocab", "Build a frequency-capped vocabulary file");
  vocab_cmd->add_option("--data", vocab_data, "prepared TSV")->required();
  vocab_cmd->add_option("--capacity", vocab_capacity, "number of tokens to keep")->capture_default_str();
  vocab_cmd->add_option("--out", vocab_out, "output vocabulary file")->required();

  std::string config_path;
  std::vector<std::string> overrides;
  const auto add_config = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--config", config_path, "JSON run config");
    if (required) opt->required();
    cmd->add_option("--override", overrides, "key=value, applied after the config file");
  };

  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  add_config(train_cmd, true);

  std::string checkpoint, data, vocab_path, text;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a prepared TSV");
  eval_cmd->add_option("--checkpoint", checkpoint)->required();
  eval_cmd->add_option("--data", data)->required();
  eval_cmd->add_option("--vocab", vocab_path, "defaults to <checkpoint>.vocab");

  std::size_t folds = 0;
  std::string fold_order;
  auto* cv_cmd = app.add_subcommand("cv", "k-fold cross-validation");
  add_config(cv_cmd, true);
  cv_cmd->add_option("--folds", folds, "number of folds (overrides the config)");
  cv_cmd->add_option("--fold-order", fold_order, "execution order, e.g. 2,0,1");

  std::string region_sizes, table_path;
  auto* sweep_cmd = app.add_subcommand("sweep", "Cross-validate model a across region sizes");
  add_config(sweep_cmd, true);
  sweep_cmd->add_option("--region-sizes", region_sizes, "comma-separated, e.g. 2,3,5");
  sweep_cmd->add_option("--folds", folds, "number of folds (overrides the config)");
  sweep_cmd->add_option("--table", table_path, "also write a TSV table here");

  std::string optimizers = "nadam,rmsprop";
  auto* compare_cmd = app.add_subcommand("compare", "Train twice, differing only in the optimizer");
  add_config(compare_cmd, true);
  compare_cmd->add_option("--optimizers", optimizers, "two of sgd, rmsprop, nadam")->capture_default_str();

  std::string gc_model = "a";
  double tolerance = 1e-4;
  std::uint64_t gc_seed = 0;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference check of a reduced model");
  gc_cmd->add_option("--model", gc_model, "a or b")->capture_default_str();
  gc_cmd->add_option("--tolerance", tolerance)->capture_default_str();
  gc_cmd->add_option("--seed", gc_seed)->capture_default_str();

  DescribeArgs describe;
  auto* describe_cmd = app.add_subcommand("describe", "Print a model's layer shapes");
  describe_cmd->add_option("--config", describe.config, "JSON run config");
  describe_cmd->add_option("--override", describe.overrides, "key=value");
  describe_cmd->add_option("--model", describe.model, "a or b");
  describe_cmd->add_option("--max-len", describe.max_len);
  describe_cmd->add_option("--embedding-dim", describe.embedding_dim);
  describe_cmd->add_option("--vocab-size", describe.vocab_size);

  auto* predict_cmd = app.add_subcommand("predict", "Classify one text");
  predict_cmd->add_option("--checkpoint", checkpoint)->required();
  predict_cmd->add_option("--text", text)->required();
  predict_cmd->add_option("--vocab", vocab_path, "defaults to <checkpoint>.vocab");

  std::string vec_path, vec_format;
  auto* inspect_cmd = app.add_subcommand("inspect-vectors", "Summarize a word-vector file");
  inspect_cmd->add_option("--path", vec_path)->required();
  inspect_cmd->add_option("--format", vec_format, "glove_text, fasttext_text or word2vec_binary")->required();

  std::vector<std::string> argv_storage{"wordcnn"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*prepare_cmd) return cmd_prepare(prepare, out, err);
    if (*vocab_cmd) return cmd_vocab(vocab_data, vocab_capacity, vocab_out, out);
    if (*train_cmd) return cmd_train(load_run_config(config_path, overrides), out, err);
    if (*eval_cmd) return cmd_eval(checkpoint, data, vocab_path, out);
    if (*cv_cmd) return cmd_cv(load_run_config(config_path, overrides), folds, fold_order, out, err);
    if (*sweep_cmd) {
      return cmd_sweep(load_run_config(config_path, overrides), region_sizes, folds, table_path, out, err);
    }
    if (*compare_cmd) return cmd_compare(load_run_config(config_path, overrides), optimizers, out, err);
    if (*gc_cmd) return cmd_gradcheck(gc_model, tolerance, gc_seed, out);
    if (*describe_cmd) return cmd_describe(describe, out);
    if (*predict_cmd) return cmd_predict(checkpoint, text, vocab_path, out);
    if (*inspect_cmd) return cmd_inspect_vectors(vec_path, vec_format, out);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace wordcnn::cli
