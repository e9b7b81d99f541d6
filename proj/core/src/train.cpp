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

#include "wordcnn/train.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "wordcnn/errors.hpp"
#include "wordcnn/hash.hpp"

namespace wordcnn {
namespace {

struct Tally {
  double loss_sum = 0.0;
  std::array<std::array<std::size_t, 2>, 2> confusion{};
  std::size_t count = 0;

  void add(double loss, std::size_t truth, std::size_t predicted) {
    loss_sum += loss;
    ++confusion[truth][predicted];
    ++count;
  }

  Metrics metrics() const {
    Metrics m;
    m.example_count = count;
    m.confusion = confusion;
    if (count > 0) {
      m.accuracy = static_cast<double>(confusion[0][0] + confusion[1][1]) / static_cast<double>(count);
      m.loss = loss_sum / static_cast<double>(count);
    }
    return m;
  }
};

std::size_t argmax(std::span<const float> probs) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < probs.size(); ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return best;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

template <typename Fn>
void run_parallel(std::size_t tasks, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, tasks));
  if (threads == 1) {
    for (std::size_t i = 0; i < tasks; ++i) fn(i, 0);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = next++; i < tasks; i = next++) {
        try {
          fn(i, w);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  optimizer.validate();
}

FitResult fit(Model<float>& model, std::span<const LabeledExample> examples,
              std::span<const std::size_t> train_indices,
              std::span<const std::size_t> validation_indices, const TrainConfig& cfg) {
  cfg.validate();
  FitResult result;
  if (cfg.epochs == 0) return result;
  if (train_indices.empty()) throw InputError("cannot fit on an empty training set");

  Optimizer<float> optimizer(cfg.optimizer);
  model.reseed_dropout(derive_seed(cfg.seed, 1));

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Tally tally;
    const auto order = batches(train_indices, cfg.batch_size, derive_seed(cfg.seed, 100 + epoch));
    for (std::size_t b = 0; b < order.size(); ++b) {
      const auto& batch = order[b];
      model.zero_grad();
      double batch_loss = 0.0;
      for (std::size_t idx : batch) {
        const auto& ex = examples[idx];
        const auto truth = static_cast<std::size_t>(polarity_index(ex.label));
        const auto out = model.forward_backward(ex.token_ids, truth, Mode::Train);
        batch_loss += out.loss;
        tally.add(out.loss, truth, argmax(out.probs));
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(b + 1));
      }
      model.scale_grad(1.0f / static_cast<float>(batch.size()));
      optimizer.step(model.parameters());

      if (cfg.eval_every > 0 && !validation_indices.empty() && (b + 1) % cfg.eval_every == 0) {
        result.interval_evaluations.push_back(
            {epoch, b + 1, evaluate(model, examples, validation_indices)});
      }
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train = tally.metrics();
    if (!validation_indices.empty()) record.validation = evaluate(model, examples, validation_indices);
    result.history.push_back(std::move(record));
  }
  return result;
}

FitResult fit(Model<float>& model, std::span<const LabeledExample> train,
              std::span<const LabeledExample> validation, const TrainConfig& cfg) {
  std::vector<LabeledExample> combined(train.begin(), train.end());
  combined.insert(combined.end(), validation.begin(), validation.end());
  const auto train_idx = all_indices(train.size());
  std::vector<std::size_t> val_idx(validation.size());
  std::iota(val_idx.begin(), val_idx.end(), train.size());
  return fit(model, combined, train_idx, val_idx, cfg);
}

Metrics evaluate(Model<float>& model, std::span<const LabeledExample> examples,
                 std::span<const std::size_t> indices, std::size_t threads) {
  if (indices.empty()) throw InputError("cannot evaluate an empty set");
  threads = std::max<std::size_t>(1, std::min(threads, indices.size()));

  std::vector<double> losses(indices.size());
  std::vector<std::size_t> predicted(indices.size());
  std::vector<Model<float>> replicas;
  for (std::size_t w = 1; w < threads; ++w) replicas.push_back(model);

  const std::size_t chunk = (indices.size() + threads - 1) / threads;
  run_parallel(threads, threads, [&](std::size_t task, std::size_t) {
    Model<float>& m = task == 0 ? model : replicas[task - 1];
    const std::size_t end = std::min(indices.size(), (task + 1) * chunk);
    for (std::size_t i = task * chunk; i < end; ++i) {
      const auto& ex = examples[indices[i]];
      const Tensor<float> logits = m.forward(ex.token_ids, Mode::Eval);
      const auto out = softmax_xent(logits.data(), static_cast<std::size_t>(polarity_index(ex.label)));
      losses[i] = out.loss;
      predicted[i] = argmax(out.probs);
    }
  });

  // Reduce in index order so the result is independent of the thread count.
  Tally tally;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    tally.add(losses[i], static_cast<std::size_t>(polarity_index(examples[indices[i]].label)),
              predicted[i]);
  }
  return tally.metrics();
}

Metrics evaluate(Model<float>& model, std::span<const LabeledExample> examples,
                 std::size_t threads) {
  const auto idx = all_indices(examples.size());
  return evaluate(model, examples, idx, threads);
}

CvResult cross_validate(std::span<const LabeledExample> examples, const ModelFactory& factory,
                        const TrainConfig& cfg, const FoldPlan& plan, const CvOptions& options) {
  std::vector<Polarity> labels;
  labels.reserve(examples.size());
  for (const auto& ex : examples) labels.push_back(ex.label);
  const auto folds = make_folds(labels, plan);

  std::vector<std::size_t> order = options.order;
  if (order.empty()) order = all_indices(folds.size());
  {
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != all_indices(folds.size())) {
      throw ConfigError("fold execution order must be a permutation of 0.." +
                        std::to_string(folds.size() - 1));
    }
  }

  CvResult result;
  result.folds.resize(folds.size());
  run_parallel(order.size(), options.threads, [&](std::size_t task, std::size_t) {
    const std::size_t fold = order[task];
    std::vector<std::size_t> train_idx;
    for (std::size_t other = 0; other < folds.size(); ++other) {
      if (other != fold) train_idx.insert(train_idx.end(), folds[other].begin(), folds[other].end());
    }
    std::sort(train_idx.begin(), train_idx.end());

    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = cfg.seed + fold;
    Model<float> model = factory(fold_cfg.seed);
    FoldResult& out = result.folds[fold];
    out.fold = fold;
    out.train_size = train_idx.size();
    try {
      out.fit = fit(model, examples, train_idx, {}, fold_cfg);
    } catch (const NumericError& e) {
      throw NumericError("fold " + std::to_string(fold) + ": " + e.what());
    }
    out.test = evaluate(model, examples, folds[fold]);
  });

  double sum = 0.0;
  for (const auto& f : result.folds) sum += f.test.accuracy;
  const auto k = static_cast<double>(result.folds.size());
  result.mean_accuracy = sum / k;
  double sq = 0.0;
  for (const auto& f : result.folds) sq += (f.test.accuracy - result.mean_accuracy) * (f.test.accuracy - result.mean_accuracy);
  result.stddev_accuracy = k > 1 ? std::sqrt(sq / (k - 1)) : 0.0;
  return result;
}

std::vector<SweepRow> sweep_region_sizes(std::span<const LabeledExample> examples,
                                         std::span<const std::size_t> sizes,
                                         const RegionModelFactory& factory,
                                         const TrainConfig& cfg, const FoldPlan& folds,
                                         const CvOptions& options) {
  std::vector<SweepRow> rows;
  for (std::size_t size : sizes) {
    const ModelFactory per_size = [&](std::uint64_t seed) { return factory(size, seed); };
    rows.push_back({size, cross_validate(examples, per_size, cfg, folds, options)});
  }
  return rows;
}

OptimizerComparison compare_optimizers(std::span<const LabeledExample> train,
                                       std::span<const LabeledExample> test,
                                       const ModelFactory& factory, const TrainConfig& first,
                                       const TrainConfig& second, std::size_t threads) {
  if (first.batch_size != second.batch_size || first.epochs != second.epochs ||
      first.seed != second.seed || first.eval_every != second.eval_every) {
    throw ConfigError("optimizer comparison requires configs that differ only in the optimizer");
  }
  OptimizerComparison cmp;
  cmp.data_hash = fingerprint(train).hash + ":" + fingerprint(test).hash;
  const std::array<const TrainConfig*, 2> cfgs{&first, &second};
  for (std::size_t i = 0; i < 2; ++i) {
    Model<float> model = factory(cfgs[i]->seed);
    auto& run = cmp.runs[i];
    run.optimizer = cfgs[i]->optimizer;
    run.fit = fit(model, train, {}, *cfgs[i]);
    run.train = evaluate(model, train, threads);
    if (!test.empty()) run.test = evaluate(model, test, threads);
  }
  return cmp;
}

DatasetFingerprint fingerprint(std::span<const LabeledExample> examples) {
  Fnv1a64 h;
  for (const auto& ex : examples) {
    h.update_value(static_cast<std::uint8_t>(polarity_index(ex.label)));
    for (TokenId id : ex.token_ids) {
      const auto u = static_cast<std::uint32_t>(id);
      const std::array<std::uint8_t, 4> le{static_cast<std::uint8_t>(u), static_cast<std::uint8_t>(u >> 8),
                                           static_cast<std::uint8_t>(u >> 16), static_cast<std::uint8_t>(u >> 24)};
      h.update(std::as_bytes(std::span(le)));
    }
  }
  return {examples.size(), h.hex()};
}

}  // namespace wordcnn
