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

#ifndef WORDCNN_TRAIN_HPP_
#define WORDCNN_TRAIN_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wordcnn/corpus.hpp"
#include "wordcnn/model.hpp"
#include "wordcnn/optim.hpp"
#include "wordcnn/text.hpp"

namespace wordcnn {

struct TrainConfig {
  std::size_t batch_size = 500;
  std::size_t epochs = 3;
  OptimizerConfig optimizer = OptimizerConfig::defaults(OptimizerKind::Nadam);
  std::uint64_t seed = 0;
  /// Evaluate the validation set every this many batches (0 = only at the
  /// end of each epoch).
  std::size_t eval_every = 0;

  void validate() const;
};

struct Metrics {
  double accuracy = 0.0;
  double loss = 0.0;  // mean cross-entropy
  std::size_t example_count = 0;
  /// confusion[true][predicted], indexed by Polarity code.
  std::array<std::array<std::size_t, 2>, 2> confusion{};

  bool operator==(const Metrics&) const = default;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  /// Accumulated over the epoch's Train-mode forward passes, each taken
  /// before that batch's update.
  Metrics train;
  std::optional<Metrics> validation;
};

struct IntervalRecord {
  std::size_t epoch = 0;
  std::size_t batch = 0;  // 1-based within the epoch
  Metrics validation;
};

struct FitResult {
  std::vector<EpochRecord> history;
  std::vector<IntervalRecord> interval_evaluations;
};

/// Mini-batch training. Each epoch shuffles `train_indices` (seeded by cfg.seed
/// and the epoch number), averages per-example gradients over each batch
/// and applies one optimizer step per batch. The validation set is only
/// reported on, never used for stopping. Throws NumericError (naming the
/// epoch and batch) on a non-finite loss and InputError on an empty train
/// set.
FitResult fit(Model<float>& model, std::span<const LabeledExample> examples,
              std::span<const std::size_t> train_indices,
              std::span<const std::size_t> validation_indices, const TrainConfig& cfg);

FitResult fit(Model<float>& model, std::span<const LabeledExample> train,
              std::span<const LabeledExample> validation, const TrainConfig& cfg);

/// Eval-mode accuracy, mean loss and confusion matrix. Prediction is the
/// argmax class, ties to the lower index. With threads > 1 the work is split
/// across copies of the model; results do not depend on the thread count.
/// The model is only run in Eval mode, but its caches are overwritten. Throws
/// InputError on an empty set.
Metrics evaluate(Model<float>& model, std::span<const LabeledExample> examples,
                 std::span<const std::size_t> indices, std::size_t threads = 1);

Metrics evaluate(Model<float>& model, std::span<const LabeledExample> examples,
                 std::size_t threads = 1);

/// Builds a freshly initialized model from a seed.
using ModelFactory = std::function<Model<float>(std::uint64_t seed)>;

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  Metrics test;
  FitResult fit;
};

struct CvResult {
  std::vector<FoldResult> folds;  // in fold-index order
  double mean_accuracy = 0.0;     // unweighted mean over folds
  double stddev_accuracy = 0.0;   // sample standard deviation (n - 1)
};

struct CvOptions {
  std::size_t threads = 1;
  /// Execution order of the folds; empty means 0..k-1. Results are always
  /// stored by fold index.
  std::vector<std::size_t> order;
};

/// k-fold cross-validation. Fold i trains on every other fold with model
/// and shuffle seed cfg.seed + i, then evaluates on fold i.
CvResult cross_validate(std::span<const LabeledExample> examples, const ModelFactory& factory,
                        const TrainConfig& cfg, const FoldPlan& folds,
                        const CvOptions& options = {});

struct SweepRow {
  std::size_t region_size = 0;
  CvResult cv;
};

/// Builds a model for (region size, seed).
using RegionModelFactory = std::function<Model<float>(std::size_t region_size, std::uint64_t seed)>;

/// Cross-validates one model per region size.
std::vector<SweepRow> sweep_region_sizes(std::span<const LabeledExample> examples,
                                         std::span<const std::size_t> sizes,
                                         const RegionModelFactory& factory,
                                         const TrainConfig& cfg, const FoldPlan& folds,
                                         const CvOptions& options = {});

struct OptimizerRun {
  OptimizerConfig optimizer;
  Metrics train;  // Eval-mode metrics on the train set after the last epoch
  Metrics test;
  FitResult fit;
};

struct OptimizerComparison {
  std::string data_hash;
  std::array<OptimizerRun, 2> runs;
};

/// Two fits that differ only in the update rule. Throws ConfigError if the
/// configs differ in anything else.
OptimizerComparison compare_optimizers(std::span<const LabeledExample> train,
                                       std::span<const LabeledExample> test,
                                       const ModelFactory& factory, const TrainConfig& first,
                                       const TrainConfig& second, std::size_t threads = 1);

struct DatasetFingerprint {
  std::size_t count = 0;
  std::string hash;  // FNV-1a over labels and token ids
};

DatasetFingerprint fingerprint(std::span<const LabeledExample> examples);

}  // namespace wordcnn

#endif  // WORDCNN_TRAIN_HPP_
