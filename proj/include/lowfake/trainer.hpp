/*
 * Copyright 2026 The lowfake Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lowfake/activations.hpp"
#include "lowfake/data/augment.hpp"
#include "lowfake/data/dataset.hpp"
#include "lowfake/data/manifest.hpp"
#include "lowfake/nn/graph.hpp"
#include "lowfake/nn/loss.hpp"
#include "lowfake/nn/params.hpp"

namespace lowfake::trainer {

enum class OptimizerKind { adam, sgd };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);

struct TrainConfig {
  std::size_t batch_size = 75;
  double lr_start = 1e-3;
  double lr_floor = 1e-6;
  std::size_t lr_step = 1000;
  double lr_factor = 10.0;
  std::size_t patience = 3;
  std::size_t max_epochs = 50;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::adam;
  nn::LossKind loss = nn::LossKind::bce;
  double momentum = 0.0;  // SGD only
  /// Running-statistics decay of every BN layer. Small datasets give few
  /// steps per epoch; a lower value lets eval-mode statistics catch up.
  double bn_momentum = 0.99;

  bool augment = true;
  data::AugmentConfig augmentation;

  double val_fraction = 0.1;

  std::string model = "meso4";
  ActivationKind conv_activation = ActivationKind::relu;
  ActivationKind dense_activation = ActivationKind::relu;
  std::size_t input_size = 256;

  /// Resplits per grid cell; 0 picks the stage default (3, 3, 5).
  std::size_t repetitions = 0;
  bool cache_images = true;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

/// `key = value` lines with `#` comments; keys are the TrainConfig field
/// names, augmentation knobs prefixed `augment_` (e.g. augment_rotation_degrees).
/// Unknown keys and bad values throw ConfigError naming the line.
TrainConfig parse_config(std::string_view text, TrainConfig base = {});
TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});
std::string to_config_text(const TrainConfig& cfg);

/// max(lr_floor, lr_start / lr_factor^floor(step / lr_step))
double lr_at(std::size_t step, const TrainConfig& cfg);

/// Meso-4 / MesoInception-4 for the configured model, activations and input size.
nn::ModelGraph build_model(const TrainConfig& cfg);

struct LoadedModel {
  nn::ModelGraph graph;
  nn::ParameterStore<float> params;
};

/// Rebuilds a Meso graph from the metadata save_weights() records and loads
/// the weights into it. Throws FormatError when the metadata is missing or
/// names a model this loader cannot build.
LoadedModel load_model_weights(const std::filesystem::path& path);

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  /// Throws NumericError on a non-finite gradient, ShapeError on a mismatch.
  virtual void step(nn::ParameterStore<float>& params, const nn::GradMap<float>& grads, double lr) = 0;
  virtual std::size_t steps() const = 0;
};

class Adam final : public Optimizer {
 public:
  explicit Adam(double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
      : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

  void step(nn::ParameterStore<float>& params, const nn::GradMap<float>& grads, double lr) override;
  std::size_t steps() const override { return t_; }

  const std::vector<float>& first_moment(const std::string& name) const { return m_.at(name); }
  const std::vector<float>& second_moment(const std::string& name) const { return v_.at(name); }

 private:
  double beta1_, beta2_, epsilon_;
  std::size_t t_ = 0;
  std::map<std::string, std::vector<float>, std::less<>> m_, v_;
};

/// Plain SGD, optionally with classical momentum.
class Sgd final : public Optimizer {
 public:
  explicit Sgd(double momentum = 0.0) : momentum_(momentum) {}

  void step(nn::ParameterStore<float>& params, const nn::GradMap<float>& grads, double lr) override;
  std::size_t steps() const override { return t_; }

 private:
  double momentum_;
  std::size_t t_ = 0;
  std::map<std::string, std::vector<float>, std::less<>> velocity_;
};

std::unique_ptr<Optimizer> make_optimizer(const TrainConfig& cfg);

/// Patience rule: an epoch improves only with a strictly higher validation
/// accuracy than the best so far.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  /// Records one epoch; returns true when it is the new best.
  bool update(double val_acc);
  bool should_stop() const { return stale_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }  // 1-based, 0 before any epoch
  double best() const { return best_; }

 private:
  std::size_t patience_;
  std::size_t epoch_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t stale_ = 0;
  double best_ = -1.0;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
  double lr = 0.0;  // at the epoch's last step
  double seconds = 0.0;
};

struct TrainResult {
  nn::ParameterStore<float> params;  // best-validation epoch
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;
  double best_val_acc = 0.0;
  std::size_t steps = 0;
};

/// Minibatch training with per-epoch validation, staircase LR, optional
/// augmentation of 3-channel samples and patience-based early stopping
/// (which also ends training once validation accuracy reaches 1).
/// `initial` overrides the seeded initialization (e.g. to fine-tune).
TrainResult train(const nn::ModelGraph& graph, const data::Dataset& train_set, const data::Dataset& val_set,
                  const TrainConfig& cfg, const std::function<void(const EpochStats&)>& on_epoch = nullptr,
                  std::optional<nn::ParameterStore<float>> initial = std::nullopt);

/// Eval-mode network outputs, batch by batch: (N, units).
nn::Tensor<float> predict_dataset(const nn::ModelGraph& graph, const nn::ParameterStore<float>& params,
                                  const data::Dataset& dataset, std::size_t batch_size);

double dataset_accuracy(const nn::ModelGraph& graph, const nn::ParameterStore<float>& params,
                        const data::Dataset& dataset, std::size_t batch_size);

/// `epoch,train_loss,train_acc,val_acc,lr,seconds`
void write_history_csv(std::ostream& out, std::span<const EpochStats> history);

// ---- stage grids ---------------------------------------------------------------

struct GridRun {
  std::size_t index = 0;
  ActivationKind conv = ActivationKind::relu;
  ActivationKind dense = ActivationKind::relu;
  double lr_start = 1e-3;
  std::size_t repetitions = 1;

  std::string combination() const;  // "conv+dense"
};

/// Stage 1: every conv x dense pair over the six grid activations at the
/// configured lr_start. Stage 2: six pairs x lr_start {1e-2, 1e-3, 1e-4}.
/// Stage 3: five (pair, lr) models, five resplits each.
std::vector<GridRun> stage_schedule(int stage, const TrainConfig& cfg);

std::size_t default_repetitions(int stage);

/// `run,combination,lr_start,repetitions`
void write_schedule_csv(std::ostream& out, std::span<const GridRun> runs);

struct GridRow {
  std::string combination;
  double lr_start = 0.0;
  std::uint64_t seed = 0;
  double best_val_acc = 0.0;
  std::size_t epochs = 0;
  std::optional<double> test_acc;
};

inline constexpr const char* kGridCsvHeader = "combination,lr_start,seed,best_val_acc,epochs,test_acc";

void write_grid_row(std::ostream& out, const GridRow& row);

/// Trains every run and repetition sequentially. Repetition r uses seed
/// derive_seed(cfg.seed, r) for both the scene split and initialization,
/// so all cells share the same splits. Stage 3 first holds out a test
/// split of `val_fraction`, then splits validation from the rest. Rows
/// are streamed to `csv` (header first) when given.
std::vector<GridRow> run_stage_grid(int stage, const TrainConfig& cfg, const data::Dataset& dataset,
                                    std::span<const data::SampleRecord> records, std::ostream* csv = nullptr);

// ---- depth sweep ---------------------------------------------------------------

struct DepthSweepOptions {
  std::size_t min_depth = 2;
  std::size_t max_depth = 8;
  std::vector<ActivationKind> activations = {ActivationKind::relu, ActivationKind::swish, ActivationKind::mish,
                                             ActivationKind::pish};
  std::size_t epochs = 3;
  std::size_t batch_size = 64;
  double lr_start = 1e-3;
  double bn_momentum = 0.9;  // ~60 steps per epoch at desk scale
  double val_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct DepthSweepCell {
  std::size_t depth = 0;  // hidden dense blocks
  ActivationKind activation = ActivationKind::relu;
  double best_val_acc = 0.0;
  double test_acc = 0.0;
  std::size_t epochs = 0;
};

/// Trains a depth net for every (depth, activation) cell on one shuffled
/// train/validation/test split of `data`. All activations at a given depth
/// share the initialization seed. Test accuracy uses the best-validation
/// weights.
std::vector<DepthSweepCell> depth_sweep(const data::Dataset& data, const DepthSweepOptions& options,
                                        const std::function<void(const DepthSweepCell&)>& on_cell = nullptr);

/// Wide table: `depth,<act1>,<act2>,...` with test accuracies, one row per
/// depth; a missing cell is left empty.
void write_depth_sweep_csv(std::ostream& out, std::span<const DepthSweepCell> cells,
                           std::span<const ActivationKind> activations);

}  // namespace lowfake::trainer
