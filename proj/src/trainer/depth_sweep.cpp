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


#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>

#include "lowfake/error.hpp"
#include "lowfake/models.hpp"
#include "lowfake/random.hpp"
#include "lowfake/trainer.hpp"

namespace lowfake::trainer {

std::vector<DepthSweepCell> depth_sweep(const data::Dataset& data, const DepthSweepOptions& o,
                                        const std::function<void(const DepthSweepCell&)>& on_cell) {
  if (o.min_depth < 1 || o.min_depth > o.max_depth || o.max_depth > models::kMaxDepthNetHidden) {
    throw ConfigError("depth range must satisfy 1 <= min <= max <= " + std::to_string(models::kMaxDepthNetHidden));
  }
  if (o.activations.empty()) throw ConfigError("depth sweep needs at least one activation");
  if (data.sample_shape().size() != 3 || data.sample_shape()[2] != 1 ||
      data.sample_shape()[0] != data.sample_shape()[1]) {
    throw ShapeError("depth sweep expects square single-channel samples, got " + nn::shape_str(data.sample_shape()));
  }
  const auto n = static_cast<double>(data.size());
  const auto n_val = static_cast<std::size_t>(std::lround(n * o.val_fraction));
  const auto n_test = static_cast<std::size_t>(std::lround(n * o.test_fraction));
  if (n_val == 0 || n_test == 0 || n_val + n_test >= data.size()) {
    throw ConfigError("dataset too small for the requested validation and test fractions");
  }

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(o.seed, 0xd5));
  std::shuffle(order.begin(), order.end(), rng);
  const std::vector<std::size_t> test_idx(order.begin(), order.begin() + n_test);
  const std::vector<std::size_t> val_idx(order.begin() + n_test, order.begin() + n_test + n_val);
  const std::vector<std::size_t> train_idx(order.begin() + n_test + n_val, order.end());
  const data::SubsetDataset train_set(data, train_idx), val_set(data, val_idx), test_set(data, test_idx);

  models::DepthNetOptions net;
  net.input_extent = data.sample_shape()[0];
  int max_label = 0;
  for (std::size_t i = 0; i < data.size(); ++i) max_label = std::max(max_label, data.label(i));
  net.classes = static_cast<std::size_t>(max_label) + 1;

  TrainConfig cfg;
  cfg.model = "depthnet";
  cfg.loss = nn::LossKind::cross_entropy;
  cfg.augment = false;
  cfg.batch_size = o.batch_size;
  cfg.lr_start = o.lr_start;
  cfg.bn_momentum = o.bn_momentum;
  cfg.max_epochs = o.epochs;

  std::vector<DepthSweepCell> cells;
  for (std::size_t depth = o.min_depth; depth <= o.max_depth; ++depth) {
    cfg.seed = derive_seed(o.seed, depth);
    for (ActivationKind act : o.activations) {
      const auto graph = models::build_depth_net(depth, act, net);
      const auto result = train(graph, train_set, val_set, cfg);
      DepthSweepCell cell{depth, act, result.best_val_acc, 0.0, result.history.size()};
      cell.test_acc = dataset_accuracy(graph, result.params, test_set, o.batch_size);
      if (on_cell) on_cell(cell);
      cells.push_back(cell);
    }
  }
  return cells;
}

void write_depth_sweep_csv(std::ostream& out, std::span<const DepthSweepCell> cells,
                           std::span<const ActivationKind> activations) {
  out << "depth";
  for (ActivationKind a : activations) out << ',' << to_string(a);
  out << '\n';
  std::map<std::size_t, std::map<ActivationKind, double>> table;
  for (const auto& c : cells) table[c.depth][c.activation] = c.test_acc;
  const auto old = out.precision(6);
  for (const auto& [depth, row] : table) {
    out << depth;
    for (ActivationKind a : activations) {
      out << ',';
      if (const auto it = row.find(a); it != row.end()) out << it->second;
    }
    out << '\n';
  }
  out.precision(old);
}

}  // namespace lowfake::trainer
