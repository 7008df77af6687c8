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
#include <span>
#include <vector>

namespace lowfake::svm {

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  double lambda = 1e-4;

  std::size_t dim() const { return weights.size(); }
};

struct TrainOptions {
  double lambda = 1e-4;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  /// Starting value of the step clock t; negative selects ceil(1 / lambda),
  /// so the first step size is about 1 instead of 1 / lambda.
  double clock_offset = -1.0;
  /// Called after every epoch with the regularized hinge objective.
  std::function<void(std::size_t epoch, double objective)> on_epoch = nullptr;
};

/// w . x + b. Throws ShapeError on a dimension mismatch.
double score(const LinearModel& model, std::span<const double> x);

/// Fake iff score >= 0.
inline bool classify(const LinearModel& model, std::span<const double> x) { return score(model, x) >= 0.0; }

/// lambda/2 |w|^2 + mean(max(0, 1 - y (w . x + b))).
double objective(const LinearModel& model, std::span<const std::vector<double>> features, std::span<const int> labels);

/// Pegasos: visits samples in a fresh seeded permutation each epoch; at
/// step t (counted from `clock_offset`) uses eta = 1 / (lambda t), shrinks w by (1 - eta lambda)
/// and, on a margin violation, adds eta y x to w and eta y to the
/// unregularized bias. Labels are +1 (fake) or -1 (pristine).
///
/// Throws ConfigError on empty input, a single class, bad labels or
/// ragged features.
LinearModel train(std::span<const std::vector<double>> features, std::span<const int> labels,
                  const TrainOptions& options = {});

/// Weight archive with entries `w` [dim] and `b` [1]; lambda in metadata.
void save_model(const std::filesystem::path& path, const LinearModel& model);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace lowfake::svm
