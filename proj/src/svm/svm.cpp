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
#include "lowfake/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "lowfake/data/weights.hpp"
#include "lowfake/error.hpp"
#include "lowfake/random.hpp"

namespace lowfake::svm {

double score(const LinearModel& model, std::span<const double> x) {
  if (x.size() != model.dim()) {
    throw ShapeError("feature has " + std::to_string(x.size()) + " values, model expects " +
                     std::to_string(model.dim()));
  }
  return std::inner_product(x.begin(), x.end(), model.weights.begin(), model.bias);
}

double objective(const LinearModel& model, std::span<const std::vector<double>> features, std::span<const int> labels) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    hinge += std::max(0.0, 1.0 - labels[i] * score(model, features[i]));
  }
  const double norm2 = std::inner_product(model.weights.begin(), model.weights.end(), model.weights.begin(), 0.0);
  return 0.5 * model.lambda * norm2 + hinge / static_cast<double>(features.size());
}

LinearModel train(std::span<const std::vector<double>> features, std::span<const int> labels,
                  const TrainOptions& options) {
  if (features.empty()) throw ConfigError("svm: no training samples");
  if (features.size() != labels.size()) throw ConfigError("svm: feature and label counts differ");
  if (!(options.lambda > 0.0)) throw ConfigError("svm: lambda must be positive");
  const std::size_t dim = features[0].size();
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != dim) throw ConfigError("svm: ragged feature vectors");
    if (labels[i] == 1) {
      pos = true;
    } else if (labels[i] == -1) {
      neg = true;
    } else {
      throw ConfigError("svm: labels must be +1 or -1");
    }
    for (double v : features[i]) {
      if (!std::isfinite(v)) throw NumericError("svm: non-finite feature value");
    }
  }
  if (!pos || !neg) throw ConfigError("svm: training data holds a single class");

  LinearModel m{std::vector<double>(dim, 0.0), 0.0, options.lambda};
  Rng rng(options.seed);
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), 0);
  const double t0 = options.clock_offset < 0.0 ? std::ceil(1.0 / options.lambda) : options.clock_offset;
  double t = t0;
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      t += 1.0;
      const double eta = 1.0 / (options.lambda * t);
      const double y = labels[i];
      const bool violated = y * score(m, features[i]) < 1.0;
      const double shrink = 1.0 - eta * options.lambda;
      for (double& w : m.weights) w *= shrink;
      if (violated) {
        const auto& x = features[i];
        for (std::size_t k = 0; k < dim; ++k) m.weights[k] += eta * y * x[k];
        m.bias += eta * y;
      }
    }
    if (options.on_epoch) options.on_epoch(epoch, objective(m, features, labels));
  }
  for (double w : m.weights) {
    if (!std::isfinite(w)) throw NumericError("svm: training diverged");
  }
  return m;
}

void save_model(const std::filesystem::path& path, const LinearModel& model) {
  data::WeightArchive a;
  std::ostringstream lam;
  lam.precision(17);
  lam << model.lambda;
  a.metadata = {{"model", "linear_svm"}, {"lambda", lam.str()}};
  a.entries.push_back({"w", {model.dim()}, {model.weights.begin(), model.weights.end()}});
  a.entries.push_back({"b", {1}, {static_cast<float>(model.bias)}});
  data::write_archive(path, a);
}

LinearModel load_model(const std::filesystem::path& path) {
  const auto a = data::read_archive(path);
  if (a.entries.size() != 2 || a.entries[0].name != "w" || a.entries[1].name != "b" ||
      a.entries[0].shape.size() != 1 || a.entries[1].shape != nn::Shape{1}) {
    throw FormatError(path.string() + " does not hold a linear SVM (expected entries w and b)");
  }
  LinearModel m;
  m.weights.assign(a.entries[0].values.begin(), a.entries[0].values.end());
  m.bias = a.entries[1].values[0];
  if (auto it = a.metadata.find("lambda"); it != a.metadata.end()) m.lambda = std::stod(it->second);
  return m;
}

}  // namespace lowfake::svm
