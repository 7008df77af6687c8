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

#include "lowfake/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lowfake/error.hpp"

namespace lowfake::nn {

namespace {
constexpr double kProbFloor = 1e-7;
}

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::bce:
      return "bce";
    case LossKind::mse:
      return "mse";
    case LossKind::cross_entropy:
      return "cross_entropy";
  }
  return "unknown";
}

LossKind parse_loss(std::string_view name) {
  if (name == "bce") return LossKind::bce;
  if (name == "mse") return LossKind::mse;
  if (name == "cross_entropy") return LossKind::cross_entropy;
  throw ConfigError("unknown loss '" + std::string(name) + "' (expected bce, mse or cross_entropy)");
}

template <typename T>
LossValue<T> compute_loss(LossKind kind, const Tensor<T>& output, std::span<const int> labels) {
  if (output.rank() != 2 || output.dim(0) != labels.size()) {
    throw ShapeError("loss: output " + shape_str(output.shape()) + " does not match " +
                     std::to_string(labels.size()) + " labels");
  }
  const std::size_t n = output.dim(0);
  const std::size_t c = output.dim(1);
  const double inv_n = 1.0 / static_cast<double>(n);
  LossValue<T> r{0.0, Tensor<T>(output.shape())};
  switch (kind) {
    case LossKind::bce:
    case LossKind::mse: {
      if (c != 1) throw ShapeError("binary loss needs a single-unit head");
      for (std::size_t i = 0; i < n; ++i) {
        const double y = labels[i];
        if (y != 0.0 && y != 1.0) throw ConfigError("binary loss labels must be 0 or 1");
        const double p = output[i];
        if (kind == LossKind::mse) {
          r.value += (p - y) * (p - y) * inv_n;
          r.grad[i] = static_cast<T>(2.0 * (p - y) * inv_n);
        } else {
          const double q = std::clamp(p, kProbFloor, 1.0 - kProbFloor);
          r.value -= (y * std::log(q) + (1.0 - y) * std::log(1.0 - q)) * inv_n;
          r.grad[i] = static_cast<T>((q - y) / (q * (1.0 - q)) * inv_n);
        }
      }
      break;
    }
    case LossKind::cross_entropy: {
      for (std::size_t i = 0; i < n; ++i) {
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= c) throw ConfigError("class label out of range");
        const double q = std::max(static_cast<double>(output[i * c + y]), kProbFloor);
        r.value -= std::log(q) * inv_n;
        r.grad[i * c + y] = static_cast<T>(-inv_n / q);
      }
      break;
    }
  }
  if (!std::isfinite(r.value)) throw NumericError("loss is not finite");
  return r;
}

template <typename T>
double accuracy(const Tensor<T>& output, std::span<const int> labels) {
  if (output.rank() != 2 || output.dim(0) != labels.size() || labels.empty()) {
    throw ShapeError("accuracy: output does not match labels");
  }
  const std::size_t n = output.dim(0), c = output.dim(1);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int pred;
    if (c == 1) {
      pred = output[i] >= T(0.5) ? 1 : 0;
    } else {
      const T* row = output.raw() + i * c;
      pred = static_cast<int>(std::max_element(row, row + c) - row);
    }
    hits += pred == labels[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

template LossValue<float> compute_loss(LossKind, const Tensor<float>&, std::span<const int>);
template LossValue<double> compute_loss(LossKind, const Tensor<double>&, std::span<const int>);
template double accuracy(const Tensor<float>&, std::span<const int>);
template double accuracy(const Tensor<double>&, std::span<const int>);

}  // namespace lowfake::nn
