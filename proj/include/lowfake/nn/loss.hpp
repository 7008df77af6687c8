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

#include <span>
#include <string_view>

#include "lowfake/tensor.hpp"

namespace lowfake::nn {

/// bce / mse read a (N, 1) probability head; cross_entropy reads (N, C)
/// softmax probabilities. Labels are class indices (0/1 for binary heads).
enum class LossKind { bce, mse, cross_entropy };

std::string_view to_string(LossKind kind);
LossKind parse_loss(std::string_view name);

template <typename T>
struct LossValue {
  double value = 0.0;  // mean over the batch
  Tensor<T> grad;      // d value / d output
};

template <typename T>
LossValue<T> compute_loss(LossKind kind, const Tensor<T>& output, std::span<const int> labels);

/// Fraction of rows whose prediction matches the label: p >= 0.5 for a
/// single-unit head, argmax otherwise.
template <typename T>
double accuracy(const Tensor<T>& output, std::span<const int> labels);

}  // namespace lowfake::nn
