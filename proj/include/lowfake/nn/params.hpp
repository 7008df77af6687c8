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

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lowfake/nn/graph.hpp"
#include "lowfake/random.hpp"
#include "lowfake/tensor.hpp"

namespace lowfake::nn {

/// Named parameter and buffer tensors of one model instance, in the
/// graph's registration order. Value type: copying snapshots the weights.
template <typename T>
class ParameterStore {
 public:
  struct Entry {
    std::string name;
    bool trainable = true;
    Tensor<T> value;
  };

  ParameterStore() = default;

  /// Glorot-uniform kernels, zero biases/betas, unit gammas, zero running
  /// means and unit running variances.
  static ParameterStore initialize(const ModelGraph& graph, std::uint64_t seed);

  /// All-zero tensors shaped like the graph's parameters.
  static ParameterStore zeros(const ModelGraph& graph);

  void add(std::string name, bool trainable, Tensor<T> value);

  bool contains(std::string_view name) const;
  Tensor<T>& at(std::string_view name);
  const Tensor<T>& at(std::string_view name) const;

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

  std::size_t trainable_count() const;

  /// Throws ShapeError unless names, order and shapes match the graph.
  void check_against(const ModelGraph& graph) const;

  template <typename U>
  ParameterStore<U> cast() const {
    ParameterStore<U> out;
    for (const Entry& e : entries_) out.add(e.name, e.trainable, e.value.template cast<U>());
    return out;
  }

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

template <typename T>
using GradMap = std::map<std::string, Tensor<T>, std::less<>>;

}  // namespace lowfake::nn
