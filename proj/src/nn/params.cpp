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

#include "lowfake/nn/params.hpp"

#include <cmath>

namespace lowfake::nn {

template <typename T>
ParameterStore<T> ParameterStore<T>::initialize(const ModelGraph& graph, std::uint64_t seed) {
  Rng rng(seed);
  ParameterStore store;
  for (const ParamSpec& p : graph.params) {
    Tensor<T> t(p.shape);
    switch (p.role) {
      case ParamRole::kernel: {
        const double limit = std::sqrt(6.0 / static_cast<double>(p.fan_in + p.fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (T& v : t) v = static_cast<T>(dist(rng));
        break;
      }
      case ParamRole::gamma:
      case ParamRole::moving_variance:
        t.fill(T(1));
        break;
      case ParamRole::bias:
      case ParamRole::beta:
      case ParamRole::moving_mean:
        break;
    }
    store.add(p.name, p.trainable(), std::move(t));
  }
  return store;
}

template <typename T>
ParameterStore<T> ParameterStore<T>::zeros(const ModelGraph& graph) {
  ParameterStore store;
  for (const ParamSpec& p : graph.params) store.add(p.name, p.trainable(), Tensor<T>(p.shape));
  return store;
}

template <typename T>
void ParameterStore<T>::add(std::string name, bool trainable, Tensor<T> value) {
  if (index_.contains(name)) throw ConfigError("duplicate parameter '" + name + "'");
  index_.emplace(name, entries_.size());
  entries_.push_back({std::move(name), trainable, std::move(value)});
}

template <typename T>
bool ParameterStore<T>::contains(std::string_view name) const {
  return index_.find(name) != index_.end();
}

template <typename T>
Tensor<T>& ParameterStore<T>::at(std::string_view name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter '" + std::string(name) + "'");
  return entries_[it->second].value;
}

template <typename T>
const Tensor<T>& ParameterStore<T>::at(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter '" + std::string(name) + "'");
  return entries_[it->second].value;
}

template <typename T>
std::size_t ParameterStore<T>::trainable_count() const {
  std::size_t n = 0;
  for (const Entry& e : entries_) n += e.trainable ? 1 : 0;
  return n;
}

template <typename T>
void ParameterStore<T>::check_against(const ModelGraph& graph) const {
  if (graph.params.size() != entries_.size()) {
    throw ShapeError("graph '" + graph.name + "' has " + std::to_string(graph.params.size()) +
                     " parameter tensors, store has " + std::to_string(entries_.size()));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const ParamSpec& p = graph.params[i];
    const Entry& e = entries_[i];
    if (p.name != e.name || p.shape != e.value.shape()) {
      throw ShapeError("parameter mismatch at index " + std::to_string(i) + ": graph expects " +
                       p.name + shape_str(p.shape) + ", store has " + e.name +
                       shape_str(e.value.shape()));
    }
  }
}

template class ParameterStore<float>;
template class ParameterStore<double>;

}  // namespace lowfake::nn
