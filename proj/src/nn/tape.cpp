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

#include "lowfake/nn/tape.hpp"

namespace lowfake::nn {

template <typename T>
typename GradTape<T>::ValueId GradTape<T>::new_value(const Shape& shape, bool requires_grad) {
  shapes_.push_back(shape);
  requires_grad_.push_back(requires_grad);
  return shapes_.size() - 1;
}

template <typename T>
void GradTape<T>::record(std::string op, std::vector<ValueId> inputs, ValueId output, BackwardFn fn) {
  if (!recording_) return;
  nodes_.push_back({std::move(op), std::move(inputs), output, std::move(fn)});
}

template <typename T>
void GradTape<T>::register_parameter(const std::string& name, const Shape& shape) {
  if (!recording_) return;
  for (const auto& [n, s] : parameters_) {
    if (n == name) return;
  }
  parameters_.emplace_back(name, shape);
}

template <typename T>
GradMap<T> backward(GradTape<T>& tape, const Tensor<T>& output_grad) {
  if (!tape.recording_) throw ConfigError("backward needs a tape from a train-mode forward");
  if (tape.consumed_) throw ConfigError("tape already consumed by a previous backward");
  if (!tape.output_) throw ConfigError("tape has no output value");
  const auto out_id = *tape.output_;
  if (output_grad.shape() != tape.shapes_[out_id]) {
    throw ShapeError("output gradient " + shape_str(output_grad.shape()) + " does not match output " +
                     shape_str(tape.shapes_[out_id]));
  }
  tape.consumed_ = true;

  GradMap<T> param_grads;
  for (const auto& [name, shape] : tape.parameters_) param_grads.emplace(name, Tensor<T>(shape));

  std::vector<std::optional<Tensor<T>>> grads(tape.shapes_.size());
  grads[out_id] = output_grad;
  for (auto it = tape.nodes_.rbegin(); it != tape.nodes_.rend(); ++it) {
    auto& node = *it;
    if (!grads[node.output]) continue;
    std::vector<bool> need(node.inputs.size());
    for (std::size_t i = 0; i < node.inputs.size(); ++i) need[i] = tape.requires_grad_[node.inputs[i]];
    std::vector<Tensor<T>> in_grads = node.backward(*grads[node.output], need, param_grads);
    grads[node.output].reset();
    for (std::size_t i = 0; i < node.inputs.size(); ++i) {
      if (!need[i]) continue;
      const auto id = node.inputs[i];
      Tensor<T>& g = in_grads.at(i);
      if (g.shape() != tape.shapes_[id]) {
        throw ShapeError(node.op + " backward produced " + shape_str(g.shape()) + " for input " +
                         shape_str(tape.shapes_[id]));
      }
      require_finite(g, node.op + " backward");
      if (!grads[id]) {
        grads[id] = std::move(g);
      } else {
        Tensor<T>& acc = *grads[id];
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += g[k];
      }
    }
    node.backward = nullptr;  // release saved intermediates early
  }
  for (auto& [name, g] : param_grads) require_finite(g, "gradient of " + name);
  return param_grads;
}

template class GradTape<float>;
template class GradTape<double>;
template GradMap<float> backward(GradTape<float>&, const Tensor<float>&);
template GradMap<double> backward(GradTape<double>&, const Tensor<double>&);

}  // namespace lowfake::nn
