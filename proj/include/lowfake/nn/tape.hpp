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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lowfake/nn/params.hpp"
#include "lowfake/tensor.hpp"

namespace lowfake::nn {

/// Record of the primitive operations executed by a train-mode forward.
///
/// Values are identified by integer ids; each node maps input ids to one
/// output id and carries a closure holding whatever it saved during the
/// forward pass. Nodes may reference parameter tensors, so the parameter
/// store must outlive the tape and stay unmodified until backward().
template <typename T>
class GradTape {
 public:
  using ValueId = std::size_t;

  /// Receives dL/d(output) and the per-input "gradient wanted" flags; adds
  /// parameter gradients into the map and returns one tensor per input
  /// (empty where not wanted).
  using BackwardFn = std::function<std::vector<Tensor<T>>(
      const Tensor<T>& grad_out, const std::vector<bool>& need_input_grad, GradMap<T>& param_grads)>;

  struct Node {
    std::string op;
    std::vector<ValueId> inputs;
    ValueId output = 0;
    BackwardFn backward;
  };

  explicit GradTape(bool recording = true) : recording_(recording) {}

  bool recording() const { return recording_; }
  bool consumed() const { return consumed_; }

  ValueId new_value(const Shape& shape, bool requires_grad);
  bool requires_grad(ValueId id) const { return requires_grad_.at(id); }
  const Shape& value_shape(ValueId id) const { return shapes_.at(id); }

  void record(std::string op, std::vector<ValueId> inputs, ValueId output, BackwardFn fn);

  /// Marks `name` as trainable: it gets exactly one (possibly zero)
  /// accumulated gradient per backward pass.
  void register_parameter(const std::string& name, const Shape& shape);

  void set_output(ValueId id) { output_ = id; }
  std::optional<ValueId> output() const { return output_; }

  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  template <typename U>
  friend GradMap<U> backward(GradTape<U>& tape, const Tensor<U>& output_grad);

  bool recording_;
  bool consumed_ = false;
  std::vector<Shape> shapes_;
  std::vector<bool> requires_grad_;
  std::vector<Node> nodes_;
  std::vector<std::pair<std::string, Shape>> parameters_;
  std::optional<ValueId> output_;
};

/// Replays the tape in reverse. Consumes the tape: a second call throws.
template <typename T>
GradMap<T> backward(GradTape<T>& tape, const Tensor<T>& output_grad);

}  // namespace lowfake::nn
