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
#include <memory>
#include <string>
#include <vector>

#include "lowfake/activations.hpp"
#include "lowfake/tensor.hpp"

namespace lowfake::nn {

enum class LayerKind {
  conv2d,      // "same" padding, stride 1, optional dilation
  batchnorm,   // per last-axis channel
  maxpool,     // square window, stride = window
  dense,
  dropout,     // inverted scaling at train time
  activation,
  flatten,
  concat,      // parallel branches over one input, joined on the channel axis
  sigmoid,     // output head
  softmax,     // output head, last axis
};

std::string_view to_string(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::flatten;
  std::string name;  // parameter prefix for conv2d / batchnorm / dense

  std::size_t filters = 0;
  std::size_t kernel = 0;
  std::size_t dilation = 1;
  std::size_t pool = 0;
  std::size_t units = 0;
  double rate = 0.0;
  ActivationKind activation = ActivationKind::relu;

  std::vector<std::vector<LayerSpec>> branches;  // concat only

  Shape input_shape;   // per-sample, filled by GraphBuilder
  Shape output_shape;  // per-sample, filled by GraphBuilder
};

enum class ParamRole { kernel, bias, gamma, beta, moving_mean, moving_variance };

struct ParamSpec {
  std::string name;
  Shape shape;
  ParamRole role = ParamRole::kernel;
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;

  bool trainable() const {
    return role != ParamRole::moving_mean && role != ParamRole::moving_variance;
  }
};

/// Immutable description of a network: layers in execution order, the
/// per-sample input/output shapes and every parameter tensor it owns.
struct ModelGraph {
  std::string name;
  Shape input_shape;
  Shape output_shape;
  std::vector<LayerSpec> layers;
  std::vector<ParamSpec> params;
  ActivationKind conv_activation = ActivationKind::relu;
  ActivationKind dense_activation = ActivationKind::relu;
};

/// Sum of element counts of trainable tensors. BN running statistics excluded.
std::size_t count_params(const ModelGraph& graph);

/// Number of trainable tensors (not elements).
std::size_t count_trainable_tensors(const ModelGraph& graph);

/// Appends layers while tracking the per-sample shape and registering
/// parameters. Shape errors surface at build time rather than at forward.
class GraphBuilder {
 public:
  GraphBuilder(std::string name, Shape input_shape);

  GraphBuilder& conv2d(const std::string& name, std::size_t filters, std::size_t kernel,
                       std::size_t dilation = 1);
  GraphBuilder& batchnorm(const std::string& name);
  GraphBuilder& maxpool(std::size_t pool);
  GraphBuilder& dense(const std::string& name, std::size_t units);
  GraphBuilder& dropout(double rate);
  GraphBuilder& activation(ActivationKind kind);
  GraphBuilder& flatten();
  GraphBuilder& sigmoid();
  GraphBuilder& softmax();

  using BranchFn = std::function<void(GraphBuilder&)>;
  /// Each branch starts from the current shape; outputs must agree on all
  /// but the channel axis.
  GraphBuilder& concat(const std::vector<BranchFn>& branches);

  const Shape& shape() const { return shape_; }

  ModelGraph build(ActivationKind conv_act, ActivationKind dense_act);

 private:
  GraphBuilder(Shape input_shape, std::shared_ptr<std::vector<ParamSpec>> params);
  void add_param(ParamSpec p);
  LayerSpec& push(LayerSpec layer, Shape out);

  std::string name_;
  Shape input_shape_;
  Shape shape_;
  std::vector<LayerSpec> layers_;
  std::shared_ptr<std::vector<ParamSpec>> params_;
};

}  // namespace lowfake::nn
