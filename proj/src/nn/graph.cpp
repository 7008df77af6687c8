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

#include "lowfake/nn/graph.hpp"

#include <algorithm>

namespace lowfake::nn {

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv2d:
      return "conv2d";
    case LayerKind::batchnorm:
      return "batchnorm";
    case LayerKind::maxpool:
      return "maxpool";
    case LayerKind::dense:
      return "dense";
    case LayerKind::dropout:
      return "dropout";
    case LayerKind::activation:
      return "activation";
    case LayerKind::flatten:
      return "flatten";
    case LayerKind::concat:
      return "concat";
    case LayerKind::sigmoid:
      return "sigmoid";
    case LayerKind::softmax:
      return "softmax";
  }
  return "unknown";
}

std::size_t count_params(const ModelGraph& graph) {
  std::size_t n = 0;
  for (const ParamSpec& p : graph.params) {
    if (p.trainable()) n += shape_size(p.shape);
  }
  return n;
}

std::size_t count_trainable_tensors(const ModelGraph& graph) {
  return static_cast<std::size_t>(
      std::count_if(graph.params.begin(), graph.params.end(),
                    [](const ParamSpec& p) { return p.trainable(); }));
}

GraphBuilder::GraphBuilder(std::string name, Shape input_shape)
    : name_(std::move(name)),
      input_shape_(input_shape),
      shape_(std::move(input_shape)),
      params_(std::make_shared<std::vector<ParamSpec>>()) {
  if (shape_.empty()) throw ShapeError("graph input shape must not be empty");
  for (std::size_t e : shape_) {
    if (e == 0) throw ShapeError("graph input extents must be positive");
  }
}

GraphBuilder::GraphBuilder(Shape input_shape, std::shared_ptr<std::vector<ParamSpec>> params)
    : input_shape_(input_shape), shape_(std::move(input_shape)), params_(std::move(params)) {}

void GraphBuilder::add_param(ParamSpec p) {
  for (const ParamSpec& q : *params_) {
    if (q.name == p.name) throw ConfigError("duplicate parameter name '" + p.name + "'");
  }
  params_->push_back(std::move(p));
}

LayerSpec& GraphBuilder::push(LayerSpec layer, Shape out) {
  layer.input_shape = shape_;
  layer.output_shape = out;
  shape_ = std::move(out);
  layers_.push_back(std::move(layer));
  return layers_.back();
}

GraphBuilder& GraphBuilder::conv2d(const std::string& name, std::size_t filters,
                                   std::size_t kernel, std::size_t dilation) {
  if (shape_.size() != 3) throw ShapeError("conv2d '" + name + "' needs an HWC input, got " + shape_str(shape_));
  if (filters == 0 || kernel == 0 || dilation == 0) throw ConfigError("conv2d '" + name + "': zero hyperparameter");
  const std::size_t cin = shape_[2];
  add_param({name + "/kernel", {kernel, kernel, cin, filters}, ParamRole::kernel,
             kernel * kernel * cin, kernel * kernel * filters});
  add_param({name + "/bias", {filters}, ParamRole::bias, 0, 0});
  LayerSpec l;
  l.kind = LayerKind::conv2d;
  l.name = name;
  l.filters = filters;
  l.kernel = kernel;
  l.dilation = dilation;
  push(std::move(l), {shape_[0], shape_[1], filters});
  return *this;
}

GraphBuilder& GraphBuilder::batchnorm(const std::string& name) {
  const std::size_t c = shape_.back();
  add_param({name + "/gamma", {c}, ParamRole::gamma, 0, 0});
  add_param({name + "/beta", {c}, ParamRole::beta, 0, 0});
  add_param({name + "/moving_mean", {c}, ParamRole::moving_mean, 0, 0});
  add_param({name + "/moving_variance", {c}, ParamRole::moving_variance, 0, 0});
  LayerSpec l;
  l.kind = LayerKind::batchnorm;
  l.name = name;
  push(std::move(l), shape_);
  return *this;
}

GraphBuilder& GraphBuilder::maxpool(std::size_t pool) {
  if (shape_.size() != 3) throw ShapeError("maxpool needs an HWC input, got " + shape_str(shape_));
  if (pool == 0 || shape_[0] % pool != 0 || shape_[1] % pool != 0) {
    throw ShapeError("maxpool " + std::to_string(pool) + " does not divide " + shape_str(shape_));
  }
  LayerSpec l;
  l.kind = LayerKind::maxpool;
  l.pool = pool;
  push(std::move(l), {shape_[0] / pool, shape_[1] / pool, shape_[2]});
  return *this;
}

GraphBuilder& GraphBuilder::dense(const std::string& name, std::size_t units) {
  if (shape_.size() != 1) throw ShapeError("dense '" + name + "' needs a flat input, got " + shape_str(shape_));
  if (units == 0) throw ConfigError("dense '" + name + "': zero units");
  const std::size_t in = shape_[0];
  add_param({name + "/kernel", {in, units}, ParamRole::kernel, in, units});
  add_param({name + "/bias", {units}, ParamRole::bias, 0, 0});
  LayerSpec l;
  l.kind = LayerKind::dense;
  l.name = name;
  l.units = units;
  push(std::move(l), {units});
  return *this;
}

GraphBuilder& GraphBuilder::dropout(double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1)");
  LayerSpec l;
  l.kind = LayerKind::dropout;
  l.rate = rate;
  push(std::move(l), shape_);
  return *this;
}

GraphBuilder& GraphBuilder::activation(ActivationKind kind) {
  LayerSpec l;
  l.kind = LayerKind::activation;
  l.activation = kind;
  push(std::move(l), shape_);
  return *this;
}

GraphBuilder& GraphBuilder::flatten() {
  LayerSpec l;
  l.kind = LayerKind::flatten;
  push(std::move(l), {shape_size(shape_)});
  return *this;
}

GraphBuilder& GraphBuilder::sigmoid() {
  LayerSpec l;
  l.kind = LayerKind::sigmoid;
  push(std::move(l), shape_);
  return *this;
}

GraphBuilder& GraphBuilder::softmax() {
  LayerSpec l;
  l.kind = LayerKind::softmax;
  push(std::move(l), shape_);
  return *this;
}

GraphBuilder& GraphBuilder::concat(const std::vector<BranchFn>& branches) {
  if (branches.empty()) throw ConfigError("concat needs at least one branch");
  LayerSpec l;
  l.kind = LayerKind::concat;
  Shape out;
  for (const BranchFn& fn : branches) {
    GraphBuilder sub(shape_, params_);
    fn(sub);
    if (sub.shape_.size() != shape_.size()) throw ShapeError("concat branch changed rank");
    if (out.empty()) {
      out = sub.shape_;
    } else {
      if (!std::equal(out.begin(), out.end() - 1, sub.shape_.begin())) {
        throw ShapeError("concat branches disagree: " + shape_str(out) + " vs " + shape_str(sub.shape_));
      }
      out.back() += sub.shape_.back();
    }
    l.branches.push_back(std::move(sub.layers_));
  }
  push(std::move(l), std::move(out));
  return *this;
}

ModelGraph GraphBuilder::build(ActivationKind conv_act, ActivationKind dense_act) {
  ModelGraph g;
  g.name = std::move(name_);
  g.input_shape = std::move(input_shape_);
  g.output_shape = shape_;
  g.layers = std::move(layers_);
  g.params = std::move(*params_);
  g.conv_activation = conv_act;
  g.dense_activation = dense_act;
  return g;
}

}  // namespace lowfake::nn
