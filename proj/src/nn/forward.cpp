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

#include "lowfake/nn/forward.hpp"

#include <memory>

#include "lowfake/error.hpp"
#include "lowfake/nn/ops.hpp"

namespace lowfake::nn {

namespace {

template <typename T>
void accumulate(GradMap<T>& grads, const std::string& name, const Tensor<T>& g) {
  Tensor<T>& acc = grads.at(name);
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
}

template <typename T>
using Ptr = std::shared_ptr<const Tensor<T>>;

template <typename T>
struct Value {
  typename GradTape<T>::ValueId id;
  Ptr<T> tensor;
};

// `store` is null in eval mode; `params` is always readable.
template <typename T>
class Executor {
 public:
  Executor(const ParameterStore<T>& params, ParameterStore<T>* store, GradTape<T>& tape, Rng* rng,
           double bn_momentum = kBatchNormMomentum)
      : params_(params), store_(store), tape_(tape), rng_(rng), bn_momentum_(bn_momentum) {}

  bool training() const { return store_ != nullptr; }

  Value<T> run(const std::vector<LayerSpec>& layers, Value<T> x) {
    for (const LayerSpec& layer : layers) x = step(layer, std::move(x));
    return x;
  }

 private:
  Value<T> emit(const std::string& op, std::vector<typename GradTape<T>::ValueId> inputs, Tensor<T> out,
                typename GradTape<T>::BackwardFn fn) {
    return emit_shared(op, std::move(inputs), std::make_shared<const Tensor<T>>(std::move(out)), std::move(fn));
  }

  Value<T> emit_shared(const std::string& op, std::vector<typename GradTape<T>::ValueId> inputs, Ptr<T> out,
                       typename GradTape<T>::BackwardFn fn) {
    require_finite(*out, op);
    const auto id = tape_.new_value(out->shape(), training());
    if (training()) tape_.record(op, std::move(inputs), id, std::move(fn));
    return {id, std::move(out)};
  }

  const Tensor<T>& param(const std::string& name) {
    const Tensor<T>& t = params_.at(name);
    if (training()) tape_.register_parameter(name, t.shape());
    return t;
  }

  Value<T> step(const LayerSpec& layer, Value<T> x) {
    const std::string op = std::string(to_string(layer.kind)) + (layer.name.empty() ? "" : ":" + layer.name);
    switch (layer.kind) {
      case LayerKind::conv2d: {
        const std::string kname = layer.name + "/kernel";
        const std::string bname = layer.name + "/bias";
        const Tensor<T>& kernel = param(kname);
        const Tensor<T>& bias = param(bname);
        Tensor<T> y = conv2d_forward(*x.tensor, kernel, bias, layer.dilation);
        typename GradTape<T>::BackwardFn fn;
        if (training()) {
          fn = [xin = x.tensor, k = &kernel, d = layer.dilation, kname, bname](
                   const Tensor<T>& gy, const std::vector<bool>& need, GradMap<T>& pg) {
            Conv2dGrads<T> g = conv2d_backward(*xin, *k, d, gy, need[0]);
            accumulate(pg, kname, g.kernel);
            accumulate(pg, bname, g.bias);
            std::vector<Tensor<T>> out;
            out.push_back(std::move(g.input));
            return out;
          };
        }
        return emit(op, {x.id}, std::move(y), std::move(fn));
      }
      case LayerKind::dense: {
        const std::string kname = layer.name + "/kernel";
        const std::string bname = layer.name + "/bias";
        const Tensor<T>& kernel = param(kname);
        const Tensor<T>& bias = param(bname);
        Tensor<T> y = dense_forward(*x.tensor, kernel, bias);
        typename GradTape<T>::BackwardFn fn;
        if (training()) {
          fn = [xin = x.tensor, k = &kernel, kname, bname](const Tensor<T>& gy, const std::vector<bool>& need,
                                                            GradMap<T>& pg) {
            DenseGrads<T> g = dense_backward(*xin, *k, gy, need[0]);
            accumulate(pg, kname, g.kernel);
            accumulate(pg, bname, g.bias);
            std::vector<Tensor<T>> out;
            out.push_back(std::move(g.input));
            return out;
          };
        }
        return emit(op, {x.id}, std::move(y), std::move(fn));
      }
      case LayerKind::batchnorm: {
        const std::string gname = layer.name + "/gamma";
        const std::string bname = layer.name + "/beta";
        const Tensor<T>& gamma = param(gname);
        const Tensor<T>& beta = param(bname);
        if (!training()) {
          Tensor<T> y = batchnorm_eval(*x.tensor, gamma, beta, params_.at(layer.name + "/moving_mean"),
                                       params_.at(layer.name + "/moving_variance"));
          return emit(op, {x.id}, std::move(y), nullptr);
        }
        auto cache = std::make_shared<BatchNormCache<T>>();
        Tensor<T> y = batchnorm_train(*x.tensor, gamma, beta, *cache);
        batchnorm_update_running(*cache, store_->at(layer.name + "/moving_mean"),
                                 store_->at(layer.name + "/moving_variance"), bn_momentum_);
        auto fn = [cache, g = &gamma, gname, bname](const Tensor<T>& gy, const std::vector<bool>&,
                                                     GradMap<T>& pg) {
          BatchNormGrads<T> grads = batchnorm_backward(*cache, *g, gy);
          accumulate(pg, gname, grads.gamma);
          accumulate(pg, bname, grads.beta);
          std::vector<Tensor<T>> out;
          out.push_back(std::move(grads.input));
          return out;
        };
        return emit(op, {x.id}, std::move(y), std::move(fn));
      }
      case LayerKind::maxpool: {
        auto argmax = std::make_shared<std::vector<std::uint32_t>>();
        Tensor<T> y = maxpool_forward(*x.tensor, layer.pool, *argmax);
        typename GradTape<T>::BackwardFn fn;
        if (training()) {
          fn = [argmax, in_shape = x.tensor->shape()](const Tensor<T>& gy, const std::vector<bool>&,
                                                       GradMap<T>&) {
            std::vector<Tensor<T>> out;
            out.push_back(maxpool_backward(in_shape, *argmax, gy));
            return out;
          };
        }
        return emit(op, {x.id}, std::move(y), std::move(fn));
      }
      case LayerKind::dropout: {
        if (!training() || layer.rate == 0.0) return x;
        Tensor<T> mask(x.tensor->shape());
        const T scale = static_cast<T>(1.0 / (1.0 - layer.rate));
        std::bernoulli_distribution keep(1.0 - layer.rate);
        for (T& m : mask) m = keep(*rng_) ? scale : T(0);
        Tensor<T> y = multiply(*x.tensor, mask);
        auto fn = [mask = std::move(mask)](const Tensor<T>& gy, const std::vector<bool>&, GradMap<T>&) {
          std::vector<Tensor<T>> out;
          out.push_back(multiply(gy, mask));
          return out;
        };
        return emit(op, {x.id}, std::move(y), std::move(fn));
      }
      case LayerKind::activation: {
        const std::string aop = op + ":" + std::string(lowfake::to_string(layer.activation));
        if (!training()) return emit(aop, {x.id}, activation_forward(layer.activation, *x.tensor), nullptr);
        ActivationWithGrad<T> a = activation_forward_with_grad(layer.activation, *x.tensor);
        auto fn = [dy = std::move(a.derivative)](const Tensor<T>& gy, const std::vector<bool>&, GradMap<T>&) {
          std::vector<Tensor<T>> out;
          out.push_back(multiply(gy, dy));
          return out;
        };
        return emit(aop, {x.id}, std::move(a.value), std::move(fn));
      }
      case LayerKind::flatten: {
        const Shape in_shape = x.tensor->shape();
        Tensor<T> y = x.tensor->reshaped({in_shape[0], x.tensor->size() / in_shape[0]});
        typename GradTape<T>::BackwardFn fn;
        if (training()) {
          fn = [in_shape](const Tensor<T>& gy, const std::vector<bool>&, GradMap<T>&) {
            std::vector<Tensor<T>> out;
            out.push_back(gy.reshaped(in_shape));
            return out;
          };
        }
        return emit(op, {x.id}, std::move(y), std::move(fn));
      }
      case LayerKind::sigmoid: {
        auto y = std::make_shared<const Tensor<T>>(sigmoid_forward(*x.tensor));
        typename GradTape<T>::BackwardFn fn;
        if (training()) {
          fn = [y](const Tensor<T>& gy, const std::vector<bool>&, GradMap<T>&) {
            std::vector<Tensor<T>> out;
            out.push_back(sigmoid_backward(*y, gy));
            return out;
          };
        }
        return emit_shared(op, {x.id}, y, std::move(fn));
      }
      case LayerKind::softmax: {
        auto y = std::make_shared<const Tensor<T>>(softmax_forward(*x.tensor));
        typename GradTape<T>::BackwardFn fn;
        if (training()) {
          fn = [y](const Tensor<T>& gy, const std::vector<bool>&, GradMap<T>&) {
            std::vector<Tensor<T>> out;
            out.push_back(softmax_backward(*y, gy));
            return out;
          };
        }
        return emit_shared(op, {x.id}, y, std::move(fn));
      }
      case LayerKind::concat: {
        std::vector<Value<T>> outs;
        for (const auto& branch : layer.branches) outs.push_back(run(branch, x));
        std::vector<const Tensor<T>*> parts;
        std::vector<typename GradTape<T>::ValueId> ids;
        std::vector<std::size_t> channels;
        for (const Value<T>& v : outs) {
          parts.push_back(v.tensor.get());
          ids.push_back(v.id);
          channels.push_back(v.tensor->shape().back());
        }
        Tensor<T> y = concat_channels(parts);
        typename GradTape<T>::BackwardFn fn;
        if (training()) {
          fn = [channels](const Tensor<T>& gy, const std::vector<bool>&, GradMap<T>&) {
            return split_channels(gy, channels);
          };
        }
        return emit(op, std::move(ids), std::move(y), std::move(fn));
      }
    }
    throw ConfigError("unsupported layer kind");
  }

  const ParameterStore<T>& params_;
  ParameterStore<T>* store_;
  GradTape<T>& tape_;
  Rng* rng_;
  double bn_momentum_;
};

template <typename T>
void check_input(const ModelGraph& graph, const Tensor<T>& input) {
  const Shape& s = input.shape();
  const bool ok = s.size() == graph.input_shape.size() + 1 &&
                  std::equal(graph.input_shape.begin(), graph.input_shape.end(), s.begin() + 1);
  if (!ok) {
    throw ShapeError("graph '" + graph.name + "' expects (N," + shape_str(graph.input_shape).substr(1) +
                     " input, got " + shape_str(s));
  }
  require_finite(input, "graph input");
}

template <typename T>
void check_output(const ModelGraph& graph, const Tensor<T>& out, std::size_t batch) {
  Shape expected{batch};
  expected.insert(expected.end(), graph.output_shape.begin(), graph.output_shape.end());
  if (out.shape() != expected) {
    throw ShapeError("graph '" + graph.name + "' produced " + shape_str(out.shape()) + ", declared " +
                     shape_str(expected));
  }
}

}  // namespace

template <typename T>
ForwardResult<T> forward(const ModelGraph& graph, ParameterStore<T>& params, const Tensor<T>& input,
                         Mode mode, Rng& rng, double bn_momentum) {
  if (!(bn_momentum >= 0.0 && bn_momentum < 1.0)) throw ConfigError("bn_momentum must lie in [0, 1)");
  check_input(graph, input);
  const bool train = mode == Mode::train;
  ForwardResult<T> result{Tensor<T>(), GradTape<T>(train)};
  Executor<T> exec(params, train ? &params : nullptr, result.tape, &rng, bn_momentum);
  Value<T> x{result.tape.new_value(input.shape(), false), std::make_shared<const Tensor<T>>(input)};
  Value<T> y = exec.run(graph.layers, std::move(x));
  result.tape.set_output(y.id);
  result.output = *y.tensor;
  check_output(graph, result.output, input.dim(0));
  return result;
}

template <typename T>
Tensor<T> predict(const ModelGraph& graph, const ParameterStore<T>& params, const Tensor<T>& input) {
  check_input(graph, input);
  GradTape<T> tape(false);
  Executor<T> exec(params, nullptr, tape, nullptr);
  Value<T> x{tape.new_value(input.shape(), false), std::make_shared<const Tensor<T>>(input)};
  Value<T> y = exec.run(graph.layers, std::move(x));
  Tensor<T> out = *y.tensor;
  check_output(graph, out, input.dim(0));
  return out;
}

template ForwardResult<float> forward(const ModelGraph&, ParameterStore<float>&, const Tensor<float>&, Mode,
                                      Rng&, double);
template ForwardResult<double> forward(const ModelGraph&, ParameterStore<double>&, const Tensor<double>&,
                                       Mode, Rng&, double);
template Tensor<float> predict(const ModelGraph&, const ParameterStore<float>&, const Tensor<float>&);
template Tensor<double> predict(const ModelGraph&, const ParameterStore<double>&, const Tensor<double>&);

}  // namespace lowfake::nn
