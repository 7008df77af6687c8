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
#include <cstdint>
#include <vector>

#include "lowfake/activations.hpp"
#include "lowfake/tensor.hpp"

// Layer primitives. Image tensors are NHWC, flat tensors are (N, features).
// Each *_backward returns gradients shaped like the corresponding inputs.

namespace lowfake::nn {

// ---- convolution ("same" padding, stride 1) --------------------------------

/// kernel: (k, k, Cin, Cout), bias: (Cout). Effective extent (k-1)*dilation+1.
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& bias,
                         std::size_t dilation);

template <typename T>
struct Conv2dGrads {
  Tensor<T> input;  // empty unless requested
  Tensor<T> kernel;
  Tensor<T> bias;
};

template <typename T>
Conv2dGrads<T> conv2d_backward(const Tensor<T>& x, const Tensor<T>& kernel, std::size_t dilation,
                               const Tensor<T>& grad_out, bool need_input_grad);

// ---- dense ------------------------------------------------------------------

/// x: (N, in), kernel: (in, out), bias: (out).
template <typename T>
Tensor<T> dense_forward(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& bias);

template <typename T>
struct DenseGrads {
  Tensor<T> input;
  Tensor<T> kernel;
  Tensor<T> bias;
};

template <typename T>
DenseGrads<T> dense_backward(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& grad_out,
                             bool need_input_grad);

// ---- batch normalization (statistics over every axis but the last) ---------

inline constexpr double kBatchNormEpsilon = 1e-3;
inline constexpr double kBatchNormMomentum = 0.99;

template <typename T>
struct BatchNormCache {
  Tensor<T> normalized;    // x_hat
  std::vector<T> inv_std;  // per channel
  std::vector<T> mean;     // batch mean per channel
  std::vector<T> variance; // biased batch variance per channel
};

template <typename T>
Tensor<T> batchnorm_train(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                          BatchNormCache<T>& cache, double eps = kBatchNormEpsilon);

template <typename T>
Tensor<T> batchnorm_eval(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                         const Tensor<T>& moving_mean, const Tensor<T>& moving_variance,
                         double eps = kBatchNormEpsilon);

template <typename T>
struct BatchNormGrads {
  Tensor<T> input;
  Tensor<T> gamma;
  Tensor<T> beta;
};

template <typename T>
BatchNormGrads<T> batchnorm_backward(const BatchNormCache<T>& cache, const Tensor<T>& gamma,
                                     const Tensor<T>& grad_out);

/// running = momentum * running + (1 - momentum) * batch
template <typename T>
void batchnorm_update_running(const BatchNormCache<T>& cache, Tensor<T>& moving_mean,
                              Tensor<T>& moving_variance, double momentum = kBatchNormMomentum);

// ---- max pooling (window = stride = pool) -----------------------------------

/// `argmax` receives, per output element, the flat input index that won.
/// Ties go to the first position in raster order.
template <typename T>
Tensor<T> maxpool_forward(const Tensor<T>& x, std::size_t pool, std::vector<std::uint32_t>& argmax);

template <typename T>
Tensor<T> maxpool_backward(const Shape& input_shape, const std::vector<std::uint32_t>& argmax,
                           const Tensor<T>& grad_out);

// ---- elementwise -------------------------------------------------------------

template <typename T>
Tensor<T> activation_forward(ActivationKind kind, const Tensor<T>& x);

template <typename T>
Tensor<T> activation_backward(ActivationKind kind, const Tensor<T>& x, const Tensor<T>& grad_out);

template <typename T>
struct ActivationWithGrad {
  Tensor<T> value;
  Tensor<T> derivative;  // elementwise f'(x); backward is grad_out * derivative
};

/// Single pass producing f(x) and f'(x). The float path is vectorized.
template <typename T>
ActivationWithGrad<T> activation_forward_with_grad(ActivationKind kind, const Tensor<T>& x);

template <typename T>
Tensor<T> sigmoid_forward(const Tensor<T>& x);

template <typename T>
Tensor<T> sigmoid_backward(const Tensor<T>& y, const Tensor<T>& grad_out);

template <typename T>
Tensor<T> softmax_forward(const Tensor<T>& x);

template <typename T>
Tensor<T> softmax_backward(const Tensor<T>& y, const Tensor<T>& grad_out);

/// Elementwise product; used for dropout masks.
template <typename T>
Tensor<T> multiply(const Tensor<T>& a, const Tensor<T>& b);

// ---- channel concat ------------------------------------------------------------

template <typename T>
Tensor<T> concat_channels(const std::vector<const Tensor<T>*>& parts);

/// Inverse of concat_channels: slices `grad` into pieces of the given channel counts.
template <typename T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& grad, const std::vector<std::size_t>& channels);

}  // namespace lowfake::nn
