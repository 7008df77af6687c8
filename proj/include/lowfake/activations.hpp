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

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include "lowfake/error.hpp"

namespace lowfake {

/// Activation functions usable in the conv and dense slots of a model.
///
/// The five study kinds are relu, leaky_relu, swish, mish and pish. `elu`
/// exists only to fill the sixth row/column of the stage-1 grid.
enum class ActivationKind : std::uint8_t { relu, leaky_relu, swish, mish, pish, elu };

inline constexpr double kLeakyReluAlpha = 0.1;
inline constexpr double kEluAlpha = 1.0;

inline constexpr std::array<ActivationKind, 5> kStudyActivations = {
    ActivationKind::relu, ActivationKind::leaky_relu, ActivationKind::swish,
    ActivationKind::mish, ActivationKind::pish};

inline constexpr std::array<ActivationKind, 6> kGridActivations = {
    ActivationKind::relu, ActivationKind::leaky_relu, ActivationKind::swish,
    ActivationKind::mish, ActivationKind::pish,       ActivationKind::elu};

std::string_view to_string(ActivationKind kind);

/// Accepts `relu`, `leaky_relu`, `swish`, `mish`, `pish` (and `elu`).
/// Throws ConfigError for anything else.
ActivationKind parse_activation(std::string_view name);

namespace detail {

template <typename T>
inline void require_finite_arg(T x) {
  if (!std::isfinite(x)) throw NumericError("activation argument is not finite");
}

}  // namespace detail

// ln(1 + e^x) with the overflow-safe branches at |x| > 20.
template <typename T>
inline T softplus(T x) {
  if (x > T(20)) return x + std::exp(-x);
  if (x < T(-20)) return std::exp(x);
  return std::log1p(std::exp(x));
}

template <typename T>
inline T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

// d/dx sigmoid = e^-x / (1 + e^-x)^2 = s (1 - s)
template <typename T>
inline T sigmoid_grad(T x) {
  const T s = sigmoid(x);
  return s * (T(1) - s);
}

template <typename T>
inline T pish(T x) {
  return x * std::atan(softplus(x) + sigmoid(x));
}

// x (sigmoid'(x) + sigmoid(x)) / ((sigmoid(x) + softplus(x))^2 + 1) + atan(sigmoid(x) + softplus(x))
template <typename T>
inline T pish_grad(T x) {
  const T u = sigmoid(x) + softplus(x);
  return x * (sigmoid_grad(x) + sigmoid(x)) / (u * u + T(1)) + std::atan(u);
}

template <typename T>
inline T mish(T x) {
  return x * std::tanh(softplus(x));
}

template <typename T>
inline T mish_grad(T x) {
  const T t = std::tanh(softplus(x));
  return t + x * (T(1) - t * t) * sigmoid(x);
}

template <typename T>
inline T swish(T x) {
  return x * sigmoid(x);
}

template <typename T>
inline T swish_grad(T x) {
  const T s = sigmoid(x);
  return s + x * s * (T(1) - s);
}

/// Scalar activation value. Throws NumericError on NaN/Inf input.
template <typename T>
inline T activate(ActivationKind kind, T x) {
  detail::require_finite_arg(x);
  switch (kind) {
    case ActivationKind::relu:
      return x > T(0) ? x : T(0);
    case ActivationKind::leaky_relu:
      return x >= T(0) ? x : T(kLeakyReluAlpha) * x;
    case ActivationKind::swish:
      return swish(x);
    case ActivationKind::mish:
      return mish(x);
    case ActivationKind::pish:
      return pish(x);
    case ActivationKind::elu:
      return x >= T(0) ? x : T(kEluAlpha) * std::expm1(x);
  }
  return x;
}

/// Scalar derivative. relu and leaky_relu use 1 at x = 0.
template <typename T>
inline T activate_grad(ActivationKind kind, T x) {
  detail::require_finite_arg(x);
  switch (kind) {
    case ActivationKind::relu:
      return x >= T(0) ? T(1) : T(0);
    case ActivationKind::leaky_relu:
      return x >= T(0) ? T(1) : T(kLeakyReluAlpha);
    case ActivationKind::swish:
      return swish_grad(x);
    case ActivationKind::mish:
      return mish_grad(x);
    case ActivationKind::pish:
      return pish_grad(x);
    case ActivationKind::elu:
      return x >= T(0) ? T(1) : T(kEluAlpha) * std::exp(x);
  }
  return T(1);
}

/// Elementwise map over a buffer; `out` may alias `in`.
template <typename T>
void activate(ActivationKind kind, std::span<const T> in, std::span<T> out) {
  if (in.size() != out.size()) throw ShapeError("activate: buffer sizes differ");
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = activate(kind, in[i]);
}

struct PishExtremum {
  double x_min;
  double f_min;
};

/// Global minimum of Pish, located by golden-section search over [-10, 0].
PishExtremum pish_extremum();

struct GradCheckResult {
  double max_error = 0.0;  // max |analytic - numeric| / max(1, |analytic|)
  double worst_x = 0.0;
  std::size_t points = 0;
};

/// Compares activate_grad with central differences (step h) at `points`
/// uniform samples of [lo, hi] in double precision.
GradCheckResult check_activation_gradient(ActivationKind kind, std::size_t points, double lo,
                                          double hi, std::uint64_t seed, double h = 1e-5);

}  // namespace lowfake
