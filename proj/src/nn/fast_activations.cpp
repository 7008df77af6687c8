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

#include "fast_activations.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

namespace lowfake::nn::detail {

namespace {

constexpr std::size_t kChunk = 2048;

using Arr = Eigen::Array<float, Eigen::Dynamic, 1>;
using CMap = Eigen::Map<const Arr>;
using Map = Eigen::Map<Arr>;

// Cephes atanf, written branch-free so the loop vectorizes.
inline float atan_f32(float v) {
  const float ax = std::fabs(v);
  const bool big = ax > 2.414213562373095f;
  const bool mid = ax > 0.4142135623730950f;
  const float t = big ? -1.0f / ax : (mid ? (ax - 1.0f) / (ax + 1.0f) : ax);
  const float base = big ? 1.5707963267948966f : (mid ? 0.7853981633974483f : 0.0f);
  const float z = t * t;
  const float p = (((8.05374449538e-2f * z - 1.38776856032e-1f) * z + 1.99777106478e-1f) * z -
                   3.33329491539e-1f) * z * t + t;
  const float r = base + p;
  return v < 0.0f ? -r : r;
}

struct Common {
  Arr e, softplus, sig;
  void compute(const CMap& x) {
    e = x.min(20.0f).exp();
    softplus = (x > 20.0f).select(x, e.log1p());
    sig = e / (1.0f + e);
  }
};

void chunk(ActivationKind kind, const float* xp, float* yp, float* dyp, std::size_t n, Common& c, Arr& tmp) {
  CMap x(xp, static_cast<Eigen::Index>(n));
  Map y(yp, static_cast<Eigen::Index>(n));
  switch (kind) {
    case ActivationKind::relu:
      y = x.max(0.0f);
      if (dyp) Map(dyp, n) = (x >= 0.0f).cast<float>();
      return;
    case ActivationKind::leaky_relu:
      y = (x >= 0.0f).select(x, static_cast<float>(kLeakyReluAlpha) * x);
      if (dyp) Map(dyp, n) = (x >= 0.0f).select(Arr::Ones(n), Arr::Constant(n, static_cast<float>(kLeakyReluAlpha)));
      return;
    case ActivationKind::elu:
      tmp = x.min(0.0f).exp();
      y = (x >= 0.0f).select(x, static_cast<float>(kEluAlpha) * (tmp - 1.0f));
      if (dyp) Map(dyp, n) = (x >= 0.0f).select(Arr::Ones(n), static_cast<float>(kEluAlpha) * tmp);
      return;
    case ActivationKind::swish:
      c.compute(x);
      y = x * c.sig;
      if (dyp) Map(dyp, n) = c.sig + x * c.sig * (1.0f - c.sig);
      return;
    case ActivationKind::mish:
      c.compute(x);
      tmp = c.softplus.tanh();
      y = x * tmp;
      if (dyp) {
        // sech^2(softplus) = 4r^2 / (1 + r^2)^2 with r = 1 / (1 + e^x); avoids 1 - tanh^2 cancellation.
        Arr r = (1.0f + x.exp()).inverse();
        Arr r2 = r * r;
        Map(dyp, n) = tmp + x * (4.0f * r2 / ((1.0f + r2) * (1.0f + r2))) * c.sig;
      }
      return;
    case ActivationKind::pish: {
      c.compute(x);
      Arr u = c.softplus + c.sig;
      tmp.resize(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) tmp[i] = atan_f32(u[i]);
      y = x * tmp;
      if (dyp) Map(dyp, n) = x * (c.sig * (1.0f - c.sig) + c.sig) / (u * u + 1.0f) + tmp;
      return;
    }
  }
}

void run(ActivationKind kind, const float* x, float* y, float* dy, std::size_t n) {
  Common c;
  Arr tmp;
  for (std::size_t off = 0; off < n; off += kChunk) {
    const std::size_t len = std::min(kChunk, n - off);
    chunk(kind, x + off, y + off, dy ? dy + off : nullptr, len, c, tmp);
  }
}

}  // namespace

void activate_with_grad_f32(ActivationKind kind, const float* x, float* y, float* dy, std::size_t n) {
  run(kind, x, y, dy, n);
}

void activate_f32(ActivationKind kind, const float* x, float* y, std::size_t n) { run(kind, x, y, nullptr, n); }

}  // namespace lowfake::nn::detail
