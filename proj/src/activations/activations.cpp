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

#include "lowfake/activations.hpp"

#include <algorithm>
#include <random>

namespace lowfake {

std::string_view to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::relu:
      return "relu";
    case ActivationKind::leaky_relu:
      return "leaky_relu";
    case ActivationKind::swish:
      return "swish";
    case ActivationKind::mish:
      return "mish";
    case ActivationKind::pish:
      return "pish";
    case ActivationKind::elu:
      return "elu";
  }
  return "unknown";
}

ActivationKind parse_activation(std::string_view name) {
  for (ActivationKind k : kGridActivations) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown activation '" + std::string(name) +
                    "' (expected relu, leaky_relu, swish, mish, pish or elu)");
}

PishExtremum pish_extremum() {
  // Pish is unimodal on [-10, 0]: decreasing until the minimizer, then increasing.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -10.0;
  double b = 0.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = pish(c);
  double fd = pish(d);
  while (b - a > 1e-12) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = pish(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = pish(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, pish(x)};
}

GradCheckResult check_activation_gradient(ActivationKind kind, std::size_t points, double lo,
                                          double hi, std::uint64_t seed, double h) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  GradCheckResult r;
  r.points = points;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = dist(rng);
    const double analytic = activate_grad(kind, x);
    const double numeric = (activate(kind, x + h) - activate(kind, x - h)) / (2.0 * h);
    const double err = std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
    if (err > r.max_error) {
      r.max_error = err;
      r.worst_x = x;
    }
  }
  return r;
}

}  // namespace lowfake
