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

#include <cstdint>
#include <string>

#include "lowfake/nn/graph.hpp"
#include "lowfake/nn/params.hpp"

namespace lowfake::nn {

struct NetworkGradCheck {
  double max_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

/// Compares backward() against central differences for every trainable
/// parameter element, in double precision and train mode.
///
/// The scalar objective is sum(output * R) with R ~ N(0, 1) drawn from
/// `seed`; dropout masks are re-drawn from the same seed on each forward so
/// every evaluation sees the same mask. Error per element is
/// |analytic - numeric| / max(|analytic|, |numeric|, floor).
///
/// An element whose two-point estimate misses `tolerance` is re-estimated
/// with the five-point stencil, then with both stencils at step h/10; the
/// closest estimate is kept. This removes O(h^2) truncation on small
/// gradients and steps that straddle a ReLU kink or a max-pool switch,
/// while a wrong analytic gradient still disagrees with every estimate.
NetworkGradCheck check_network_gradients(const ModelGraph& graph, ParameterStore<double> params,
                                         const Tensor<double>& input, std::uint64_t seed,
                                         double h = 1e-5, double floor = 1e-4, double tolerance = 1e-6);

}  // namespace lowfake::nn
