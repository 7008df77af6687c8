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


#include <string>

#include "lowfake/models.hpp"
#include "lowfake/random.hpp"

namespace lowfake::models {

namespace {

GradientCase check(std::string name, const nn::ModelGraph& graph, std::uint64_t seed) {
  auto params = nn::ParameterStore<double>::initialize(graph, derive_seed(seed, 0));
  Rng rng(derive_seed(seed, 1));
  for (auto& e : params.entries()) {
    if (e.trainable && e.value.rank() == 1) {
      for (double& v : e.value) v += uniform(rng, -0.3, 0.3);
    }
  }
  nn::Shape shape{2};
  shape.insert(shape.end(), graph.input_shape.begin(), graph.input_shape.end());
  nn::Tensor<double> x(shape, 0.0);
  for (double& v : x) v = uniform(rng, 0.0, 1.0);
  return {std::move(name), nn::check_network_gradients(graph, std::move(params), x, derive_seed(seed, 2))};
}

}  // namespace

std::vector<GradientCase> gradient_suite(std::uint64_t seed) {
  const MesoGeometry tiny{16, 2};
  std::vector<GradientCase> out;
  std::uint64_t stream = 0;
  for (ActivationKind a : kStudyActivations) {
    const std::string pair = std::string(to_string(a)) + "+" + std::string(to_string(a));
    out.push_back(check("meso4/" + pair, build_meso4(a, a, tiny), derive_seed(seed, stream++)));
  }
  out.push_back(check("mesoinception4/pish+mish",
                      build_mesoinception4(ActivationKind::pish, ActivationKind::mish, tiny),
                      derive_seed(seed, stream++)));
  DepthNetOptions small;
  small.input_extent = 8;
  small.hidden_units = 12;
  small.classes = 3;
  out.push_back(check("depthnet/3xswish", build_depth_net(3, ActivationKind::swish, small), derive_seed(seed, stream++)));
  return out;
}

}  // namespace lowfake::models
