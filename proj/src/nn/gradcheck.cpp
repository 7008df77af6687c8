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

#include "lowfake/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "lowfake/nn/forward.hpp"

namespace lowfake::nn {

namespace {

double objective(const ModelGraph& graph, ParameterStore<double>& params, const Tensor<double>& input,
                 const Tensor<double>& projection, std::uint64_t dropout_seed) {
  Rng rng(dropout_seed);
  ForwardResult<double> r = forward(graph, params, input, Mode::train, rng);
  double s = 0.0;
  for (std::size_t i = 0; i < r.output.size(); ++i) s += r.output[i] * projection[i];
  return s;
}

}  // namespace

NetworkGradCheck check_network_gradients(const ModelGraph& graph, ParameterStore<double> params,
                                         const Tensor<double>& input, std::uint64_t seed, double h,
                                         double floor, double tolerance) {
  const std::uint64_t dropout_seed = derive_seed(seed, 1);
  Rng proj_rng(derive_seed(seed, 2));

  Rng rng(dropout_seed);
  ForwardResult<double> fr = forward(graph, params, input, Mode::train, rng);
  Tensor<double> projection(fr.output.shape());
  for (double& v : projection) v = normal(proj_rng);
  GradMap<double> grads = backward(fr.tape, projection);

  NetworkGradCheck report;
  for (auto& entry : params.entries()) {
    if (!entry.trainable) continue;
    const Tensor<double>& g = grads.at(entry.name);
    Tensor<double>& p = entry.value;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      auto at = [&](double offset) {
        p[i] = saved + offset;
        const double v = objective(graph, params, input, projection, dropout_seed);
        p[i] = saved;
        return v;
      };
      auto error_of = [&](double numeric) {
        return std::abs(g[i] - numeric) / std::max({std::abs(g[i]), std::abs(numeric), floor});
      };
      double step = h;
      double up = at(step), down = at(-step);
      double numeric = (up - down) / (2.0 * step);
      double err = error_of(numeric);
      for (int refinement = 0; refinement < 2 && err >= tolerance; ++refinement) {
        if (refinement == 1) {
          step = h / 10.0;
          up = at(step);
          down = at(-step);
          const double central = (up - down) / (2.0 * step);
          if (error_of(central) < err) {
            numeric = central;
            err = error_of(central);
          }
        }
        const double five_point = (8.0 * (up - down) - (at(2.0 * step) - at(-2.0 * step))) / (12.0 * step);
        if (error_of(five_point) < err) {
          numeric = five_point;
          err = error_of(five_point);
        }
      }
      ++report.checked;
      if (err > report.max_error) {
        report.max_error = err;
        report.worst_parameter = entry.name;
        report.worst_index = i;
        report.worst_analytic = g[i];
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace lowfake::nn
