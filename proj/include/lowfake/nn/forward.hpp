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

#include "lowfake/nn/graph.hpp"
#include "lowfake/nn/ops.hpp"
#include "lowfake/nn/params.hpp"
#include "lowfake/nn/tape.hpp"
#include "lowfake/random.hpp"

namespace lowfake::nn {

enum class Mode { train, eval };

template <typename T>
struct ForwardResult {
  Tensor<T> output;
  GradTape<T> tape;
};

/// Runs `input` (batch-first, per-sample shape = graph.input_shape) through
/// the graph.
///
/// Train mode records a tape, samples dropout masks from `rng` and folds
/// batch statistics into the BN running averages held in `params`. Eval mode
/// records nothing, treats dropout as identity, normalizes with the running
/// statistics and leaves `params` untouched.
///
/// Throws ShapeError on an input/parameter mismatch and NumericError as soon
/// as any layer produces NaN or Inf.
template <typename T>
ForwardResult<T> forward(const ModelGraph& graph, ParameterStore<T>& params, const Tensor<T>& input,
                         Mode mode, Rng& rng, double bn_momentum = kBatchNormMomentum);

/// Eval-mode forward on a read-only parameter store.
template <typename T>
Tensor<T> predict(const ModelGraph& graph, const ParameterStore<T>& params, const Tensor<T>& input);

}  // namespace lowfake::nn
