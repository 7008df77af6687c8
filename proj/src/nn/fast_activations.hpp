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

#include "lowfake/activations.hpp"

namespace lowfake::nn::detail {

/// Vectorized single-precision activation: writes value and derivative for
/// `n` elements. Agrees with the scalar activate()/activate_grad() to a few
/// float ulps; double precision always goes through the scalar path.
void activate_with_grad_f32(ActivationKind kind, const float* x, float* y, float* dy, std::size_t n);

void activate_f32(ActivationKind kind, const float* x, float* y, std::size_t n);

}  // namespace lowfake::nn::detail
