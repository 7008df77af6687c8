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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lowfake/activations.hpp"
#include "lowfake/nn/gradcheck.hpp"
#include "lowfake/nn/graph.hpp"

namespace lowfake::models {

inline constexpr std::size_t kMeso4Params = 27977;
inline constexpr std::size_t kMesoInception4Params = 28615;

/// Spatial geometry of the Meso family. The default is the 256x256x3 input
/// with pools 2,2,2,4 (8x8x16 = 1024 features before the dense head).
/// Smaller inputs are used for gradient checks, e.g. {16, 2}.
struct MesoGeometry {
  std::size_t input_extent = 256;
  std::size_t last_pool = 4;
};

/// conv 8@3x3, 8@5x5, 16@5x5, 16@5x5, each followed by the conv-slot
/// activation, BN and max-pool; then dropout(0.5), dense 16, the dense-slot
/// activation, dropout(0.5), dense 1, sigmoid.
nn::ModelGraph build_meso4(ActivationKind conv_act, ActivationKind dense_act, MesoGeometry geometry = {});

/// Filter counts of one inception module: 1x1 | 1x1->3x3 | 1x1->3x3 d=2 | 1x1->3x3 d=3.
struct InceptionWidths {
  std::size_t a = 0, b = 0, c = 0, d = 0;
  std::size_t channels() const { return a + b + c + d; }
  friend bool operator==(const InceptionWidths&, const InceptionWidths&) = default;
};

struct MesoInceptionWidths {
  InceptionWidths first;
  InceptionWidths second;
  friend bool operator==(const MesoInceptionWidths&, const MesoInceptionWidths&) = default;
};

/// Starting point of the reconciliation search.
inline constexpr MesoInceptionWidths kInceptionCandidate{{1, 4, 4, 2}, {2, 4, 4, 2}};

/// Trainable-parameter count of MesoInception-4 for given branch widths
/// (256x256 geometry), from the per-layer formulas.
std::size_t mesoinception4_param_count(const MesoInceptionWidths& widths);

/// Finds branch widths whose parameter count equals `target`. Tries the
/// candidate first, then enumerates every width in 1..max_width per branch
/// in lexicographic order. Throws ConfigError when nothing matches.
MesoInceptionWidths reconcile_inception_widths(std::size_t target = kMesoInception4Params,
                                               std::size_t max_width = 8);

/// Widths used by build_mesoinception4 when none are given; the result of
/// reconcile_inception_widths() for the published count.
const MesoInceptionWidths& default_inception_widths();

/// Meso-4 with blocks 1-2 replaced by inception modules (each followed by
/// BN and 2x2 pooling). The conv-slot activation follows every conv inside
/// the branches.
nn::ModelGraph build_mesoinception4(ActivationKind conv_act, ActivationKind dense_act,
                                    MesoGeometry geometry = {},
                                    std::optional<MesoInceptionWidths> widths = std::nullopt);

struct DepthNetOptions {
  std::size_t input_extent = 28;
  std::size_t conv1_filters = 8;
  std::size_t conv2_filters = 16;
  std::size_t hidden_units = 500;
  std::size_t classes = 10;
  double dropout = 0.25;
};

inline constexpr std::size_t kMaxDepthNetHidden = 25;

/// Two 3x3 convs, max-pool 2, dropout, then `num_hidden` blocks of
/// dense(500) -> BN -> act -> dropout, then dense(10) and softmax.
nn::ModelGraph build_depth_net(std::size_t num_hidden, ActivationKind act, DepthNetOptions options = {});

enum class ModelName { meso4, mesoinception4, depthnet };

ModelName parse_model_name(std::string_view name);
std::string_view to_string(ModelName name);

struct GradientCase {
  std::string name;
  nn::NetworkGradCheck result;
};

inline constexpr double kGradientTolerance = 1e-6;

/// Whole-network gradient checks in double precision: Meso-4 on a 16x16x3
/// input with each study activation in both slots, plus a small
/// MesoInception-4 and depth net. Biases and BN affine terms are jittered
/// so that no gradient is structurally zero.
std::vector<GradientCase> gradient_suite(std::uint64_t seed = 0);

}  // namespace lowfake::models
