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
#include <iosfwd>
#include <optional>
#include <vector>

#include "lowfake/activations.hpp"
#include "lowfake/data/image.hpp"
#include "lowfake/lfd.hpp"
#include "lowfake/nn/graph.hpp"
#include "lowfake/nn/params.hpp"
#include "lowfake/svm.hpp"

namespace lowfake::bench {

/// Published reference points, printed next to measurements for context.
/// They depend on hardware and are never used as pass/fail thresholds.
struct Reference {
  ActivationKind kind;
  double overhead_percent;
};
inline constexpr Reference kReferenceOverheads[] = {
    {ActivationKind::relu, 0.0}, {ActivationKind::swish, 2.2}, {ActivationKind::leaky_relu, 2.3},
    {ActivationKind::mish, 4.3}, {ActivationKind::pish, 7.5}};
inline constexpr double kReferenceMesoSeconds = 0.034;
inline constexpr double kReferenceLfdSeconds = 0.076;
inline constexpr double kReferenceKeypointShare = 0.98;

struct ActivationTiming {
  ActivationKind kind = ActivationKind::relu;
  double forward_ns = 0.0;   // per element, median
  double backward_ns = 0.0;  // value plus derivative, per element, median
  double overhead_percent = 0.0;  // forward, relative to relu
};

struct ActivationReport {
  std::size_t elements = 0;
  std::size_t repetitions = 0;
  std::vector<ActivationTiming> rows;
};

/// Times the vectorized float kernels over a warm buffer of `elements`
/// inputs drawn from N(0, 2). Throws ConfigError when elements < 1e6 or
/// repetitions < 5.
ActivationReport bench_activations(std::size_t elements = 10'000'000, std::size_t repetitions = 7,
                                   std::uint64_t seed = 0);

/// `activation,forward_ns,backward_ns,overhead_percent,reference_percent`
void write_csv(std::ostream& out, const ActivationReport& report);

struct InferenceReport {
  std::size_t batch = 0;
  std::size_t repetitions = 0;
  double seconds_per_image = 0.0;  // median over repetitions
};

/// Eval-mode forward passes on random inputs.
InferenceReport bench_inference(const nn::ModelGraph& graph, const nn::ParameterStore<float>& params,
                                std::size_t batch = 16, std::size_t repetitions = 5, std::uint64_t seed = 0);

/// `batch,repetitions,seconds_per_image,reference_seconds`
void write_csv(std::ostream& out, const InferenceReport& report);

struct LfdReport {
  std::size_t images = 0;
  std::size_t keypoints = 0;
  double keypoint_seconds = 0.0;        // face normalization and detection, per image
  double classification_seconds = 0.0;  // featurize and SVM score, per image
  double keypoint_share() const;
};

/// Runs the LFD inference path on each image in turn. `model` defaults to
/// an all-zero 128-dim classifier.
LfdReport bench_lfd(const std::vector<data::Image>& images, const std::optional<svm::LinearModel>& model = {},
                    const lfd::FastOptions& options = {});

/// `images,keypoints_per_image,keypoint_seconds,classification_seconds,keypoint_share,reference_share`
void write_csv(std::ostream& out, const LfdReport& report);

}  // namespace lowfake::bench
