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

#include "lowfake/data/image.hpp"
#include "lowfake/random.hpp"

namespace lowfake::data {

/// Each transform fires independently with its probability; magnitudes are
/// drawn uniformly from the symmetric ranges.
struct AugmentConfig {
  double flip_probability = 0.5;
  double zoom_probability = 0.5;
  double zoom_range = 0.10;  // scale factor in [1 - r, 1 + r]
  double rotation_probability = 0.5;
  double rotation_degrees = 15.0;
  double brightness_probability = 0.5;
  double brightness_range = 0.10;  // additive offset
  double contrast_probability = 0.5;
  double contrast_range = 0.10;  // multiplicative factor around the mean

  static AugmentConfig disabled();
};

/// Mirrors the x axis.
Image flip_horizontal(const Image& img);

/// Samples out(p) = in(c + A^-1 (p - c)) bilinearly around the image center
/// c, where A scales by `zoom` and rotates by `degrees` (counter-clockwise as
/// displayed). Pixels falling outside the frame replicate the nearest edge.
Image affine_resample(const Image& img, double degrees, double zoom);

/// Shape-preserving random augmentation; the result is clamped to [0, 1].
/// Draws from `rng` in a fixed order, whether or not a transform fires.
Image augment(const Image& img, const AugmentConfig& cfg, Rng& rng);

}  // namespace lowfake::data
