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
#include <filesystem>
#include <vector>

#include "lowfake/data/dataset.hpp"
#include "lowfake/data/image.hpp"
#include "lowfake/data/manifest.hpp"

namespace lowfake::synthetic {

/// Generated images with manifest records. Record paths are bare file
/// names (`<scene>_<n>.png`) until the set is written to disk.
struct ImageSet {
  std::vector<data::Image> images;
  std::vector<data::SampleRecord> records;
};

/// Pristine images carry a horizontal intensity gradient, fakes a vertical
/// one. Every scene fixes a tint, amplitude and direction; its images differ
/// by a small phase offset and per-pixel Gaussian noise.
struct GradientSetOptions {
  std::size_t count = 600;
  std::size_t extent = 256;
  std::size_t scenes_per_class = 20;
  double noise = 0.05;
  std::uint64_t seed = 0;
};

ImageSet gradient_set(const GradientSetOptions& options);

/// Textures of sparse rectangles tilted by `texture_degrees`. Fakes receive
/// a disc cut from another texture, rotated and blended in near the center
/// with a feathered edge, which moves the corner orientations it contains
/// into other histogram bins.
struct ForgerySetOptions {
  std::size_t count = 200;
  std::size_t extent = 200;
  double patch_radius = 70.0;
  double texture_degrees = 22.5;
  double rotation_degrees = 45.0;
  std::uint64_t seed = 0;
};

ImageSet forgery_set(const ForgerySetOptions& options);

/// Ten-class gray set for the depth sweep: each class is a fixed mixture of
/// Gaussian blobs, jittered in position and contrast, plus noise.
data::InMemoryDataset pattern_set(std::size_t count, std::uint64_t seed, std::size_t extent = 28,
                                  std::size_t classes = 10);

data::InMemoryDataset to_dataset(const ImageSet& set);

/// Writes every image as PNG plus `manifest.csv` into `dir` (created if
/// needed) and returns the manifest path.
std::filesystem::path write_image_set(const ImageSet& set, const std::filesystem::path& dir);

}  // namespace lowfake::synthetic
