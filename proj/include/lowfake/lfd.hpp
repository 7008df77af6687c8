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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lowfake/data/image.hpp"

namespace lowfake::lfd {

inline constexpr std::size_t kCropSize = 200;
inline constexpr std::size_t kGrid = 4;
inline constexpr std::size_t kBins = 8;
inline constexpr std::size_t kFeatureSize = kGrid * kGrid * kBins;  // 128
inline constexpr double kChunkSize = static_cast<double>(kCropSize) / kGrid;
inline constexpr double kBinDegrees = 360.0 / kBins;

/// Position in the normalized 200x200 crop and orientation in [0, 360).
struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double angle = 0.0;
};

/// Face box in source-image pixels.
struct BBox {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;
};

/// Folds any finite angle into [0, 360).
double normalize_angle(double degrees);

/// Crops `bbox` (clamped to the image, widened to whole pixels), converts
/// to gray and resizes bilinearly to 200x200. Throws ConfigError when the
/// clamped box is empty.
data::Image normalize_face(const data::Image& image, const BBox& bbox);

struct FastOptions {
  double threshold = 20.0 / 255.0;
  int orientation_radius = 15;
};

/// Raw FAST-9 score for one pixel: the largest t such that 9 contiguous
/// circle pixels are all brighter than center + t (or all darker than
/// center - t); 0 when no such arc exists. Requires a 3-pixel margin.
double fast_score(const data::Image& gray, std::size_t x, std::size_t y);

/// FAST-9 segment test on the radius-3 circle (score > threshold), 3x3
/// non-maximum suppression on the score, then intensity-centroid
/// orientation atan2(m01, m10) over a disc clipped at the image border.
/// Keypoints carry integer pixel coordinates (the upstream CV-library
/// convention) and come out in raster order.
std::vector<Keypoint> detect_keypoints(const data::Image& gray, const FastOptions& options = {});

/// Intensity-centroid angle in degrees about pixel (x, y).
double centroid_angle(const data::Image& gray, std::size_t x, std::size_t y, int radius);

struct SidecarResult {
  std::vector<Keypoint> keypoints;
  std::vector<std::string> warnings;
};

/// `<image>.kp.jsonl`
std::filesystem::path sidecar_path(const std::filesystem::path& image);

/// One JSON object per line with numeric x, y, angle. Blank lines are
/// skipped; a malformed line throws FormatError naming the line; records
/// outside [0, 200) are dropped with a warning; angles are folded into
/// [0, 360).
SidecarResult load_keypoint_sidecar(const std::filesystem::path& path);

void write_keypoint_sidecar(const std::filesystem::path& path, std::span<const Keypoint> keypoints);

/// Reads a `path,left,top,width,height` CSV; relative paths resolve against
/// the CSV's directory.
std::map<std::string, BBox> load_bbox_csv(const std::filesystem::path& path);

using FeatureVector = std::array<double, kFeatureSize>;

/// Entry [chunk * 8 + bin] counts keypoints with chunk = floor(y/50) * 4 +
/// floor(x/50) and bin = floor(angle/45). With `l2_normalize` the vector
/// is scaled to unit length (left at zero when empty). Throws ConfigError
/// for keypoints outside the crop.
FeatureVector featurize(std::span<const Keypoint> keypoints, bool l2_normalize = true);

enum class Detector { fast, sidecar };

Detector parse_detector(std::string_view name);

/// Keypoints for one manifest image: detected on the normalized face, or
/// read from the image's sidecar (warnings are appended to `warnings`).
std::vector<Keypoint> image_keypoints(const std::filesystem::path& image, Detector detector,
                                      const std::optional<BBox>& bbox, const FastOptions& options,
                                      std::vector<std::string>* warnings = nullptr);

/// FAST keypoints on the normalized face of a decoded image; the whole
/// image is the face when no box is given.
std::vector<Keypoint> face_keypoints(const data::Image& image, const std::optional<BBox>& bbox,
                                     const FastOptions& options = {});

struct FeatureRow {
  int label = 0;  // 1 fake, 0 pristine
  FeatureVector features{};
};

/// `label,f0,...,f127`
void write_feature_csv(const std::filesystem::path& path, std::span<const FeatureRow> rows);
std::vector<FeatureRow> load_feature_csv(const std::filesystem::path& path);

}  // namespace lowfake::lfd
