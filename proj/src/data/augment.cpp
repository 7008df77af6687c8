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
#include "lowfake/data/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lowfake::data {

AugmentConfig AugmentConfig::disabled() {
  AugmentConfig c;
  c.flip_probability = c.zoom_probability = c.rotation_probability = 0.0;
  c.brightness_probability = c.contrast_probability = 0.0;
  return c;
}

Image flip_horizontal(const Image& img) {
  const std::size_t h = height(img), w = width(img), c = channels(img);
  Image out(img.shape());
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      std::copy_n(img.raw() + (y * w + (w - 1 - x)) * c, c, out.raw() + (y * w + x) * c);
    }
  }
  return out;
}

Image affine_resample(const Image& img, double degrees, double zoom) {
  const std::size_t h = height(img), w = width(img), c = channels(img);
  const double rad = degrees * std::numbers::pi / 180.0;
  // Rows grow downwards, so a displayed counter-clockwise turn is clockwise in (x, y).
  const double cs = std::cos(rad) / zoom, sn = std::sin(rad) / zoom;
  const double cx = 0.5 * static_cast<double>(w), cy = 0.5 * static_cast<double>(h);
  Image out(img.shape());
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double px = x + 0.5 - cx, py = y + 0.5 - cy;
      // Inverse map, then back to pixel-index space.
      double sx = cs * px - sn * py + cx - 0.5;
      double sy = sn * px + cs * py + cy - 0.5;
      // Snap tiny float noise so exact quarter turns stay exact permutations.
      const double rx = std::round(sx), ry = std::round(sy);
      if (std::abs(sx - rx) < 1e-9) sx = rx;
      if (std::abs(sy - ry) < 1e-9) sy = ry;
      sx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
      sy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
      const auto x0 = static_cast<std::size_t>(sx), y0 = static_cast<std::size_t>(sy);
      const std::size_t x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
      const float fx = static_cast<float>(sx - x0), fy = static_cast<float>(sy - y0);
      for (std::size_t k = 0; k < c; ++k) {
        const float a = img[(y0 * w + x0) * c + k], b = img[(y0 * w + x1) * c + k];
        const float d = img[(y1 * w + x0) * c + k], e = img[(y1 * w + x1) * c + k];
        const float top = a + (b - a) * fx, bot = d + (e - d) * fx;
        out[(y * w + x) * c + k] = top + (bot - top) * fy;
      }
    }
  }
  return out;
}

Image augment(const Image& img, const AugmentConfig& cfg, Rng& rng) {
  const bool flip = bernoulli(rng, cfg.flip_probability);
  const bool do_zoom = bernoulli(rng, cfg.zoom_probability);
  const double zoom = 1.0 + uniform(rng, -cfg.zoom_range, cfg.zoom_range);
  const bool do_rotate = bernoulli(rng, cfg.rotation_probability);
  const double degrees = uniform(rng, -cfg.rotation_degrees, cfg.rotation_degrees);
  const bool do_brightness = bernoulli(rng, cfg.brightness_probability);
  const double offset = uniform(rng, -cfg.brightness_range, cfg.brightness_range);
  const bool do_contrast = bernoulli(rng, cfg.contrast_probability);
  const double gain = 1.0 + uniform(rng, -cfg.contrast_range, cfg.contrast_range);

  Image out = flip ? flip_horizontal(img) : img;
  if (do_zoom || do_rotate) out = affine_resample(out, do_rotate ? degrees : 0.0, do_zoom ? zoom : 1.0);
  if (do_contrast) {
    double mean = 0.0;
    for (float v : out) mean += v;
    mean /= static_cast<double>(out.size());
    for (float& v : out) v = static_cast<float>(mean + gain * (v - mean));
  }
  if (do_brightness) {
    for (float& v : out) v += static_cast<float>(offset);
  }
  for (float& v : out) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

}  // namespace lowfake::data
