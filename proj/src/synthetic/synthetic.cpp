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


#include "lowfake/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lowfake/data/augment.hpp"
#include "lowfake/error.hpp"
#include "lowfake/random.hpp"

namespace lowfake::synthetic {

namespace {

std::string scene_name(char prefix, std::size_t scene) {
  std::string digits = std::to_string(scene);
  if (digits.size() < 2) digits.insert(0, 2 - digits.size(), '0');
  return std::string(1, prefix) + digits;
}

float clamp01(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

// Sparse anti-aliased rectangles tilted by `degrees`, so that corner
// orientations cluster around degrees + 45 + k * 90.
data::Image rect_texture(std::size_t extent, double degrees, Rng& rng) {
  const double base = uniform(rng, 0.35, 0.65);
  data::Image img({extent, extent, 1}, static_cast<float>(base));
  const double area = static_cast<double>(extent * extent) / (200.0 * 200.0);
  const auto rects = static_cast<std::size_t>(std::lround(28.0 * area));
  const double rad = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  const auto lim = static_cast<double>(extent);
  constexpr int kSub = 4;
  for (std::size_t r = 0; r < rects; ++r) {
    const double hw = uniform(rng, 6.0, 15.0), hh = uniform(rng, 6.0, 15.0);
    const double cx = uniform(rng, 0.0, lim), cy = uniform(rng, 0.0, lim);
    const double value = bernoulli(rng, 0.5) ? uniform(rng, base + 0.25, 1.0) : uniform(rng, 0.0, base - 0.25);
    const double reach = std::hypot(hw, hh) + 1.0;
    const auto x0 = static_cast<std::size_t>(std::max(0.0, cx - reach));
    const auto x1 = static_cast<std::size_t>(std::min(lim, cx + reach));
    const auto y0 = static_cast<std::size_t>(std::max(0.0, cy - reach));
    const auto y1 = static_cast<std::size_t>(std::min(lim, cy + reach));
    for (std::size_t y = y0; y < y1; ++y) {
      for (std::size_t x = x0; x < x1; ++x) {
        int inside = 0;
        for (int sy = 0; sy < kSub; ++sy) {
          for (int sx = 0; sx < kSub; ++sx) {
            const double dx = static_cast<double>(x) + (sx + 0.5) / kSub - 0.5 - cx;
            const double dy = static_cast<double>(y) + (sy + 0.5) / kSub - 0.5 - cy;
            const double u = c * dx + s * dy, v = -s * dx + c * dy;
            inside += std::abs(u) < hw && std::abs(v) < hh;
          }
        }
        if (inside == 0) continue;
        const double cover = static_cast<double>(inside) / (kSub * kSub);
        float& px = img[y * extent + x];
        px = static_cast<float>((1.0 - cover) * px + cover * value);
      }
    }
  }
  for (float& v : img) v = clamp01(v + normal(rng, 0.0, 0.01));
  return img;
}

}  // namespace

ImageSet gradient_set(const GradientSetOptions& o) {
  if (o.count < 2 || o.scenes_per_class == 0 || o.extent < 2) throw ConfigError("gradient set is too small");
  Rng rng(o.seed);
  struct Scene {
    double tint[3];
    double amplitude;
    double sign;
  };
  std::vector<Scene> scenes(2 * o.scenes_per_class);
  for (auto& s : scenes) {
    for (double& t : s.tint) t = uniform(rng, 0.3, 0.7);
    s.amplitude = uniform(rng, 0.3, 0.6);
    s.sign = bernoulli(rng, 0.5) ? 1.0 : -1.0;
  }

  ImageSet set;
  const std::size_t e = o.extent;
  std::vector<double> ramp(e);
  for (std::size_t i = 0; i < o.count; ++i) {
    const int label = static_cast<int>(i % 2);
    const std::size_t scene = (i / 2) % o.scenes_per_class;
    const Scene& s = scenes[label * o.scenes_per_class + scene];
    const double phase = uniform(rng, -0.05, 0.05);
    for (std::size_t k = 0; k < e; ++k) {
      ramp[k] = s.sign * s.amplitude * (static_cast<double>(k) / static_cast<double>(e - 1) - 0.5 + phase);
    }
    data::Image img({e, e, 3}, 0.0f);
    float* px = img.raw();
    for (std::size_t y = 0; y < e; ++y) {
      for (std::size_t x = 0; x < e; ++x) {
        const double g = label == 0 ? ramp[x] : ramp[y];
        for (std::size_t c = 0; c < 3; ++c) *px++ = clamp01(s.tint[c] + g + normal(rng, 0.0, o.noise));
      }
    }
    const std::string scene_id = scene_name(label == 0 ? 'h' : 'v', scene);
    set.records.push_back({scene_id + "_" + std::to_string(i) + ".png",
                           label == 0 ? data::Label::pristine : data::Label::fake, scene_id});
    set.images.push_back(std::move(img));
  }
  return set;
}

ImageSet forgery_set(const ForgerySetOptions& o) {
  const double e = static_cast<double>(o.extent);
  if (o.count < 2 || !(o.patch_radius > 8.0) || 2.0 * o.patch_radius >= e) {
    throw ConfigError("forgery patch must fit inside the image");
  }
  Rng rng(o.seed);
  ImageSet set;
  for (std::size_t i = 0; i < o.count; ++i) {
    const bool fake = i % 2 == 1;
    data::Image img = rect_texture(o.extent, o.texture_degrees, rng);
    if (fake) {
      const double angle = o.rotation_degrees + uniform(rng, -5.0, 5.0);
      const data::Image donor = data::affine_resample(rect_texture(o.extent, o.texture_degrees, rng), angle, 1.0);
      const double r = o.patch_radius;
      const double slack = std::min(0.05 * e, e / 2 - r);
      const double cx = e / 2 + uniform(rng, -slack, slack);
      const double cy = e / 2 + uniform(rng, -slack, slack);
      constexpr double kFeather = 6.0;
      for (std::size_t y = 0; y < o.extent; ++y) {
        for (std::size_t x = 0; x < o.extent; ++x) {
          const double dx = static_cast<double>(x) - cx;
          const double dy = static_cast<double>(y) - cy;
          const double alpha = std::clamp((r - std::hypot(dx, dy)) / kFeather, 0.0, 1.0);
          if (alpha == 0.0) continue;
          // Donor pixels come from around the donor's center so the
          // replicated border never shows.
          const auto sx = static_cast<std::size_t>(std::lround(e / 2 + dx));
          const auto sy = static_cast<std::size_t>(std::lround(e / 2 + dy));
          float& dst = img[y * o.extent + x];
          dst = static_cast<float>((1.0 - alpha) * dst + alpha * donor[sy * o.extent + sx]);
        }
      }
    }
    const std::string scene_id = "t" + std::to_string(i);
    set.records.push_back({scene_id + ".png", fake ? data::Label::fake : data::Label::pristine, scene_id});
    set.images.push_back(std::move(img));
  }
  return set;
}

data::InMemoryDataset pattern_set(std::size_t count, std::uint64_t seed, std::size_t extent, std::size_t classes) {
  if (count == 0 || classes < 2 || extent < 8) throw ConfigError("pattern set is too small");
  struct Blob {
    double x, y, sigma, weight;
  };
  // Class prototypes depend only on the class index, not on `seed`.
  std::vector<std::vector<Blob>> prototypes(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    Rng proto(derive_seed(0x5eed, c));
    for (int b = 0; b < 3; ++b) {
      const double lim = static_cast<double>(extent);
      prototypes[c].push_back({uniform(proto, 0.2 * lim, 0.8 * lim), uniform(proto, 0.2 * lim, 0.8 * lim),
                               uniform(proto, 0.06 * lim, 0.15 * lim), uniform(proto, 0.5, 1.0)});
    }
  }
  Rng rng(seed);
  data::InMemoryDataset ds({extent, extent, 1});
  std::vector<float> px(extent * extent);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t label = i % classes;
    const double sx = uniform(rng, -4.0, 4.0);
    const double sy = uniform(rng, -4.0, 4.0);
    const double gain = uniform(rng, 0.4, 1.2);
    for (std::size_t y = 0; y < extent; ++y) {
      for (std::size_t x = 0; x < extent; ++x) {
        double v = 0.0;
        for (const Blob& b : prototypes[label]) {
          const double dx = static_cast<double>(x) - b.x - sx;
          const double dy = static_cast<double>(y) - b.y - sy;
          v += b.weight * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
        }
        px[y * extent + x] = clamp01(gain * v + normal(rng, 0.0, 0.35));
      }
    }
    ds.add(px, static_cast<int>(label));
  }
  return ds;
}

data::InMemoryDataset to_dataset(const ImageSet& set) {
  if (set.images.empty()) throw ConfigError("image set is empty");
  data::InMemoryDataset ds(set.images.front().shape());
  for (std::size_t i = 0; i < set.images.size(); ++i) {
    const auto& img = set.images[i];
    ds.add(std::span<const float>(img.raw(), img.size()), static_cast<int>(set.records[i].label));
  }
  return ds;
}

std::filesystem::path write_image_set(const ImageSet& set, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < set.images.size(); ++i) data::write_png(dir / set.records[i].path, set.images[i]);
  const auto manifest = dir / "manifest.csv";
  data::save_manifest(manifest, set.records);
  return manifest;
}

}  // namespace lowfake::synthetic
