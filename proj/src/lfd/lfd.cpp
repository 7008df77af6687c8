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
#include "lowfake/lfd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "lowfake/data/manifest.hpp"
#include "lowfake/error.hpp"

namespace lowfake::lfd {

namespace {

// Bresenham circle of radius 3, clockwise from 12 o'clock.
constexpr int kCircle[16][2] = {{0, -3}, {1, -3},  {2, -2},  {3, -1},  {3, 0},  {3, 1},   {2, 2},   {1, 3},
                                {0, 3},  {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}};
constexpr int kArc = 9;
constexpr std::size_t kMargin = 3;

void require_gray(const data::Image& img) {
  if (img.rank() != 3 || img.dim(2) != 1) throw ShapeError("expected a gray (H, W, 1) image");
}

}  // namespace

double normalize_angle(double degrees) {
  if (!std::isfinite(degrees)) throw NumericError("non-finite keypoint angle");
  double a = std::fmod(degrees, 360.0);
  if (a < 0.0) a += 360.0;
  return a >= 360.0 ? 0.0 : a;
}

data::Image normalize_face(const data::Image& image, const BBox& bbox) {
  const double h = static_cast<double>(data::height(image)), w = static_cast<double>(data::width(image));
  if (!(bbox.width > 0.0 && bbox.height > 0.0)) throw ConfigError("bounding box needs positive extents");
  const double x0 = std::clamp(std::floor(bbox.left), 0.0, w), x1 = std::clamp(std::ceil(bbox.left + bbox.width), 0.0, w);
  const double y0 = std::clamp(std::floor(bbox.top), 0.0, h), y1 = std::clamp(std::ceil(bbox.top + bbox.height), 0.0, h);
  if (x1 <= x0 || y1 <= y0) throw ConfigError("bounding box lies outside the image");
  const data::Image gray = data::to_gray(image);
  const auto cx0 = static_cast<std::size_t>(x0), cy0 = static_cast<std::size_t>(y0);
  const auto cw = static_cast<std::size_t>(x1 - x0), ch = static_cast<std::size_t>(y1 - y0);
  data::Image crop({ch, cw, 1});
  for (std::size_t y = 0; y < ch; ++y) {
    std::copy_n(gray.raw() + (cy0 + y) * data::width(gray) + cx0, cw, crop.raw() + y * cw);
  }
  return data::resize_bilinear(crop, kCropSize, kCropSize);
}

double fast_score(const data::Image& gray, std::size_t x, std::size_t y) {
  const std::size_t w = data::width(gray);
  const float* p = gray.raw();
  const float c = p[y * w + x];
  float d[16];
  for (int i = 0; i < 16; ++i) {
    d[i] = p[(static_cast<std::ptrdiff_t>(y) + kCircle[i][1]) * static_cast<std::ptrdiff_t>(w) +
             static_cast<std::ptrdiff_t>(x) + kCircle[i][0]] -
           c;
  }
  float best = 0.0f;
  for (int start = 0; start < 16; ++start) {
    float bright = d[start], dark = -d[start];
    for (int k = 1; k < kArc; ++k) {
      const float v = d[(start + k) & 15];
      bright = std::min(bright, v);
      dark = std::min(dark, -v);
    }
    best = std::max({best, bright, dark});
  }
  return best;
}

double centroid_angle(const data::Image& gray, std::size_t x, std::size_t y, int radius) {
  const auto h = static_cast<std::ptrdiff_t>(data::height(gray)), w = static_cast<std::ptrdiff_t>(data::width(gray));
  const auto cx = static_cast<std::ptrdiff_t>(x), cy = static_cast<std::ptrdiff_t>(y);
  double m10 = 0.0, m01 = 0.0;
  for (std::ptrdiff_t dy = -radius; dy <= radius; ++dy) {
    const std::ptrdiff_t yy = cy + dy;
    if (yy < 0 || yy >= h) continue;
    for (std::ptrdiff_t dx = -radius; dx <= radius; ++dx) {
      const std::ptrdiff_t xx = cx + dx;
      if (xx < 0 || xx >= w || dx * dx + dy * dy > radius * radius) continue;
      const double v = gray[static_cast<std::size_t>(yy * w + xx)];
      m10 += static_cast<double>(dx) * v;
      m01 += static_cast<double>(dy) * v;
    }
  }
  if (m10 == 0.0 && m01 == 0.0) return 0.0;
  return normalize_angle(std::atan2(m01, m10) * 180.0 / std::numbers::pi);
}

std::vector<Keypoint> detect_keypoints(const data::Image& gray, const FastOptions& options) {
  require_gray(gray);
  const std::size_t h = data::height(gray), w = data::width(gray);
  std::vector<Keypoint> out;
  if (h <= 2 * kMargin || w <= 2 * kMargin) return out;
  std::vector<float> score(h * w, 0.0f);
  for (std::size_t y = kMargin; y < h - kMargin; ++y) {
    for (std::size_t x = kMargin; x < w - kMargin; ++x) {
      const double s = fast_score(gray, x, y);
      if (s > options.threshold) score[y * w + x] = static_cast<float>(s);
    }
  }
  for (std::size_t y = kMargin; y < h - kMargin; ++y) {
    for (std::size_t x = kMargin; x < w - kMargin; ++x) {
      const float s = score[y * w + x];
      if (s <= 0.0f) continue;
      bool keep = true;
      for (int dy = -1; dy <= 1 && keep; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const float n = score[(y + dy) * w + (x + dx)];
          // Equal scores: the earliest pixel in raster order wins.
          const bool earlier = dy < 0 || (dy == 0 && dx < 0);
          if (n > s || (n == s && earlier)) {
            keep = false;
            break;
          }
        }
      }
      if (keep) {
        out.push_back({static_cast<double>(x), static_cast<double>(y),
                       centroid_angle(gray, x, y, options.orientation_radius)});
      }
    }
  }
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& image) {
  return std::filesystem::path(image.string() + ".kp.jsonl");
}

SidecarResult load_keypoint_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open keypoint sidecar " + path.string());
  SidecarResult r;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    Keypoint k;
    try {
      const auto j = nlohmann::json::parse(line);
      for (const char* key : {"x", "y", "angle"}) {
        if (!j.contains(key) || !j.at(key).is_number()) throw FormatError(std::string("missing numeric '") + key + "'");
      }
      k = {j.at("x").get<double>(), j.at("y").get<double>(), j.at("angle").get<double>()};
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + ": malformed record: " + e.what());
    } catch (const FormatError& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (!std::isfinite(k.x) || !std::isfinite(k.y) || !std::isfinite(k.angle)) {
      throw FormatError(where + ": non-finite value");
    }
    const double lim = static_cast<double>(kCropSize);
    if (k.x < 0.0 || k.x >= lim || k.y < 0.0 || k.y >= lim) {
      std::ostringstream msg;
      msg << where << ": keypoint (" << k.x << ", " << k.y << ") outside the 200x200 crop, skipped";
      r.warnings.push_back(msg.str());
      continue;
    }
    k.angle = normalize_angle(k.angle);
    r.keypoints.push_back(k);
  }
  return r;
}

void write_keypoint_sidecar(const std::filesystem::path& path, std::span<const Keypoint> keypoints) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write keypoint sidecar " + path.string());
  for (const auto& k : keypoints) out << nlohmann::json{{"x", k.x}, {"y", k.y}, {"angle", k.angle}}.dump() << '\n';
}

std::map<std::string, BBox> load_bbox_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open bbox file " + path.string());
  std::map<std::string, BBox> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = data::split_csv_line(line);
    if (header) {
      if (f.size() < 5 || f[0] != "path") throw FormatError(path.string() + ": header must be path,left,top,width,height");
      header = false;
      continue;
    }
    if (f.size() != 5) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 5 fields");
    BBox b;
    try {
      b = {std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4])};
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": non-numeric box");
    }
    std::filesystem::path p(f[0]);
    out[(p.is_relative() ? path.parent_path() / p : p).lexically_normal().string()] = b;
  }
  return out;
}

FeatureVector featurize(std::span<const Keypoint> keypoints, bool l2_normalize) {
  FeatureVector v{};
  const double lim = static_cast<double>(kCropSize);
  for (const auto& k : keypoints) {
    if (!(k.x >= 0.0 && k.x < lim && k.y >= 0.0 && k.y < lim)) {
      throw ConfigError("keypoint outside the 200x200 crop");
    }
    const auto col = static_cast<std::size_t>(std::floor(k.x / kChunkSize));
    const auto row = static_cast<std::size_t>(std::floor(k.y / kChunkSize));
    const auto bin = std::min(static_cast<std::size_t>(std::floor(normalize_angle(k.angle) / kBinDegrees)), kBins - 1);
    v[(row * kGrid + col) * kBins + bin] += 1.0;
  }
  if (l2_normalize) {
    double norm = 0.0;
    for (double e : v) norm += e * e;
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& e : v) e /= norm;
    }
  }
  return v;
}

Detector parse_detector(std::string_view name) {
  if (name == "fast") return Detector::fast;
  if (name == "sidecar") return Detector::sidecar;
  throw ConfigError("unknown detector '" + std::string(name) + "' (expected fast or sidecar)");
}

std::vector<Keypoint> image_keypoints(const std::filesystem::path& image, Detector detector,
                                      const std::optional<BBox>& bbox, const FastOptions& options,
                                      std::vector<std::string>* warnings) {
  if (detector == Detector::sidecar) {
    auto r = load_keypoint_sidecar(sidecar_path(image));
    if (warnings) warnings->insert(warnings->end(), r.warnings.begin(), r.warnings.end());
    return std::move(r.keypoints);
  }
  return face_keypoints(data::decode_image(image), bbox, options);
}

std::vector<Keypoint> face_keypoints(const data::Image& image, const std::optional<BBox>& bbox,
                                     const FastOptions& options) {
  const BBox box = bbox.value_or(BBox{0.0, 0.0, static_cast<double>(data::width(image)),
                                      static_cast<double>(data::height(image))});
  return detect_keypoints(normalize_face(image, box), options);
}

void write_feature_csv(const std::filesystem::path& path, std::span<const FeatureRow> rows) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write features " + path.string());
  out.precision(17);
  out << "label";
  for (std::size_t i = 0; i < kFeatureSize; ++i) out << ",f" << i;
  out << '\n';
  for (const auto& r : rows) {
    out << r.label;
    for (double v : r.features) out << ',' << v;
    out << '\n';
  }
}

std::vector<FeatureRow> load_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open features " + path.string());
  std::vector<FeatureRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = data::split_csv_line(line);
    if (line_no == 1) {
      if (f.size() != kFeatureSize + 1 || f[0] != "label") throw FormatError(path.string() + ": bad feature header");
      continue;
    }
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (f.size() != kFeatureSize + 1) throw FormatError(where + ": expected 129 fields");
    FeatureRow r;
    try {
      r.label = std::stoi(f[0]);
      for (std::size_t i = 0; i < kFeatureSize; ++i) r.features[i] = std::stod(f[i + 1]);
    } catch (const std::exception&) {
      throw FormatError(where + ": non-numeric field");
    }
    if (r.label != 0 && r.label != 1) throw FormatError(where + ": label must be 0 or 1");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace lowfake::lfd
