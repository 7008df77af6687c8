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
#include "lowfake/data/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <limits>

#include "lowfake/error.hpp"
#include "lowfake/random.hpp"

namespace lowfake::data {

std::string_view to_string(Label label) { return label == Label::fake ? "fake" : "pristine"; }

Label parse_label(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "fake" || t == "1") return Label::fake;
  if (t == "pristine" || t == "0") return Label::pristine;
  throw FormatError("unknown label '" + std::string(text) + "' (expected fake or pristine)");
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw FormatError("unterminated quoted field");
  return fields;
}

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<SampleRecord> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open manifest " + path.string());
  const std::filesystem::path base = path.parent_path();

  std::string line;
  std::size_t line_no = 0;
  int col_path = -1, col_label = -1, col_scene = -1;
  std::vector<SampleRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    try {
      f = split_csv_line(line);
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    for (auto& s : f) s = trim(std::move(s));
    if (col_path < 0) {
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == "path") col_path = static_cast<int>(i);
        if (f[i] == "label") col_label = static_cast<int>(i);
        if (f[i] == "scene_id") col_scene = static_cast<int>(i);
      }
      if (col_path < 0 || col_label < 0 || col_scene < 0) {
        throw FormatError(path.string() + ": header must name path, label and scene_id");
      }
      continue;
    }
    const auto need = static_cast<std::size_t>(std::max({col_path, col_label, col_scene}));
    if (f.size() <= need) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(need + 1) + " fields, got " + std::to_string(f.size()));
    }
    SampleRecord r;
    std::filesystem::path p(f[col_path]);
    r.path = (p.is_relative() ? base / p : p).lexically_normal().string();
    try {
      r.label = parse_label(f[col_label]);
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    r.scene_id = f[col_scene];
    if (f[col_path].empty() || r.scene_id.empty()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": empty path or scene_id");
    }
    out.push_back(std::move(r));
  }
  if (col_path < 0) throw FormatError(path.string() + ": empty manifest");
  return out;
}

void save_manifest(const std::filesystem::path& path, std::span<const SampleRecord> records) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write manifest " + path.string());
  out << "path,label,scene_id\n";
  for (const auto& r : records) {
    out << quote_if_needed(r.path) << ',' << to_string(r.label) << ',' << quote_if_needed(r.scene_id) << '\n';
  }
}

SceneSplitIndices scene_split_indices(std::span<const SampleRecord> records, double val_fraction,
                                      std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("val_fraction must lie in (0, 1)");
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records) ++counts[r.scene_id];
  if (counts.size() < 2) throw ConfigError("scene_split needs at least 2 scenes, got " + std::to_string(counts.size()));

  std::vector<std::pair<std::string, std::size_t>> scenes(counts.begin(), counts.end());
  Rng rng(seed);
  std::shuffle(scenes.begin(), scenes.end(), rng);

  // Subset-sum over image counts; parent[c] is the scene that first reached c.
  const std::size_t total = records.size();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(total + 1, kNone);
  std::vector<bool> reached(total + 1, false);
  reached[0] = true;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const std::size_t n = scenes[s].second;
    for (std::size_t c = total; c >= n && c > 0; --c) {
      if (!reached[c] && reached[c - n]) {
        reached[c] = true;
        parent[c] = s;
      }
    }
  }
  const double target = val_fraction * static_cast<double>(total);
  std::size_t best = kNone;
  for (std::size_t c = 1; c < total; ++c) {
    if (!reached[c]) continue;
    if (best == kNone || std::abs(static_cast<double>(c) - target) < std::abs(static_cast<double>(best) - target)) {
      best = c;
    }
  }
  // Two or more scenes always leave some proper subset reachable.
  std::vector<bool> in_val(scenes.size(), false);
  for (std::size_t c = best; c > 0;) {
    const std::size_t s = parent[c];
    in_val[s] = true;
    c -= scenes[s].second;
  }
  std::map<std::string_view, bool> val_scene;
  for (std::size_t s = 0; s < scenes.size(); ++s) val_scene[scenes[s].first] = in_val[s];

  SceneSplitIndices out;
  for (std::size_t i = 0; i < records.size(); ++i) (val_scene.at(records[i].scene_id) ? out.val : out.train).push_back(i);
  return out;
}

SceneSplit scene_split(std::span<const SampleRecord> records, double val_fraction, std::uint64_t seed) {
  const auto idx = scene_split_indices(records, val_fraction, seed);
  SceneSplit out;
  for (std::size_t i : idx.train) out.train.push_back(records[i]);
  for (std::size_t i : idx.val) out.val.push_back(records[i]);
  return out;
}

}  // namespace lowfake::data
