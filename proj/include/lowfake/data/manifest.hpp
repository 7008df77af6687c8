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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lowfake::data {

/// Binary label convention: manipulated samples are the positive class.
enum class Label : int { pristine = 0, fake = 1 };

std::string_view to_string(Label label);

/// Accepts "fake"/"pristine" (any case) and "1"/"0".
Label parse_label(std::string_view text);

struct SampleRecord {
  std::string path;
  Label label = Label::pristine;
  std::string scene_id;
};

/// Reads a `path,label,scene_id` CSV. Relative paths are resolved against
/// the manifest's directory. Double-quoted fields may contain commas.
std::vector<SampleRecord> load_manifest(const std::filesystem::path& path);

void save_manifest(const std::filesystem::path& path, std::span<const SampleRecord> records);

/// Splits one CSV line into fields (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);

struct SceneSplit {
  std::vector<SampleRecord> train;
  std::vector<SampleRecord> val;
};

/// Moves whole scenes into the validation side so that its image count is
/// as close as possible to `val_fraction` of the total (ties go to the
/// smaller count), keeping at least one scene on each side.
///
/// Scenes are sorted by id and shuffled with `seed` before the subset
/// search, so the result does not depend on the input record order. Both
/// sides keep the input order of their records.
SceneSplit scene_split(std::span<const SampleRecord> records, double val_fraction, std::uint64_t seed);

struct SceneSplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

/// scene_split() expressed as ascending record indices.
SceneSplitIndices scene_split_indices(std::span<const SampleRecord> records, double val_fraction,
                                      std::uint64_t seed);

}  // namespace lowfake::data
