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
#include <map>
#include <string>
#include <vector>

#include "lowfake/nn/graph.hpp"
#include "lowfake/nn/params.hpp"

namespace lowfake::data {

inline constexpr char kWeightMagic[8] = {'L', 'F', 'W', 'T', '0', '0', '0', '1'};
inline constexpr int kWeightFormatVersion = 1;

/// In-memory image of a weight file. `entries` are the trainable tensors in
/// graph order; `buffers` hold non-trainable state (BN running statistics).
struct WeightArchive {
  struct Tensor {
    std::string name;
    nn::Shape shape;
    std::vector<float> values;
  };

  int version = kWeightFormatVersion;
  std::map<std::string, std::string> metadata;
  std::vector<Tensor> entries;
  std::vector<Tensor> buffers;
};

/// File layout: the 8-byte magic `LFWT0001`, a little-endian u64 header
/// length, a UTF-8 JSON header listing every tensor with its name, shape,
/// dtype and byte offset into the payload, then the packed little-endian
/// float32 payload.
void write_archive(const std::filesystem::path& path, const WeightArchive& archive);

/// Throws FormatError on a bad magic, version mismatch, malformed header or
/// truncated payload.
WeightArchive read_archive(const std::filesystem::path& path);

WeightArchive to_archive(const nn::ParameterStore<float>& params,
                         std::map<std::string, std::string> metadata = {});

/// Throws ShapeError unless names, order and shapes match `graph`.
nn::ParameterStore<float> from_archive(const WeightArchive& archive, const nn::ModelGraph& graph);

/// Records the model name, activation slots and input shape (e.g.
/// `256x256x3`) as metadata.
void save_weights(const std::filesystem::path& path, const nn::ModelGraph& graph,
                  const nn::ParameterStore<float>& params);

nn::ParameterStore<float> load_weights(const std::filesystem::path& path, const nn::ModelGraph& graph);

}  // namespace lowfake::data
