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
#include "lowfake/data/weights.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "json.hpp"

#include "lowfake/error.hpp"

namespace lowfake::data {

namespace {

using nlohmann::json;

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

json describe(const WeightArchive::Tensor& t, std::uint64_t offset) {
  return {{"name", t.name}, {"shape", t.shape}, {"dtype", "f32"}, {"offset", offset}};
}

void put_values(std::string& out, const std::vector<float>& values) {
  for (float f : values) {
    const auto u = std::bit_cast<std::uint32_t>(f);
    for (int i = 0; i < 4; ++i) out += static_cast<char>((u >> (8 * i)) & 0xFF);
  }
}

}  // namespace

void write_archive(const std::filesystem::path& path, const WeightArchive& archive) {
  json header;
  header["version"] = archive.version;
  header["metadata"] = archive.metadata;
  std::uint64_t offset = 0;
  std::string payload;
  for (const char* section : {"entries", "buffers"}) {
    const auto& list = std::string_view(section) == "entries" ? archive.entries : archive.buffers;
    json items = json::array();
    for (const auto& t : list) {
      if (t.values.size() != nn::shape_size(t.shape)) {
        throw ShapeError("archive tensor " + t.name + " has " + std::to_string(t.values.size()) + " values for shape " +
                         nn::shape_str(t.shape));
      }
      items.push_back(describe(t, offset));
      put_values(payload, t.values);
      offset += 4 * t.values.size();
    }
    header[section] = std::move(items);
  }
  const std::string text = header.dump();
  std::string bytes(kWeightMagic, sizeof kWeightMagic);
  put_u64(bytes, text.size());
  bytes += text;
  bytes += payload;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write weights " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing weights " + path.string());
}

WeightArchive read_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open weights " + path.string());
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const std::string name = path.string();
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kWeightMagic, 4) != 0) {
    throw FormatError(name + " is not a lowfake weight archive");
  }
  if (std::memcmp(bytes.data(), kWeightMagic, sizeof kWeightMagic) != 0) {
    throw FormatError(name + ": unsupported archive version '" + std::string(bytes.begin() + 4, bytes.begin() + 8) +
                      "'");
  }
  const std::uint64_t header_len = get_u64(bytes.data() + 8);
  if (header_len > bytes.size() - 16) throw FormatError(name + ": truncated header");
  json header;
  try {
    header = json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(header_len));
  } catch (const json::exception& e) {
    throw FormatError(name + ": malformed header: " + e.what());
  }
  const unsigned char* payload = bytes.data() + 16 + header_len;
  const std::size_t payload_len = bytes.size() - 16 - header_len;

  WeightArchive archive;
  try {
    archive.version = header.at("version").get<int>();
    if (archive.version != kWeightFormatVersion) {
      throw FormatError(name + ": header version " + std::to_string(archive.version) + " is not supported");
    }
    archive.metadata = header.value("metadata", std::map<std::string, std::string>{});
    std::uint64_t expected = 0;
    for (const char* section : {"entries", "buffers"}) {
      auto& list = std::string_view(section) == "entries" ? archive.entries : archive.buffers;
      for (const auto& item : header.at(section)) {
        WeightArchive::Tensor t;
        t.name = item.at("name").get<std::string>();
        t.shape = item.at("shape").get<nn::Shape>();
        if (item.at("dtype").get<std::string>() != "f32") throw FormatError(name + ": " + t.name + " is not f32");
        const auto offset = item.at("offset").get<std::uint64_t>();
        const std::size_t n = nn::shape_size(t.shape);
        if (offset != expected) throw FormatError(name + ": " + t.name + " has an unexpected offset");
        if (offset + 4 * n > payload_len) throw FormatError(name + ": truncated payload at " + t.name);
        t.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          const unsigned char* p = payload + offset + 4 * i;
          const std::uint32_t u = p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
          t.values[i] = std::bit_cast<float>(u);
        }
        expected = offset + 4 * n;
        list.push_back(std::move(t));
      }
    }
    if (expected != payload_len) throw FormatError(name + ": trailing bytes after payload");
  } catch (const json::exception& e) {
    throw FormatError(name + ": malformed header: " + e.what());
  }
  return archive;
}

WeightArchive to_archive(const nn::ParameterStore<float>& params, std::map<std::string, std::string> metadata) {
  WeightArchive a;
  a.metadata = std::move(metadata);
  for (const auto& e : params.entries()) {
    WeightArchive::Tensor t{e.name, e.value.shape(), {e.value.begin(), e.value.end()}};
    (e.trainable ? a.entries : a.buffers).push_back(std::move(t));
  }
  return a;
}

nn::ParameterStore<float> from_archive(const WeightArchive& archive, const nn::ModelGraph& graph) {
  std::map<std::string_view, const WeightArchive::Tensor*> by_name;
  for (const auto* list : {&archive.entries, &archive.buffers}) {
    for (const auto& t : *list) by_name[t.name] = &t;
  }
  std::size_t trainable = 0;
  for (const auto& p : graph.params) trainable += p.trainable() ? 1 : 0;
  if (archive.entries.size() != trainable || by_name.size() != graph.params.size()) {
    throw ShapeError("archive holds " + std::to_string(archive.entries.size()) + "+" +
                     std::to_string(archive.buffers.size()) + " tensors, graph '" + graph.name + "' needs " +
                     std::to_string(trainable) + "+" + std::to_string(graph.params.size() - trainable));
  }
  nn::ParameterStore<float> store;
  for (const auto& p : graph.params) {
    const auto it = by_name.find(p.name);
    if (it == by_name.end()) throw ShapeError("archive lacks tensor " + p.name + " of graph '" + graph.name + "'");
    if (it->second->shape != p.shape) {
      throw ShapeError("archive tensor " + p.name + " has shape " + nn::shape_str(it->second->shape) + ", graph '" +
                       graph.name + "' needs " + nn::shape_str(p.shape));
    }
    store.add(p.name, p.trainable(), nn::Tensor<float>(p.shape, it->second->values));
  }
  return store;
}

void save_weights(const std::filesystem::path& path, const nn::ModelGraph& graph,
                  const nn::ParameterStore<float>& params) {
  params.check_against(graph);
  std::string input_shape;
  for (std::size_t d : graph.input_shape) input_shape += (input_shape.empty() ? "" : "x") + std::to_string(d);
  write_archive(path, to_archive(params, {{"model", graph.name},
                                          {"conv_activation", std::string(to_string(graph.conv_activation))},
                                          {"dense_activation", std::string(to_string(graph.dense_activation))},
                                          {"input_shape", input_shape}}));
}

nn::ParameterStore<float> load_weights(const std::filesystem::path& path, const nn::ModelGraph& graph) {
  return from_archive(read_archive(path), graph);
}

}  // namespace lowfake::data
