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
#include "lowfake/data/dataset.hpp"

#include <algorithm>

#include "lowfake/error.hpp"

namespace lowfake::data {

InMemoryDataset::InMemoryDataset(nn::Shape sample_shape)
    : shape_(std::move(sample_shape)), stride_(nn::shape_size(shape_)) {}

void InMemoryDataset::add(std::span<const float> sample, int label) {
  if (sample.size() != stride_) {
    throw ShapeError("sample has " + std::to_string(sample.size()) + " values, dataset shape " +
                     nn::shape_str(shape_) + " needs " + std::to_string(stride_));
  }
  values_.insert(values_.end(), sample.begin(), sample.end());
  labels_.push_back(label);
}

void InMemoryDataset::load(std::size_t index, std::span<float> out) const {
  if (index >= labels_.size()) throw ConfigError("sample index out of range");
  std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(index * stride_), stride_, out.begin());
}

ImageDataset::ImageDataset(std::vector<SampleRecord> records, std::size_t height, std::size_t width, ColorMode mode,
                           bool cache)
    : records_(std::move(records)),
      shape_{height, width, mode == ColorMode::gray ? std::size_t{1} : std::size_t{3}},
      mode_(mode),
      cache_(cache),
      decoded_(records_.size()) {}

void ImageDataset::load(std::size_t index, std::span<float> out) const {
  std::shared_ptr<const Image> img = decoded_.at(index);
  if (!img) {
    img = std::make_shared<const Image>(decode_and_resize(records_[index].path, shape_[0], shape_[1], mode_));
    if (cache_) decoded_[index] = img;
  }
  std::copy(img->begin(), img->end(), out.begin());
}

SubsetDataset::SubsetDataset(const Dataset& parent, std::vector<std::size_t> indices)
    : parent_(parent), indices_(std::move(indices)) {
  for (std::size_t i : indices_) {
    if (i >= parent_.size()) throw ConfigError("subset index out of range");
  }
}

nn::Tensor<float> gather(const Dataset& dataset, std::span<const std::size_t> indices) {
  if (indices.empty()) throw ConfigError("empty batch");
  nn::Shape shape{indices.size()};
  shape.insert(shape.end(), dataset.sample_shape().begin(), dataset.sample_shape().end());
  nn::Tensor<float> batch(shape);
  const std::size_t stride = nn::shape_size(dataset.sample_shape());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    dataset.load(indices[i], batch.data().subspan(i * stride, stride));
  }
  return batch;
}

std::vector<int> gather_labels(const Dataset& dataset, std::span<const std::size_t> indices) {
  std::vector<int> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(dataset.label(i));
  return out;
}

}  // namespace lowfake::data
