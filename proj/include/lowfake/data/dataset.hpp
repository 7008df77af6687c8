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
#include <memory>
#include <span>
#include <vector>

#include "lowfake/data/image.hpp"
#include "lowfake/data/manifest.hpp"
#include "lowfake/tensor.hpp"

namespace lowfake::data {

/// Indexed labelled samples of one fixed shape.
class Dataset {
 public:
  virtual ~Dataset() = default;

  virtual std::size_t size() const = 0;
  virtual const nn::Shape& sample_shape() const = 0;
  virtual int label(std::size_t index) const = 0;
  /// Writes sample `index` into `out` (length = shape_size(sample_shape())).
  virtual void load(std::size_t index, std::span<float> out) const = 0;
};

class InMemoryDataset final : public Dataset {
 public:
  explicit InMemoryDataset(nn::Shape sample_shape);

  void add(std::span<const float> sample, int label);

  std::size_t size() const override { return labels_.size(); }
  const nn::Shape& sample_shape() const override { return shape_; }
  int label(std::size_t index) const override { return labels_.at(index); }
  void load(std::size_t index, std::span<float> out) const override;

 private:
  nn::Shape shape_;
  std::size_t stride_;
  std::vector<float> values_;
  std::vector<int> labels_;
};

/// Manifest images decoded and resized on first access (label 1 = fake).
/// With caching enabled, decoded images are kept for later epochs.
class ImageDataset final : public Dataset {
 public:
  ImageDataset(std::vector<SampleRecord> records, std::size_t height, std::size_t width, ColorMode mode,
               bool cache = true);

  std::size_t size() const override { return records_.size(); }
  const nn::Shape& sample_shape() const override { return shape_; }
  int label(std::size_t index) const override { return static_cast<int>(records_.at(index).label); }
  void load(std::size_t index, std::span<float> out) const override;

  const std::vector<SampleRecord>& records() const { return records_; }

 private:
  std::vector<SampleRecord> records_;
  nn::Shape shape_;
  ColorMode mode_;
  bool cache_;
  mutable std::vector<std::shared_ptr<const Image>> decoded_;
};

/// A view selecting `indices` of a parent dataset that must outlive it.
class SubsetDataset final : public Dataset {
 public:
  SubsetDataset(const Dataset& parent, std::vector<std::size_t> indices);

  std::size_t size() const override { return indices_.size(); }
  const nn::Shape& sample_shape() const override { return parent_.sample_shape(); }
  int label(std::size_t index) const override { return parent_.label(indices_.at(index)); }
  void load(std::size_t index, std::span<float> out) const override { parent_.load(indices_.at(index), out); }

 private:
  const Dataset& parent_;
  std::vector<std::size_t> indices_;
};

/// Copies `indices` into one (N, sample_shape...) batch tensor.
nn::Tensor<float> gather(const Dataset& dataset, std::span<const std::size_t> indices);

std::vector<int> gather_labels(const Dataset& dataset, std::span<const std::size_t> indices);

}  // namespace lowfake::data
