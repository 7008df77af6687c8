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
#include <filesystem>

#include "lowfake/tensor.hpp"

namespace lowfake::data {

/// (H, W, C) float image with C = 1 (gray) or 3 (RGB), values in [0, 1].
using Image = nn::Tensor<float>;

enum class ColorMode { color, gray };

std::size_t height(const Image& img);
std::size_t width(const Image& img);
std::size_t channels(const Image& img);

/// Decodes PNG, JPEG, PGM (P2/P5) or PPM (P3/P6), detected by content.
/// Alpha is dropped; 16-bit samples are scaled to [0, 1].
Image decode_image(const std::filesystem::path& path);

/// ITU-R 601 luma: 0.299 R + 0.587 G + 0.114 B. Gray input is returned as is.
Image to_gray(const Image& img);

/// Gray input is replicated into three channels.
Image to_color(const Image& img);

/// Bilinear resampling with half-pixel centers; source coordinates are
/// clamped to the edge pixels. Same-size resizes return an exact copy.
Image resize_bilinear(const Image& img, std::size_t out_h, std::size_t out_w);

Image decode_and_resize(const std::filesystem::path& path, std::size_t out_h, std::size_t out_w, ColorMode mode);

/// 8-bit PNG (gray or RGB); values are clamped and rounded.
void write_png(const std::filesystem::path& path, const Image& img);

/// Binary PGM (P5) or PPM (P6), chosen by channel count.
void write_pnm(const std::filesystem::path& path, const Image& img);

}  // namespace lowfake::data
