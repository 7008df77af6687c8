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
#include "lowfake/data/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "lowfake/error.hpp"

namespace lowfake::data {

std::size_t height(const Image& img) { return img.dim(0); }
std::size_t width(const Image& img) { return img.dim(1); }
std::size_t channels(const Image& img) { return img.dim(2); }

namespace {

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open image " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Image decode_png(const std::vector<unsigned char>& bytes, const std::string& name) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError("corrupt PNG " + name + ": " + image.message);
  }
  const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
  image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const std::size_t c = gray ? 1 : 3;
  std::vector<unsigned char> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    throw FormatError("corrupt PNG " + name + ": " + image.message);
  }
  Image out({image.height, image.width, c});
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i] / 255.0f;
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

Image decode_jpeg(const std::vector<unsigned char>& bytes, const std::string& name) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  std::vector<unsigned char> pixels;
  std::size_t h = 0, w = 0, c = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw FormatError("corrupt JPEG " + name + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  h = cinfo.output_height;
  w = cinfo.output_width;
  c = static_cast<std::size_t>(cinfo.output_components);
  pixels.resize(h * w * c);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * c;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  Image out({h, w, c});
  for (std::size_t i = 0; i < pixels.size(); ++i) out[i] = pixels[i] / 255.0f;
  return out;
}

class PnmReader {
 public:
  PnmReader(const std::vector<unsigned char>& bytes, std::string name) : b_(bytes), name_(std::move(name)) {}

  Image read() {
    if (b_.size() < 2 || b_[0] != 'P') fail("bad magic");
    const char kind = static_cast<char>(b_[1]);
    pos_ = 2;
    const bool ascii = kind == '2' || kind == '3';
    const std::size_t c = (kind == '3' || kind == '6') ? 3 : 1;
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6') fail("unsupported PNM variant");
    const std::size_t w = number(), h = number(), maxval = number();
    if (w == 0 || h == 0 || maxval == 0 || maxval > 65535) fail("bad header");
    Image out({h, w, c});
    if (ascii) {
      for (float& v : out) v = static_cast<float>(number()) / static_cast<float>(maxval);
    } else {
      ++pos_;  // single whitespace after maxval
      const std::size_t bps = maxval > 255 ? 2 : 1;
      if (b_.size() < pos_ + out.size() * bps) fail("truncated payload");
      for (std::size_t i = 0; i < out.size(); ++i) {
        std::size_t v = b_[pos_ + i * bps];
        if (bps == 2) v = (v << 8) | b_[pos_ + i * bps + 1];
        out[i] = static_cast<float>(v) / static_cast<float>(maxval);
      }
    }
    for (float v : out) {
      if (v > 1.0f) fail("sample exceeds maxval");
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const { throw FormatError("corrupt PNM " + name_ + ": " + why); }

  std::size_t number() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(b_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ >= b_.size() || !std::isdigit(b_[pos_])) fail("expected a number");
    std::size_t v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) v = v * 10 + (b_[pos_++] - '0');
    return v;
  }

  const std::vector<unsigned char>& b_;
  std::string name_;
  std::size_t pos_ = 0;
};

void check_image(const Image& img) {
  if (img.rank() != 3 || (img.dim(2) != 1 && img.dim(2) != 3)) {
    throw ShapeError("image must be (H, W, 1|3), got " + nn::shape_str(img.shape()));
  }
}

std::vector<unsigned char> to_bytes(const Image& img) {
  std::vector<unsigned char> out(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    out[i] = static_cast<unsigned char>(std::lround(std::clamp(img[i], 0.0f, 1.0f) * 255.0f));
  }
  return out;
}

}  // namespace

Image decode_image(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  const std::string name = path.string();
  static const unsigned char kPng[] = {0x89, 'P', 'N', 'G'};
  if (bytes.size() >= 4 && std::equal(kPng, kPng + 4, bytes.begin())) return decode_png(bytes, name);
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) return decode_jpeg(bytes, name);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] >= '1' && bytes[1] <= '6') return PnmReader(bytes, name).read();
  throw FormatError("unsupported image format: " + name);
}

Image to_gray(const Image& img) {
  check_image(img);
  if (channels(img) == 1) return img;
  const std::size_t n = height(img) * width(img);
  Image out({height(img), width(img), 1});
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = 0.299f * img[3 * i] + 0.587f * img[3 * i + 1] + 0.114f * img[3 * i + 2];
  }
  return out;
}

Image to_color(const Image& img) {
  check_image(img);
  if (channels(img) == 3) return img;
  const std::size_t n = height(img) * width(img);
  Image out({height(img), width(img), 3});
  for (std::size_t i = 0; i < n; ++i) out[3 * i] = out[3 * i + 1] = out[3 * i + 2] = img[i];
  return out;
}

Image resize_bilinear(const Image& img, std::size_t out_h, std::size_t out_w) {
  check_image(img);
  const std::size_t h = height(img), w = width(img), c = channels(img);
  if (out_h == h && out_w == w) return img;
  Image out({out_h, out_w, c});

  struct Tap {
    std::size_t i0, i1;
    float frac;
  };
  auto taps = [](std::size_t in, std::size_t out_n) {
    std::vector<Tap> t(out_n);
    const double scale = static_cast<double>(in) / static_cast<double>(out_n);
    for (std::size_t o = 0; o < out_n; ++o) {
      const double s = std::clamp((o + 0.5) * scale - 0.5, 0.0, static_cast<double>(in - 1));
      const auto i0 = static_cast<std::size_t>(std::floor(s));
      t[o] = {i0, std::min(i0 + 1, in - 1), static_cast<float>(s - static_cast<double>(i0))};
    }
    return t;
  };
  const auto ty = taps(h, out_h), tx = taps(w, out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    const float fy = ty[y].frac;
    const float* r0 = img.raw() + ty[y].i0 * w * c;
    const float* r1 = img.raw() + ty[y].i1 * w * c;
    float* dst = out.raw() + y * out_w * c;
    for (std::size_t x = 0; x < out_w; ++x) {
      const float fx = tx[x].frac;
      const std::size_t a = tx[x].i0 * c, b = tx[x].i1 * c;
      for (std::size_t k = 0; k < c; ++k) {
        const float top = r0[a + k] + (r0[b + k] - r0[a + k]) * fx;
        const float bot = r1[a + k] + (r1[b + k] - r1[a + k]) * fx;
        dst[x * c + k] = top + (bot - top) * fy;
      }
    }
  }
  return out;
}

Image decode_and_resize(const std::filesystem::path& path, std::size_t out_h, std::size_t out_w, ColorMode mode) {
  Image img = decode_image(path);
  img = mode == ColorMode::gray ? to_gray(img) : to_color(img);
  return resize_bilinear(img, out_h, out_w);
}

void write_png(const std::filesystem::path& path, const Image& img) {
  check_image(img);
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width(img));
  image.height = static_cast<png_uint_32>(height(img));
  image.format = channels(img) == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const auto bytes = to_bytes(img);
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, bytes.data(), 0, nullptr)) {
    throw FormatError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

void write_pnm(const std::filesystem::path& path, const Image& img) {
  check_image(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << (channels(img) == 1 ? "P5" : "P6") << '\n' << width(img) << ' ' << height(img) << "\n255\n";
  const auto bytes = to_bytes(img);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace lowfake::data
