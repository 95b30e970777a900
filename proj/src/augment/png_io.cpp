/*
 * Copyright 2026 The SketchyGAN-desk Authors
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

#include "sketchygan/augment/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "sketchygan/augment/edges.hpp"

namespace sketchygan {
namespace {

struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 or 3 after stripping alpha
  std::vector<float> samples;  // interleaved, in [0, 1]
};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error("png " + path.string() + ": " + what);
}

void on_error(png_structp png, png_const_charp msg) {
  auto* message = static_cast<std::string*>(png_get_error_ptr(png));
  if (message != nullptr) *message = msg;
  png_longjmp(png, 1);
}
void on_warning(png_structp, png_const_charp) {}

Decoded decode(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) fail(path, "cannot open for reading");
  std::uint8_t sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    fail(path, "not a PNG file");
  }
  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, on_error, on_warning);
  if (png == nullptr) fail(path, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(path, "libpng initialization failed");
  }
  Decoded out;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> buffer;
  if (setjmp(png_jmpbuf(png)) != 0) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "decode error: " + message);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (depth == 16) png_set_swap(png);  // host-order 16-bit samples
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  const int channels = png_get_channels(png, info);
  const int bits = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * static_cast<std::size_t>(out.height));
  rows.resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) rows[y] = buffer.data() + rowbytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const int keep = (channels == 1 || channels == 2) ? 1 : 3;
  out.channels = keep;
  out.samples.resize(static_cast<std::size_t>(out.width) * out.height * keep);
  const double scale = bits == 16 ? 65535.0 : 255.0;
  std::size_t k = 0;
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      for (int c = 0; c < keep; ++c) {
        const std::size_t idx = static_cast<std::size_t>(x) * channels + c;
        double v = 0.0;
        if (bits == 16) {
          std::uint16_t s = 0;
          std::copy_n(rows[y] + idx * 2, 2, reinterpret_cast<std::uint8_t*>(&s));
          v = s;
        } else {
          v = rows[y][idx];
        }
        out.samples[k++] = static_cast<float>(v / scale);
      }
    }
  }
  return out;
}

void encode(const std::filesystem::path& path, int width, int height, int channels, int bits,
            const std::vector<std::uint16_t>& samples) {
  if (width <= 0 || height <= 0) fail(path, "refusing to write a zero-area image");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) fail(path, "cannot open for writing");
  std::string message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, on_error, on_warning);
  if (png == nullptr) fail(path, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    fail(path, "libpng initialization failed");
  }
  const std::size_t bytes = bits / 8;
  const std::size_t rowbytes = static_cast<std::size_t>(width) * channels * bytes;
  std::vector<std::uint8_t> buffer(rowbytes * static_cast<std::size_t>(height));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (bytes == 2) {
      buffer[2 * i] = static_cast<std::uint8_t>(samples[i] >> 8);  // PNG is big-endian
      buffer[2 * i + 1] = static_cast<std::uint8_t>(samples[i] & 0xff);
    } else {
      buffer[i] = static_cast<std::uint8_t>(samples[i]);
    }
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[y] = buffer.data() + rowbytes * y;
  if (setjmp(png_jmpbuf(png)) != 0) {
    png_destroy_write_struct(&png, &info);
    fail(path, "encode error: " + message);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bits,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::uint16_t quantize(float v, double levels) {
  const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
  return static_cast<std::uint16_t>(std::lround(c * levels));
}

}  // namespace

float quantize_field_value(float v) {
  return static_cast<float>(quantize(v, 65535.0) / 65535.0);
}

float quantize_photo_value(float v) { return static_cast<float>(quantize(v, 255.0) / 255.0); }

RgbImage read_png_rgb(const std::filesystem::path& path) {
  const Decoded d = decode(path);
  RgbImage out(d.width, d.height);
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const std::size_t p = static_cast<std::size_t>(y) * d.width + x;
        out.at(x, y, c) = d.channels == 1 ? d.samples[p] : d.samples[p * 3 + c];
      }
    }
  }
  return out;
}

GrayImage read_png_gray(const std::filesystem::path& path) {
  const Decoded d = decode(path);
  if (d.channels == 1) {
    GrayImage g(d.width, d.height);
    g.values = d.samples;
    return g;
  }
  RgbImage rgb(d.width, d.height);
  rgb.values = d.samples;
  return to_gray(rgb);
}

DistanceField read_png_field(const std::filesystem::path& path) {
  const Decoded d = decode(path);
  if (d.channels != 1) fail(path, "distance field must be single-channel");
  DistanceField f(d.width, d.height);
  f.values = d.samples;
  return f;
}

void write_png_rgb(const std::filesystem::path& path, const RgbImage& image) {
  std::vector<std::uint16_t> s(image.values.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = quantize(image.values[i], 255.0);
  encode(path, image.width, image.height, 3, 8, s);
}

void write_png_gray(const std::filesystem::path& path, const GrayImage& image) {
  std::vector<std::uint16_t> s(image.values.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = quantize(image.values[i], 255.0);
  encode(path, image.width, image.height, 1, 8, s);
}

void write_png_field(const std::filesystem::path& path, const DistanceField& field) {
  std::vector<std::uint16_t> s(field.values.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = quantize(field.values[i], 65535.0);
  encode(path, field.width, field.height, 1, 16, s);
}

}  // namespace sketchygan
