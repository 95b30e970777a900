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

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sketchygan {

/// Row-major single-channel raster. Tag keeps gray, binary and field images distinct types.
template <typename T, typename Tag>
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<T> values;

  Raster() = default;
  Raster(int w, int h, T fill = T{}) : width(w), height(h) {
    if (w < 0 || h < 0) {
      throw std::invalid_argument("Raster: negative extent " + std::to_string(w) + "x" +
                                  std::to_string(h));
    }
    values.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
  }

  bool empty() const { return values.empty(); }
  bool inside(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  T& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  const T& at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  /// Zero outside the raster.
  T get(int x, int y) const { return inside(x, y) ? at(x, y) : T{}; }

  bool operator==(const Raster&) const = default;
};

struct GrayTag {};
struct BinaryTag {};
struct FieldTag {};

/// Values in [0, 1].
using GrayImage = Raster<float, GrayTag>;
/// 1 = edge pixel, 0 = background.
using BinaryImage = Raster<std::uint8_t, BinaryTag>;
/// Truncated, normalized distance to the nearest edge pixel, in [0, 1].
using DistanceField = Raster<float, FieldTag>;

/// Interleaved RGB, values in [0, 1].
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  RgbImage() = default;
  RgbImage(int w, int h, float fill = 0.0f) : width(w), height(h) {
    if (w < 0 || h < 0) throw std::invalid_argument("RgbImage: negative extent");
    values.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, fill);
  }

  bool empty() const { return values.empty(); }
  float& at(int x, int y, int c) {
    return values[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  float at(int x, int y, int c) const {
    return values[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }

  bool operator==(const RgbImage&) const = default;
};

}  // namespace sketchygan
