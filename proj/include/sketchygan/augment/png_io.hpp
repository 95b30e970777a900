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

#include <filesystem>

#include "sketchygan/augment/image.hpp"

// PNG input/output. Readers accept 8- or 16-bit gray, gray+alpha, RGB and
// RGBA (alpha is dropped) and throw std::runtime_error naming the file.

namespace sketchygan {

RgbImage read_png_rgb(const std::filesystem::path& path);
/// Color inputs are converted with Rec. 601 luma.
GrayImage read_png_gray(const std::filesystem::path& path);
/// 16-bit gray raster, value = sample / 65535.
DistanceField read_png_field(const std::filesystem::path& path);

/// 8-bit RGB, each sample round(v * 255) after clamping to [0, 1].
void write_png_rgb(const std::filesystem::path& path, const RgbImage& image);
/// 8-bit gray.
void write_png_gray(const std::filesystem::path& path, const GrayImage& image);
/// 16-bit gray, each sample round(v * 65535).
void write_png_field(const std::filesystem::path& path, const DistanceField& field);

/// The value a field pixel takes after a 16-bit round trip.
float quantize_field_value(float v);
/// The value a photo sample takes after an 8-bit round trip.
float quantize_photo_value(float v);

}  // namespace sketchygan
