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

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sketchygan/augment/image.hpp"

namespace sketchygan {

enum class ShapeClass { kEllipse = 0, kRectangle = 1, kTriangle = 2, kStar = 3 };
inline constexpr int kShapeClasses = 4;

std::string class_name(int label);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/*
 * One synthetic object. Coordinates are in pixels with pixel (i, j)
 * covering [i, i+1) x [j, j+1). scale is the circumradius: every class fits
 * inside the circle of that radius around the center.
 */
struct ShapeSpec {
  int label = 0;
  double cx = 16.0;
  double cy = 16.0;
  double scale = 10.0;
  double rotation = 0.0;
  std::array<float, 3> fill = {0.8f, 0.2f, 0.2f};
  std::array<float, 3> background = {0.9f, 0.9f, 0.9f};
  /// RMS displacement of the sketch contour in pixels; at most 0.1 * scale.
  double jitter = 0.0;
};

inline constexpr double kMinMargin = 2.0;
inline constexpr double kMaxJitterFraction = 0.1;

void validate(const ShapeSpec& spec, int resolution);

/// Closed outline, densely sampled (no repeated end point).
std::vector<Point> shape_outline(const ShapeSpec& spec);

struct PairedSample {
  int label = 0;
  RgbImage photo;
  DistanceField edge_field;
  DistanceField sketch_field;
};

struct SynthOptions {
  /// Sketch jitter as a fraction of the shape scale.
  double jitter_fraction = 0.08;
  /// Distance-field truncation in pixels; 0 picks the resolution default.
  double cap = 0.0;
};

/// Random spec of the given class that satisfies the margin and jitter bounds.
ShapeSpec random_spec(int label, int resolution, std::mt19937_64& rng,
                      const SynthOptions& options = {});

/*
 * Photo: 4x4 supersampled fill over the background, quantized to 8 bits.
 * Edge field: distance field of the rasterized outline. Sketch field: the
 * same for the outline displaced by a smooth random field (Gaussian per
 * vertex, circularly smoothed with correlation length 1/8 of the
 * perimeter, rescaled to the spec's RMS jitter). Fields are quantized to
 * 16 bits so files round-trip exactly.
 */
PairedSample render_sample(const ShapeSpec& spec, int resolution, std::mt19937_64& rng,
                           const SynthOptions& options = {});

/// 8-connected rasterization of a closed outline; points outside the canvas are dropped.
BinaryImage rasterize_outline(const std::vector<Point>& outline, int resolution);

}  // namespace sketchygan
