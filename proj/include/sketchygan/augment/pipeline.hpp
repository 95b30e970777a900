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

#include "sketchygan/augment/distance.hpp"
#include "sketchygan/augment/edges.hpp"
#include "sketchygan/augment/morphology.hpp"

namespace sketchygan {

struct AugmentConfig {
  double threshold = 0.25;
  int min_component = 10;
  int erode_k = 2;
  int spur_len = 4;
  /// Truncation distance in pixels.
  double cap = 32.0;

  /// Defaults with the cap scaled from 32 px at 64x64 to the given resolution.
  static AugmentConfig for_resolution(int resolution);
};

/// Binary edge map after binarize, thin, small-component removal, erosion and spur removal.
BinaryImage clean_edges(const GrayImage& edges, const AugmentConfig& config);

/// Edge-probability input: skips edge detection.
DistanceField augment_pipeline(const GrayImage& edges, const AugmentConfig& config);
/// Photo input: detect_edges followed by the edge-probability pipeline.
DistanceField augment_pipeline(const RgbImage& photo, const AugmentConfig& config);

}  // namespace sketchygan
