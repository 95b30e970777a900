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

#include "sketchygan/augment/pipeline.hpp"

#include <stdexcept>
#include <string>

namespace sketchygan {

AugmentConfig AugmentConfig::for_resolution(int resolution) {
  if (resolution <= 0) {
    throw std::invalid_argument("AugmentConfig: resolution must be positive, got " +
                                std::to_string(resolution));
  }
  AugmentConfig c;
  c.cap = 32.0 * resolution / 64.0;
  return c;
}

BinaryImage clean_edges(const GrayImage& edges, const AugmentConfig& config) {
  BinaryImage b = binarize(edges, config.threshold);
  b = thin(b);
  b = remove_small_components(b, config.min_component);
  b = erode_threshold(b, config.erode_k);
  return remove_spurs(b, config.spur_len);
}

DistanceField augment_pipeline(const GrayImage& edges, const AugmentConfig& config) {
  return distance_field(clean_edges(edges, config), config.cap);
}

DistanceField augment_pipeline(const RgbImage& photo, const AugmentConfig& config) {
  return augment_pipeline(detect_edges(photo), config);
}

}  // namespace sketchygan
