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

#include "sketchygan/augment/image.hpp"

namespace sketchygan {

/// Rec. 601 luma.
GrayImage to_gray(const RgbImage& photo);

/*
 * Edge strength in [0, 1]: luma, Gaussian blur (sigma 1), Sobel gradient
 * magnitude, divided by the 99th-percentile magnitude and clamped. Borders
 * replicate the nearest pixel. Throws on a zero-area image.
 */
GrayImage detect_edges(const RgbImage& photo);

}  // namespace sketchygan
