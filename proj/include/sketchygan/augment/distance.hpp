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

/*
 * Exact unsigned Euclidean distance to the nearest edge pixel (separable
 * lower-envelope transform), truncated and normalized: min(d, cap) / cap.
 * An image without edge pixels maps to all ones.
 */
DistanceField distance_field(const BinaryImage& b, double cap);

}  // namespace sketchygan
