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

#include <vector>

#include "sketchygan/augment/image.hpp"

// Binary morphology on edge maps. Connectivity is 8-neighbor throughout.

namespace sketchygan {

/// 1 where g >= tau. tau must lie in (0, 1).
BinaryImage binarize(const GrayImage& g, double tau);

/// Zhang-Suen two-subiteration thinning, run until no pixel changes.
BinaryImage thin(const BinaryImage& b);

/// Deletes 8-connected components with fewer than min_size pixels.
BinaryImage remove_small_components(const BinaryImage& b, int min_size);

/// Keeps edge pixels with at least k edge pixels among their 8 neighbors. k in [0, 8].
BinaryImage erode_threshold(const BinaryImage& b, int k);

/*
 * Prunes dead-end branches of at most max_len pixels.
 *
 * Endpoints (pixels whose occupied neighbors form at most one contiguous arc
 * of at most three cells around the 8-ring) are peeled max_len times. Chains
 * peeled off the ends of surviving strokes are then regrown from the surviving
 * endpoints, one ring per step, so only side branches stay deleted. Strokes of
 * at most 2*max_len pixels with no junction disappear; closed loops are kept.
 */
BinaryImage remove_spurs(const BinaryImage& b, int max_len);

/// Sizes of the 8-connected components, in raster order of their first pixel.
std::vector<int> component_sizes(const BinaryImage& b);

/// True when every edge pixel of a is also an edge pixel of b.
bool is_subset(const BinaryImage& a, const BinaryImage& b);

std::size_t count_pixels(const BinaryImage& b);

}  // namespace sketchygan
