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

#include "sketchygan/augment/edges.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sketchygan {
namespace {

int clampi(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    total += k[i + radius];
  }
  for (double& v : k) v /= total;
  return k;
}

}  // namespace

GrayImage to_gray(const RgbImage& photo) {
  GrayImage g(photo.width, photo.height);
  for (int y = 0; y < photo.height; ++y) {
    for (int x = 0; x < photo.width; ++x) {
      g.at(x, y) = 0.299f * photo.at(x, y, 0) + 0.587f * photo.at(x, y, 1) +
                   0.114f * photo.at(x, y, 2);
    }
  }
  return g;
}

GrayImage detect_edges(const RgbImage& photo) {
  if (photo.width <= 0 || photo.height <= 0) {
    throw std::invalid_argument("detect_edges: zero-area image");
  }
  const int w = photo.width;
  const int h = photo.height;
  const GrayImage gray = to_gray(photo);
  const std::vector<double> k = gaussian_kernel(1.0);
  const int r = static_cast<int>(k.size() / 2);

  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  std::vector<double> blur(tmp.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * gray.at(clampi(x + i, 0, w - 1), y);
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp[static_cast<std::size_t>(clampi(y + i, 0, h - 1)) * w + x];
      blur[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  auto px = [&](int x, int y) {
    return blur[static_cast<std::size_t>(clampi(y, 0, h - 1)) * w + clampi(x, 0, w - 1)];
  };
  std::vector<double> mag(blur.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
      const double gy = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
      mag[static_cast<std::size_t>(y) * w + x] = std::sqrt(gx * gx + gy * gy);
    }
  }
  std::vector<double> sorted = mag;
  const auto rank = static_cast<std::size_t>(std::floor(0.99 * static_cast<double>(sorted.size() - 1)));
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank), sorted.end());
  double norm = sorted[rank];
  // Sparse edges can leave the percentile at zero; fall back to the peak.
  if (norm <= 1e-9) norm = *std::max_element(mag.begin(), mag.end());

  GrayImage out(w, h);
  if (norm <= 1e-9) return out;
  for (std::size_t i = 0; i < mag.size(); ++i) {
    out.values[i] = static_cast<float>(std::min(1.0, mag[i] / norm));
  }
  return out;
}

}  // namespace sketchygan
