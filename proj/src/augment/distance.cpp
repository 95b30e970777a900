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

#include "sketchygan/augment/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace sketchygan {
namespace {

constexpr double kFar = 1e20;

// Lower envelope of parabolas (q - v)^2 + f(v); writes squared distances to d.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
          (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

DistanceField distance_field(const BinaryImage& b, double cap) {
  if (!(cap > 0.0)) {
    throw std::invalid_argument("distance_field: cap must be positive, got " + std::to_string(cap));
  }
  const int w = b.width;
  const int h = b.height;
  DistanceField out(w, h, 1.0f);
  if (std::none_of(b.values.begin(), b.values.end(), [](auto v) { return v != 0; })) return out;

  std::vector<double> sq(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = b.values[i] != 0 ? 0.0 : kFar;

  const int longest = std::max(w, h);
  std::vector<double> f(longest), d(longest), z(longest + 1);
  std::vector<int> v(longest);
  f.resize(h);
  d.resize(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = sq[static_cast<std::size_t>(y) * w + x];
    edt_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) sq[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  f.resize(w);
  d.resize(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = sq[static_cast<std::size_t>(y) * w + x];
    edt_1d(f, d, v, z);
    for (int x = 0; x < w; ++x) {
      const double dist = std::sqrt(d[x]);
      out.at(x, y) = static_cast<float>(std::min(dist, cap) / cap);
    }
  }
  return out;
}

}  // namespace sketchygan
