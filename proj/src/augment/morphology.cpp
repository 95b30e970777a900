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

#include "sketchygan/augment/morphology.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <utility>

namespace sketchygan {
namespace {

// Clockwise from north: P2..P9 in Zhang-Suen notation.
constexpr std::array<int, 8> kDx = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDy = {-1, -1, 0, 1, 1, 1, 0, -1};

std::array<std::uint8_t, 8> ring(const BinaryImage& b, int x, int y) {
  std::array<std::uint8_t, 8> r{};
  for (int i = 0; i < 8; ++i) r[i] = b.get(x + kDx[i], y + kDy[i]) != 0 ? 1 : 0;
  return r;
}

int occupied(const std::array<std::uint8_t, 8>& r) {
  int n = 0;
  for (auto v : r) n += v;
  return n;
}

// Number of 0 -> 1 transitions around the closed ring.
int transitions(const std::array<std::uint8_t, 8>& r) {
  int t = 0;
  for (int i = 0; i < 8; ++i) t += (r[i] == 0 && r[(i + 1) % 8] == 1) ? 1 : 0;
  return t;
}

bool is_endpoint(const BinaryImage& b, int x, int y) {
  const auto r = ring(b, x, y);
  const int n = occupied(r);
  return n <= 3 && transitions(r) <= 1;
}

void require_binary_extent(const BinaryImage& a, const BinaryImage& b, const char* op) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument(std::string(op) + ": raster extents differ");
  }
}

}  // namespace

BinaryImage binarize(const GrayImage& g, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("binarize: threshold must lie in (0, 1), got " +
                                std::to_string(tau));
  }
  BinaryImage out(g.width, g.height);
  const float t = static_cast<float>(tau);
  for (std::size_t i = 0; i < g.values.size(); ++i) out.values[i] = g.values[i] >= t ? 1 : 0;
  return out;
}

BinaryImage thin(const BinaryImage& b) {
  BinaryImage cur = b;
  std::vector<std::size_t> doomed;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      doomed.clear();
      for (int y = 0; y < cur.height; ++y) {
        for (int x = 0; x < cur.width; ++x) {
          if (cur.at(x, y) == 0) continue;
          const auto p = ring(cur, x, y);  // p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W)
          const int bp = occupied(p);
          if (bp < 2 || bp > 6 || transitions(p) != 1) continue;
          const bool c1 = pass == 0 ? (p[0] & p[2] & p[4]) == 0 : (p[0] & p[2] & p[6]) == 0;
          const bool c2 = pass == 0 ? (p[2] & p[4] & p[6]) == 0 : (p[0] & p[4] & p[6]) == 0;
          if (c1 && c2) doomed.push_back(static_cast<std::size_t>(y) * cur.width + x);
        }
      }
      for (std::size_t i : doomed) cur.values[i] = 0;
      changed = changed || !doomed.empty();
    }
  }
  return cur;
}

std::vector<int> component_sizes(const BinaryImage& b) {
  std::vector<int> sizes;
  std::vector<std::uint8_t> seen(b.values.size(), 0);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < b.height; ++y) {
    for (int x = 0; x < b.width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * b.width + x;
      if (b.values[idx] == 0 || seen[idx] != 0) continue;
      int size = 0;
      seen[idx] = 1;
      stack.assign(1, {x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        ++size;
        for (int i = 0; i < 8; ++i) {
          const int nx = cx + kDx[i];
          const int ny = cy + kDy[i];
          if (!b.inside(nx, ny)) continue;
          const std::size_t n = static_cast<std::size_t>(ny) * b.width + nx;
          if (b.values[n] != 0 && seen[n] == 0) {
            seen[n] = 1;
            stack.emplace_back(nx, ny);
          }
        }
      }
      sizes.push_back(size);
    }
  }
  return sizes;
}

BinaryImage remove_small_components(const BinaryImage& b, int min_size) {
  if (min_size < 1) {
    throw std::invalid_argument("remove_small_components: min_size must be >= 1, got " +
                                std::to_string(min_size));
  }
  BinaryImage out = b;
  std::vector<int> label(b.values.size(), -1);
  std::vector<std::size_t> members;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < b.values.size(); ++start) {
    if (b.values[start] == 0 || label[start] >= 0) continue;
    members.clear();
    stack.assign(1, start);
    label[start] = 1;
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      members.push_back(cur);
      const int cx = static_cast<int>(cur % b.width);
      const int cy = static_cast<int>(cur / b.width);
      for (int i = 0; i < 8; ++i) {
        const int nx = cx + kDx[i];
        const int ny = cy + kDy[i];
        if (!b.inside(nx, ny)) continue;
        const std::size_t n = static_cast<std::size_t>(ny) * b.width + nx;
        if (b.values[n] != 0 && label[n] < 0) {
          label[n] = 1;
          stack.push_back(n);
        }
      }
    }
    if (static_cast<int>(members.size()) < min_size) {
      for (std::size_t m : members) out.values[m] = 0;
    }
  }
  return out;
}

BinaryImage erode_threshold(const BinaryImage& b, int k) {
  if (k < 0 || k > 8) {
    throw std::invalid_argument("erode_threshold: k must lie in [0, 8], got " + std::to_string(k));
  }
  BinaryImage out(b.width, b.height);
  for (int y = 0; y < b.height; ++y) {
    for (int x = 0; x < b.width; ++x) {
      if (b.at(x, y) == 0) continue;
      out.at(x, y) = occupied(ring(b, x, y)) >= k ? 1 : 0;
    }
  }
  return out;
}

BinaryImage remove_spurs(const BinaryImage& b, int max_len) {
  if (max_len < 1) {
    throw std::invalid_argument("remove_spurs: max_len must be >= 1, got " +
                                std::to_string(max_len));
  }
  BinaryImage core = b;
  std::vector<std::size_t> peel;
  for (int step = 0; step < max_len; ++step) {
    peel.clear();
    for (int y = 0; y < core.height; ++y) {
      for (int x = 0; x < core.width; ++x) {
        if (core.at(x, y) != 0 && is_endpoint(core, x, y)) {
          peel.push_back(static_cast<std::size_t>(y) * core.width + x);
        }
      }
    }
    if (peel.empty()) break;
    for (std::size_t i : peel) core.values[i] = 0;
  }

  // Regrowth: 1 = surviving stroke interior, 2 = anchor (surviving endpoint or regrown).
  std::vector<std::uint8_t> state(core.values.size(), 0);
  std::vector<std::size_t> frontier;
  for (int y = 0; y < core.height; ++y) {
    for (int x = 0; x < core.width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * core.width + x;
      if (core.values[idx] == 0) continue;
      if (is_endpoint(core, x, y)) {
        state[idx] = 2;
        frontier.push_back(idx);
      } else {
        state[idx] = 1;
      }
    }
  }
  BinaryImage out = core;
  std::vector<std::size_t> next;
  for (int step = 0; step < max_len && !frontier.empty(); ++step) {
    next.clear();
    for (std::size_t f : frontier) {
      const int fx = static_cast<int>(f % b.width);
      const int fy = static_cast<int>(f / b.width);
      for (int i = 0; i < 8; ++i) {
        const int cx = fx + kDx[i];
        const int cy = fy + kDy[i];
        if (!b.inside(cx, cy)) continue;
        const std::size_t c = static_cast<std::size_t>(cy) * b.width + cx;
        if (b.values[c] == 0 || out.values[c] != 0) continue;
        // A peeled pixel touching the stroke interior belongs to a side branch.
        bool touches_interior = false;
        for (int j = 0; j < 8 && !touches_interior; ++j) {
          const int nx = cx + kDx[j];
          const int ny = cy + kDy[j];
          if (b.inside(nx, ny) && state[static_cast<std::size_t>(ny) * b.width + nx] == 1) {
            touches_interior = true;
          }
        }
        if (touches_interior) continue;
        next.push_back(c);
      }
    }
    for (std::size_t c : next) {
      out.values[c] = 1;
      state[c] = 2;
    }
    frontier.swap(next);
  }
  return out;
}

bool is_subset(const BinaryImage& a, const BinaryImage& b) {
  require_binary_extent(a, b, "is_subset");
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (a.values[i] != 0 && b.values[i] == 0) return false;
  }
  return true;
}

std::size_t count_pixels(const BinaryImage& b) {
  std::size_t n = 0;
  for (auto v : b.values) n += v != 0 ? 1 : 0;
  return n;
}

}  // namespace sketchygan
