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


#include "sketchygan/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sketchygan/augment/distance.hpp"
#include "sketchygan/augment/pipeline.hpp"
#include "sketchygan/augment/png_io.hpp"

namespace sketchygan {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOutlineStep = 0.25;
constexpr int kSupersample = 4;

std::vector<Point> polygon(const ShapeSpec& s) {
  std::vector<Point> local;
  switch (static_cast<ShapeClass>(s.label)) {
    case ShapeClass::kEllipse: {
      const int n = 96;
      for (int i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * i / n;
        local.push_back({s.scale * std::cos(t), 0.62 * s.scale * std::sin(t)});
      }
      break;
    }
    case ShapeClass::kRectangle: {
      // Corners on the circumcircle with a 0.8 : 0.6 aspect.
      const double hx = 0.8 * s.scale, hy = 0.6 * s.scale;
      local = {{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}};
      break;
    }
    case ShapeClass::kTriangle:
      for (int i = 0; i < 3; ++i) {
        const double t = -kPi / 2 + 2.0 * kPi * i / 3;
        local.push_back({s.scale * std::cos(t), s.scale * std::sin(t)});
      }
      break;
    case ShapeClass::kStar:
      for (int i = 0; i < 10; ++i) {
        const double t = -kPi / 2 + kPi * i / 5;
        const double r = (i % 2 == 0) ? s.scale : 0.45 * s.scale;
        local.push_back({r * std::cos(t), r * std::sin(t)});
      }
      break;
  }
  const double c = std::cos(s.rotation), sn = std::sin(s.rotation);
  std::vector<Point> out;
  for (const Point& p : local) out.push_back({s.cx + c * p.x - sn * p.y, s.cy + sn * p.x + c * p.y});
  return out;
}

bool inside_polygon(const std::vector<Point>& poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

/// Circular Gaussian smoothing of a periodic sequence.
std::vector<double> smooth_periodic(const std::vector<double>& v, double sigma) {
  const int n = static_cast<int>(v.size());
  const int radius = std::min(n / 2, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
  for (int k = -radius; k <= radius; ++k) w[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
  std::vector<double> out(v.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = -radius; k <= radius; ++k) acc += w[k + radius] * v[((i + k) % n + n) % n];
    out[i] = acc;
  }
  return out;
}

DistanceField quantized_field(const BinaryImage& edges, double cap) {
  DistanceField f = distance_field(edges, cap);
  for (float& v : f.values) v = quantize_field_value(v);
  return f;
}

}  // namespace

std::string class_name(int label) {
  static const char* names[kShapeClasses] = {"ellipse", "rectangle", "triangle", "star"};
  if (label < 0 || label >= kShapeClasses) {
    throw std::invalid_argument("class label " + std::to_string(label) + " outside [0, " +
                                std::to_string(kShapeClasses) + ")");
  }
  return names[label];
}

void validate(const ShapeSpec& s, int resolution) {
  class_name(s.label);
  if (resolution < 8) throw std::invalid_argument("shape: resolution must be >= 8");
  if (!(s.scale > 0)) throw std::invalid_argument("shape: scale must be > 0");
  if (s.jitter < 0 || s.jitter > kMaxJitterFraction * s.scale + 1e-12) {
    throw std::invalid_argument("shape: jitter " + std::to_string(s.jitter) +
                                " exceeds 10% of scale " + std::to_string(s.scale));
  }
  for (const Point& p : polygon(s)) {
    if (p.x < kMinMargin || p.y < kMinMargin || p.x > resolution - kMinMargin ||
        p.y > resolution - kMinMargin) {
      throw std::invalid_argument("shape: outline leaves the " + std::to_string(kMinMargin) +
                                  " px margin of a " + std::to_string(resolution) + " px canvas");
    }
  }
  for (const auto* rgb : {&s.fill, &s.background}) {
    for (float v : *rgb) {
      if (!(v >= 0.0f && v <= 1.0f)) throw std::invalid_argument("shape: colors must lie in [0, 1]");
    }
  }
}

std::vector<Point> shape_outline(const ShapeSpec& spec) {
  const std::vector<Point> poly = polygon(spec);
  std::vector<Point> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int steps = std::max(1, static_cast<int>(std::ceil(len / kOutlineStep)));
    for (int k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

BinaryImage rasterize_outline(const std::vector<Point>& outline, int resolution) {
  BinaryImage img(resolution, resolution);
  auto mark = [&](double x, double y) {
    const int px = static_cast<int>(std::floor(x));
    const int py = static_cast<int>(std::floor(y));
    if (img.inside(px, py)) img.at(px, py) = 1;
  };
  for (std::size_t i = 0; i < outline.size(); ++i) {
    const Point& a = outline[i];
    const Point& b = outline[(i + 1) % outline.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int steps = std::max(1, static_cast<int>(std::ceil(len / kOutlineStep)));
    for (int k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      mark(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
    }
  }
  return img;
}

ShapeSpec random_spec(int label, int resolution, std::mt19937_64& rng, const SynthOptions& o) {
  class_name(label);
  if (o.jitter_fraction < 0 || o.jitter_fraction > kMaxJitterFraction) {
    throw std::invalid_argument("synth: jitter fraction must lie in [0, 0.1]");
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ShapeSpec s;
  s.label = label;
  s.scale = resolution * (0.24 + 0.12 * u(rng));
  const double lo = s.scale + kMinMargin + 0.5;
  const double hi = resolution - s.scale - kMinMargin - 0.5;
  s.cx = lo + (hi - lo) * u(rng);
  s.cy = lo + (hi - lo) * u(rng);
  s.rotation = 2.0 * kPi * u(rng);

  // Class-dependent hue with random saturation and value over a near-white
  // background, so everything but the fill shade is predictable from the outline.
  const double hue = std::fmod(static_cast<double>(label) / kShapeClasses + 0.08 * (u(rng) - 0.5) + 1.0, 1.0);
  const double sat = 0.55 + 0.35 * u(rng);
  const double val = 0.5 + 0.35 * u(rng);
  const double h6 = hue * 6.0;
  const int sector = static_cast<int>(h6) % 6;
  const double f = h6 - std::floor(h6);
  const double p = val * (1 - sat), q = val * (1 - sat * f), t = val * (1 - sat * (1 - f));
  const double rgb[6][3] = {{val, t, p}, {q, val, p}, {p, val, t}, {p, q, val}, {t, p, val}, {val, p, q}};
  for (int c = 0; c < 3; ++c) s.fill[c] = static_cast<float>(rgb[sector][c]);
  for (int c = 0; c < 3; ++c) s.background[c] = static_cast<float>(0.9 + 0.04 * (u(rng) - 0.5));
  s.jitter = o.jitter_fraction * s.scale;
  return s;
}

PairedSample render_sample(const ShapeSpec& spec, int resolution, std::mt19937_64& rng,
                           const SynthOptions& options) {
  validate(spec, resolution);
  const double cap = options.cap > 0 ? options.cap : AugmentConfig::for_resolution(resolution).cap;
  PairedSample out;
  out.label = spec.label;

  const std::vector<Point> poly = polygon(spec);
  out.photo = RgbImage(resolution, resolution);
  const double inv = 1.0 / kSupersample;
  for (int y = 0; y < resolution; ++y) {
    for (int x = 0; x < resolution; ++x) {
      int hits = 0;
      for (int sy = 0; sy < kSupersample; ++sy) {
        for (int sx = 0; sx < kSupersample; ++sx) {
          hits += inside_polygon(poly, x + (sx + 0.5) * inv, y + (sy + 0.5) * inv);
        }
      }
      const double a = static_cast<double>(hits) / (kSupersample * kSupersample);
      for (int c = 0; c < 3; ++c) {
        out.photo.at(x, y, c) = quantize_photo_value(
            static_cast<float>(a * spec.fill[c] + (1.0 - a) * spec.background[c]));
      }
    }
  }

  const std::vector<Point> outline = shape_outline(spec);
  out.edge_field = quantized_field(rasterize_outline(outline, resolution), cap);

  // Sketch: smooth displacement field along the outline.
  std::vector<double> dx(outline.size()), dy(outline.size());
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < outline.size(); ++i) {
    dx[i] = gauss(rng);
    dy[i] = gauss(rng);
  }
  if (spec.jitter == 0.0) {
    out.sketch_field = out.edge_field;
    return out;
  }
  const double sigma = outline.size() / 8.0;
  dx = smooth_periodic(dx, sigma);
  dy = smooth_periodic(dy, sigma);
  double ms = 0.0;
  for (std::size_t i = 0; i < outline.size(); ++i) ms += dx[i] * dx[i] + dy[i] * dy[i];
  const double rms = std::sqrt(ms / outline.size());
  const double k = rms > 0 ? spec.jitter / rms : 0.0;
  std::vector<Point> jittered(outline.size());
  for (std::size_t i = 0; i < outline.size(); ++i) {
    jittered[i] = {outline[i].x + k * dx[i], outline[i].y + k * dy[i]};
  }
  out.sketch_field = quantized_field(rasterize_outline(jittered, resolution), cap);
  return out;
}

}  // namespace sketchygan
