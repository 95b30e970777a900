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

#include "sketchygan/model/mru.hpp"

#include <stdexcept>
#include <vector>

namespace sketchygan {
namespace {

constexpr double kNormEps = 1e-5;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument("mru: " + what); }

void add_conv(ParamSet<float>& p, const std::string& name, int cout, int cin, int k, bool bias,
              std::mt19937_64& rng) {
  p.add(name + "/kernel", fan_in_uniform<float>(Shape{cout, cin, k, k}, cin * k * k, 1.0, rng));
  if (bias) p.add(name + "/bias", TensorF(Shape{1, cout, 1, 1}));
}

template <typename T>
Var<T> constant_like(Tape<T>& tape, const Shape& s, double v) {
  return tape.constant(Tensor<T>(s, scalar_cast<T>(static_cast<real_of_t<T>>(v))));
}

template <typename T>
Var<T> gate(Var<T> pre, const MRUConfig& c) {
  return c.gate == GateKind::kSigmoid ? sigmoid(pre) : gate_normalize_leakyrelu(pre, c.slope);
}

template <typename T>
Var<T> normalize(Var<T> x, Bound<T>& p, const std::string& name, const MRUConfig& c,
                 std::span<const int> labels) {
  if (c.norm == NormKind::kNone) return x;
  if (c.norm == NormKind::kInstance) {
    const std::vector<int> zeros(static_cast<std::size_t>(x.shape().n), 0);
    return cond_instance_norm(x, std::span<const int>(zeros), p(name + "/scale"), p(name + "/shift"),
                              kNormEps);
  }
  return cond_instance_norm(x, labels, p(name + "/scale"), p(name + "/shift"), kNormEps);
}

}  // namespace

std::string to_string(GateKind g) { return g == GateKind::kSigmoid ? "sigmoid" : "leakyrelu"; }
std::string to_string(BlockKind b) { return b == BlockKind::kMru ? "mru" : "residual"; }

GateKind parse_gate_kind(const std::string& s) {
  if (s == "sigmoid") return GateKind::kSigmoid;
  if (s == "leakyrelu" || s == "leakyrelu-normalized") return GateKind::kLeakyNormalized;
  throw std::invalid_argument("unknown gate kind '" + s + "' (expected sigmoid|leakyrelu)");
}

BlockKind parse_block_kind(const std::string& s) {
  if (s == "mru") return BlockKind::kMru;
  if (s == "residual") return BlockKind::kResidual;
  throw std::invalid_argument("unknown block kind '" + s + "' (expected mru|residual)");
}

void validate(const MRUConfig& c) {
  if (c.in_channels <= 0 || c.out_channels <= 0 || c.image_channels <= 0) {
    fail("channel counts must be positive");
  }
  if (c.stride != 1 && c.stride != 2) fail("stride must be 1 or 2, got " + std::to_string(c.stride));
  if (c.depth < 1) fail("conv stack depth must be >= 1");
  if (c.norm != NormKind::kNone && c.norm_classes < 1) fail("norm tables need >= 1 row");
}

std::size_t mru_param_count(const MRUConfig& c) {
  validate(c);
  const std::size_t a = c.in_channels, b = c.out_channels, i = c.image_channels;
  const std::size_t d = c.depth;
  const std::size_t k = c.norm == NormKind::kNone ? 0 : (c.norm == NormKind::kInstance ? 1 : c.norm_classes);
  std::size_t total = 9 * (a + i) * b + 9 * b * b * (d - 1);
  total += c.norm == NormKind::kNone ? b * d : 2 * k * b * d;
  if (c.kind == BlockKind::kMru) {
    total += 9 * (a + i) * a + a;
    total += 9 * (a + i) * b + b;
  }
  if (c.needs_projection()) total += a * b;
  return total;
}

void init_mru_params(ParamSet<float>& p, const std::string& prefix, const MRUConfig& c,
                     std::mt19937_64& rng) {
  validate(c);
  const int a = c.in_channels, b = c.out_channels, i = c.image_channels;
  const bool z_bias = c.norm == NormKind::kNone;
  const int rows = c.norm == NormKind::kConditional ? c.norm_classes : 1;
  if (c.kind == BlockKind::kMru) add_conv(p, prefix + "m", a, a + i, 3, true, rng);
  for (int j = 0; j < c.depth; ++j) {
    const std::string name = prefix + "z" + std::to_string(j);
    add_conv(p, name, b, j == 0 ? a + i : b, 3, z_bias, rng);
    if (c.norm != NormKind::kNone) {
      p.add(name + "_norm/scale", TensorF(Shape{rows, b, 1, 1}, 1.0f));
      p.add(name + "_norm/shift", TensorF(Shape{rows, b, 1, 1}, 0.0f));
    }
  }
  if (c.kind == BlockKind::kMru) add_conv(p, prefix + "n", b, a + i, 3, true, rng);
  if (c.needs_projection()) add_conv(p, prefix + "proj", b, a, 1, false, rng);
}

template <typename T>
Var<T> gate_normalize_leakyrelu(Var<T> pre_activation, double slope) {
  return minmax_normalize(leaky_relu(pre_activation, slope));
}

template <typename T>
MRUOutput<T> mru_forward(Var<T> x, Var<T> image, Bound<T>& p, const std::string& prefix,
                         const MRUConfig& c, std::span<const int> labels,
                         const MRUOverrides& ov) {
  validate(c);
  const Shape xs = x.shape();
  const Shape is = image.shape();
  if (xs.c != c.in_channels) {
    fail("input has " + std::to_string(xs.c) + " channels, block expects " +
         std::to_string(c.in_channels));
  }
  if (is.c != c.image_channels) {
    fail("image has " + std::to_string(is.c) + " channels, block expects " +
         std::to_string(c.image_channels));
  }
  if (is.n != xs.n || is.h != xs.h || is.w != xs.w) {
    fail("resolution mismatch between features " + xs.str() + " and image " + is.str());
  }
  if (xs.h % c.stride != 0 || xs.w % c.stride != 0) {
    fail("extent " + xs.str() + " not divisible by stride " + std::to_string(c.stride));
  }
  if (c.norm == NormKind::kConditional && static_cast<int>(labels.size()) != xs.n) {
    fail("conditional norm needs one label per sample");
  }
  Tape<T>& tape = x.tape();
  MRUOutput<T> out;
  const Var<T> xi = concat_channels(x, image);

  Var<T> z_in = xi;
  if (c.kind == BlockKind::kMru) {
    if (ov.m) {
      out.m = constant_like(tape, xs, *ov.m);
    } else {
      out.m = gate(conv2d(xi, p(prefix + "m/kernel"), p(prefix + "m/bias"), 1, 1), c);
      if (ov.detach_gates) out.m = detach(out.m);
    }
    z_in = concat_channels(mul(out.m, x), image);
  }

  Var<T> z = z_in;
  for (int j = 0; j < c.depth; ++j) {
    const std::string name = prefix + "z" + std::to_string(j);
    const int stride = j == 0 ? c.stride : 1;
    z = c.norm == NormKind::kNone
            ? conv2d(z, p(name + "/kernel"), p(name + "/bias"), stride, 1)
            : normalize(conv2d(z, p(name + "/kernel"), stride, 1), p, name + "_norm", c, labels);
    z = leaky_relu(z, c.slope);
  }
  if (ov.detach_z) z = detach(z);
  out.z = z;

  Var<T> skip = x;
  if (c.stride != 1) skip = downsample_avg(skip, c.stride);
  if (c.needs_projection()) skip = conv2d(skip, p(prefix + "proj/kernel"), 1, 0);

  if (c.kind == BlockKind::kResidual) {
    out.y = add(z, skip);
    return out;
  }
  if (ov.n) {
    out.n = constant_like(tape, z.shape(), *ov.n);
  } else {
    out.n = gate(conv2d(xi, p(prefix + "n/kernel"), p(prefix + "n/bias"), c.stride, 1), c);
    if (ov.detach_gates) out.n = detach(out.n);
  }
  // (1 - n) * z + n * x~
  out.y = add(mul(1.0 - out.n, z), mul(out.n, skip));
  return out;
}

template <typename T>
Var<T> mru_stack(Var<T> x, std::span<const Var<T>> pyramid, Bound<T>& p,
                 const std::string& prefix, std::span<const MRUConfig> configs,
                 std::span<const int> labels) {
  if (pyramid.size() < configs.size()) {
    fail("pyramid has " + std::to_string(pyramid.size()) + " levels for " +
         std::to_string(configs.size()) + " blocks");
  }
  Var<T> h = x;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    h = mru_forward(h, pyramid[i], p, prefix + std::to_string(i) + "/", configs[i], labels).y;
  }
  return h;
}

#define SKETCHYGAN_INSTANTIATE_MRU(T)                                                          \
  template Var<T> gate_normalize_leakyrelu(Var<T>, double);                                   \
  template MRUOutput<T> mru_forward(Var<T>, Var<T>, Bound<T>&, const std::string&,            \
                                    const MRUConfig&, std::span<const int>,                   \
                                    const MRUOverrides&);                                     \
  template Var<T> mru_stack(Var<T>, std::span<const Var<T>>, Bound<T>&, const std::string&,   \
                            std::span<const MRUConfig>, std::span<const int>);

SKETCHYGAN_INSTANTIATE_MRU(float)
SKETCHYGAN_INSTANTIATE_MRU(double)
SKETCHYGAN_INSTANTIATE_MRU(Dual<float>)
SKETCHYGAN_INSTANTIATE_MRU(Dual<double>)
#undef SKETCHYGAN_INSTANTIATE_MRU

}  // namespace sketchygan
