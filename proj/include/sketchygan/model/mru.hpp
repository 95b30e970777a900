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

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sketchygan/core/ops.hpp"
#include "sketchygan/core/params.hpp"

namespace sketchygan {

enum class GateKind { kSigmoid, kLeakyNormalized };
enum class BlockKind { kMru, kResidual };
enum class NormKind { kNone, kInstance, kConditional };

std::string to_string(GateKind g);
std::string to_string(BlockKind b);
GateKind parse_gate_kind(const std::string& s);
BlockKind parse_block_kind(const std::string& s);

/*
 * One masked residual unit:
 *
 *   m = gate(conv3x3([x, I]))                    in_channels, input resolution
 *   z = f(norm(conv3x3_s([m * x, I])))           then depth-1 more f(norm(conv3x3(z)))
 *   n = gate(conv3x3_s([x, I]))                  out_channels, output resolution
 *   y = (1 - n) * z + n * x~
 *
 * x~ is x average-pooled by the stride, then a 1x1 projection when the
 * channel count or resolution changes. f is LeakyReLU. The residual block
 * kind drops both masks: z is computed from [x, I] and y = z + x~.
 */
struct MRUConfig {
  int in_channels = 0;
  int out_channels = 0;
  int image_channels = 0;
  int stride = 1;
  double slope = 0.2;
  GateKind gate = GateKind::kSigmoid;
  int depth = 2;
  BlockKind kind = BlockKind::kMru;
  NormKind norm = NormKind::kNone;
  /// Rows of the norm scale/shift tables (1 for plain instance norm).
  int norm_classes = 1;

  bool needs_projection() const { return in_channels != out_channels || stride != 1; }
};

void validate(const MRUConfig& c);

/*
 * Closed-form parameter count. With a = in, b = out, i = image channels,
 * d = depth, K = norm table rows (0 without norm):
 *   m:    9 (a + i) a + a
 *   n:    9 (a + i) b + b
 *   z:    9 (a + i) b + 9 b b (d - 1) + [no norm] b d + [norm] 2 K b d
 *   proj: a b when projecting
 * The residual kind omits m and n.
 */
std::size_t mru_param_count(const MRUConfig& c);

/// Adds the block's parameters as "<prefix>{m,n,z0,..,proj}/{kernel,bias}" and "<prefix>z<j>_norm/{scale,shift}".
void init_mru_params(ParamSet<float>& params, const std::string& prefix, const MRUConfig& c,
                     std::mt19937_64& rng);

/// Test hooks: constant gates and gradient cuts.
struct MRUOverrides {
  std::optional<double> m;
  std::optional<double> n;
  bool detach_gates = false;
  bool detach_z = false;
};

template <typename T>
struct MRUOutput {
  Var<T> y;
  Var<T> m;  // invalid for the residual kind
  Var<T> n;  // invalid for the residual kind
  Var<T> z;
};

/// LeakyReLU followed by per-sample, per-channel min-max scaling to [0, 1].
template <typename T>
Var<T> gate_normalize_leakyrelu(Var<T> pre_activation, double slope = 0.2);

/*
 * labels selects the norm table row per sample (ignored without norm, must
 * be all zero-capable for plain instance norm). Throws when x and image
 * differ in resolution or x's channels differ from in_channels.
 */
template <typename T>
MRUOutput<T> mru_forward(Var<T> x, Var<T> image, Bound<T>& params, const std::string& prefix,
                         const MRUConfig& c, std::span<const int> labels,
                         const MRUOverrides& overrides = {});

/// Applies blocks in order; block i is conditioned on pyramid[i] and named "<prefix><i>/".
template <typename T>
Var<T> mru_stack(Var<T> x, std::span<const Var<T>> pyramid, Bound<T>& params,
                 const std::string& prefix, std::span<const MRUConfig> configs,
                 std::span<const int> labels);

#define SKETCHYGAN_DECLARE_MRU(T)                                                              \
  extern template Var<T> gate_normalize_leakyrelu(Var<T>, double);                            \
  extern template MRUOutput<T> mru_forward(Var<T>, Var<T>, Bound<T>&, const std::string&,     \
                                           const MRUConfig&, std::span<const int>,            \
                                           const MRUOverrides&);                              \
  extern template Var<T> mru_stack(Var<T>, std::span<const Var<T>>, Bound<T>&,                \
                                   const std::string&, std::span<const MRUConfig>,            \
                                   std::span<const int>);

SKETCHYGAN_DECLARE_MRU(float)
SKETCHYGAN_DECLARE_MRU(double)
SKETCHYGAN_DECLARE_MRU(Dual<float>)
SKETCHYGAN_DECLARE_MRU(Dual<double>)
#undef SKETCHYGAN_DECLARE_MRU

}  // namespace sketchygan
