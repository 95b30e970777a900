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

#include <cstdint>
#include <span>
#include <vector>

#include "sketchygan/model/mru.hpp"

namespace sketchygan {

/*
 * Encoder-decoder generator. Encoder block i (stride 2) is conditioned on
 * pyramid level i. At the bottleneck the noise vector is broadcast over the
 * spatial grid and concatenated. Decoder block j upsamples by 2, concatenates
 * the matching encoder output (when skips are on) and is conditioned on the
 * pyramid level of its resolution. A 1x1 convolution and tanh produce RGB.
 *
 * Parameter names: "enc/<i>/...", "dec/<j>/...", "out/{kernel,bias}".
 */
struct GeneratorConfig {
  int resolution = 32;
  std::vector<int> channels = {32, 64, 128};
  int noise_dim = 64;
  int classes = 4;
  GateKind gate = GateKind::kSigmoid;
  BlockKind block = BlockKind::kMru;
  int depth = 2;
  bool skips = true;
  /// Class-conditional norm; false gives plain instance norm (no class input).
  bool conditional = true;

  int levels() const { return static_cast<int>(channels.size()); }
  std::vector<MRUConfig> encoder_blocks() const;
  std::vector<MRUConfig> decoder_blocks() const;
};

/*
 * MRU discriminator: stride-2 blocks conditioned on the judged image at each
 * block's resolution (optionally together with the sketch), plain instance
 * norm, global average pool, then a 1-logit GAN head and a K-logit class head.
 *
 * Parameter names: "mru/<i>/...", "gan/{kernel,bias}", "cls/{kernel,bias}".
 */
struct DiscriminatorConfig {
  int resolution = 32;
  std::vector<int> channels = {32, 64, 128};
  int classes = 4;
  GateKind gate = GateKind::kSigmoid;
  int depth = 2;
  bool sketch_conditioned = false;

  std::vector<MRUConfig> blocks() const;
};

void validate(const GeneratorConfig& c);
void validate(const DiscriminatorConfig& c);

ParamSet<float> init_generator(const GeneratorConfig& c, std::uint64_t seed);
ParamSet<float> init_discriminator(const DiscriminatorConfig& c, std::uint64_t seed);
std::size_t generator_param_count(const GeneratorConfig& c);
std::size_t discriminator_param_count(const DiscriminatorConfig& c);

/// [field, field/2, ...]: level i+1 is the 2x average-pool of level i.
template <typename T>
std::vector<Var<T>> make_pyramid(Var<T> field, int levels);

/// noise: (N, noise_dim, 1, 1). Returns (N, 3, R, R) in [-1, 1].
template <typename T>
Var<T> generator_forward(std::span<const Var<T>> pyramid, Var<T> noise,
                         std::span<const int> labels, Bound<T>& params, const GeneratorConfig& c);

template <typename T>
struct DiscriminatorOutput {
  Var<T> gan_logit;     // (N, 1, 1, 1)
  Var<T> class_logits;  // (N, K, 1, 1)
};

/// sketch is required only for the sketch-conditioned variant.
template <typename T>
DiscriminatorOutput<T> discriminator_forward(Var<T> image, Bound<T>& params,
                                             const DiscriminatorConfig& c,
                                             const Var<T>* sketch = nullptr);

/*
 * Image classifier built from the same blocks: stride-2 blocks conditioned
 * on the photo pyramid, instance norm, global average pool and a dense head.
 * Used to compare MRU gates against a residual baseline.
 */
struct ClassifierConfig {
  int resolution = 32;
  std::vector<int> channels = {16, 32, 64};
  int classes = 4;
  GateKind gate = GateKind::kSigmoid;
  BlockKind block = BlockKind::kMru;
  int depth = 2;

  std::vector<MRUConfig> blocks() const;
};

ParamSet<float> init_classifier(const ClassifierConfig& c, std::uint64_t seed);
std::size_t classifier_param_count(const ClassifierConfig& c);
/// Photo (N, 3, R, R) in [-1, 1] -> class logits (N, K, 1, 1).
template <typename T>
Var<T> classifier_forward(Var<T> photo, Bound<T>& params, const ClassifierConfig& c);

#define SKETCHYGAN_DECLARE_NETWORKS(T)                                                        \
  extern template std::vector<Var<T>> make_pyramid(Var<T>, int);                             \
  extern template Var<T> generator_forward(std::span<const Var<T>>, Var<T>,                  \
                                           std::span<const int>, Bound<T>&,                  \
                                           const GeneratorConfig&);                          \
  extern template DiscriminatorOutput<T> discriminator_forward(                              \
      Var<T>, Bound<T>&, const DiscriminatorConfig&, const Var<T>*);                         \
  extern template Var<T> classifier_forward(Var<T>, Bound<T>&, const ClassifierConfig&);

SKETCHYGAN_DECLARE_NETWORKS(float)
SKETCHYGAN_DECLARE_NETWORKS(double)
SKETCHYGAN_DECLARE_NETWORKS(Dual<float>)
SKETCHYGAN_DECLARE_NETWORKS(Dual<double>)
#undef SKETCHYGAN_DECLARE_NETWORKS

}  // namespace sketchygan
