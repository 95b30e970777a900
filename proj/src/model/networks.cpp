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

#include "sketchygan/model/networks.hpp"

#include <stdexcept>
#include <string>

namespace sketchygan {
namespace {

constexpr int kFieldChannels = 1;
constexpr int kRgbChannels = 3;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

void check_schedule(const std::vector<int>& channels, int resolution, const char* who) {
  if (channels.empty()) fail(std::string(who) + ": channel schedule is empty");
  for (int c : channels) {
    if (c <= 0) fail(std::string(who) + ": channel counts must be positive");
  }
  const int levels = static_cast<int>(channels.size());
  if (resolution <= 0 || levels > 30 || resolution % (1 << levels) != 0) {
    fail(std::string(who) + ": resolution " + std::to_string(resolution) +
         " is not divisible by 2^" + std::to_string(levels));
  }
}

void add_dense(ParamSet<float>& p, const std::string& name, int fout, int fin,
               std::mt19937_64& rng) {
  p.add(name + "/kernel", fan_in_uniform<float>(Shape{fout, fin, 1, 1}, fin, 1.0, rng));
  p.add(name + "/bias", TensorF(Shape{1, fout, 1, 1}));
}

std::string block_prefix(const char* stem, std::size_t i) {
  return std::string(stem) + "/" + std::to_string(i) + "/";
}

std::vector<MRUConfig> downsampling_blocks(const std::vector<int>& channels, int first_in,
                                           int image_channels, GateKind gate, BlockKind kind,
                                           int depth, NormKind norm, int norm_classes) {
  std::vector<MRUConfig> out;
  int in = first_in;
  for (int ch : channels) {
    MRUConfig b;
    b.in_channels = in;
    b.out_channels = ch;
    b.image_channels = image_channels;
    b.stride = 2;
    b.gate = gate;
    b.kind = kind;
    b.depth = depth;
    b.norm = norm;
    b.norm_classes = norm_classes;
    out.push_back(b);
    in = ch;
  }
  return out;
}

void check_labels(std::span<const int> labels, int n, int classes, const char* who) {
  if (static_cast<int>(labels.size()) != n) {
    fail(std::string(who) + ": " + std::to_string(labels.size()) + " labels for batch of " +
         std::to_string(n));
  }
  for (int l : labels) {
    if (l < 0 || l >= classes) {
      fail(std::string(who) + ": label " + std::to_string(l) + " out of range [0, " +
           std::to_string(classes) + ")");
    }
  }
}

}  // namespace

std::vector<MRUConfig> GeneratorConfig::encoder_blocks() const {
  return downsampling_blocks(channels, kFieldChannels, kFieldChannels, gate, block, depth,
                             conditional ? NormKind::kConditional : NormKind::kInstance,
                             conditional ? classes : 1);
}

/*
 * Decoder block j runs at the resolution of encoder level L-1-j. Its input is
 * the upsampled previous output (the bottleneck plus noise for j = 0) and,
 * with skips, the encoder output of the same resolution. Its output width
 * mirrors the encoder: channels[L-2-j], and channels[0] for the last block.
 */
std::vector<MRUConfig> GeneratorConfig::decoder_blocks() const {
  const int L = levels();
  std::vector<MRUConfig> out;
  int in = channels.back() + noise_dim;
  for (int j = 0; j < L; ++j) {
    const int skip = (skips && j < L - 1) ? channels[L - 2 - j] : 0;
    MRUConfig b;
    b.in_channels = in + skip;
    b.out_channels = j < L - 1 ? channels[L - 2 - j] : channels[0];
    b.image_channels = kFieldChannels;
    b.stride = 1;
    b.gate = gate;
    b.kind = block;
    b.depth = depth;
    b.norm = conditional ? NormKind::kConditional : NormKind::kInstance;
    b.norm_classes = conditional ? classes : 1;
    out.push_back(b);
    in = b.out_channels;
  }
  return out;
}

std::vector<MRUConfig> DiscriminatorConfig::blocks() const {
  const int image = kRgbChannels + (sketch_conditioned ? kFieldChannels : 0);
  return downsampling_blocks(channels, kRgbChannels, image, gate, BlockKind::kMru, depth,
                             NormKind::kInstance, 1);
}

std::vector<MRUConfig> ClassifierConfig::blocks() const {
  return downsampling_blocks(channels, kRgbChannels, kRgbChannels, gate, block, depth,
                             NormKind::kInstance, 1);
}

void validate(const GeneratorConfig& c) {
  check_schedule(c.channels, c.resolution, "generator");
  if (c.noise_dim < 0) fail("generator: noise_dim must be >= 0");
  if (c.classes < 1) fail("generator: classes must be >= 1");
  if (c.depth < 1) fail("generator: depth must be >= 1");
}

void validate(const DiscriminatorConfig& c) {
  check_schedule(c.channels, c.resolution, "discriminator");
  if (c.classes < 1) fail("discriminator: classes must be >= 1");
  if (c.depth < 1) fail("discriminator: depth must be >= 1");
}

ParamSet<float> init_generator(const GeneratorConfig& c, std::uint64_t seed) {
  validate(c);
  std::mt19937_64 rng(seed);
  ParamSet<float> p;
  const auto enc = c.encoder_blocks();
  for (std::size_t i = 0; i < enc.size(); ++i) init_mru_params(p, block_prefix("enc", i), enc[i], rng);
  const auto dec = c.decoder_blocks();
  for (std::size_t j = 0; j < dec.size(); ++j) init_mru_params(p, block_prefix("dec", j), dec[j], rng);
  p.add("out/kernel", fan_in_uniform<float>(Shape{kRgbChannels, c.channels[0], 1, 1},
                                            c.channels[0], 1.0, rng));
  p.add("out/bias", TensorF(Shape{1, kRgbChannels, 1, 1}));
  return p;
}

ParamSet<float> init_discriminator(const DiscriminatorConfig& c, std::uint64_t seed) {
  validate(c);
  std::mt19937_64 rng(seed);
  ParamSet<float> p;
  const auto blocks = c.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i) init_mru_params(p, block_prefix("mru", i), blocks[i], rng);
  add_dense(p, "gan", 1, c.channels.back(), rng);
  add_dense(p, "cls", c.classes, c.channels.back(), rng);
  return p;
}

ParamSet<float> init_classifier(const ClassifierConfig& c, std::uint64_t seed) {
  check_schedule(c.channels, c.resolution, "classifier");
  std::mt19937_64 rng(seed);
  ParamSet<float> p;
  const auto blocks = c.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i) init_mru_params(p, block_prefix("mru", i), blocks[i], rng);
  add_dense(p, "cls", c.classes, c.channels.back(), rng);
  return p;
}

std::size_t generator_param_count(const GeneratorConfig& c) {
  validate(c);
  std::size_t total = 0;
  for (const auto& b : c.encoder_blocks()) total += mru_param_count(b);
  for (const auto& b : c.decoder_blocks()) total += mru_param_count(b);
  return total + static_cast<std::size_t>(kRgbChannels) * c.channels[0] + kRgbChannels;
}

std::size_t discriminator_param_count(const DiscriminatorConfig& c) {
  validate(c);
  std::size_t total = 0;
  for (const auto& b : c.blocks()) total += mru_param_count(b);
  const std::size_t f = c.channels.back();
  return total + (f + 1) + (f + 1) * c.classes;
}

std::size_t classifier_param_count(const ClassifierConfig& c) {
  check_schedule(c.channels, c.resolution, "classifier");
  std::size_t total = 0;
  for (const auto& b : c.blocks()) total += mru_param_count(b);
  return total + (static_cast<std::size_t>(c.channels.back()) + 1) * c.classes;
}

template <typename T>
std::vector<Var<T>> make_pyramid(Var<T> field, int levels) {
  if (levels < 1) fail("make_pyramid: levels must be >= 1");
  const Shape s = field.shape();
  const int f = 1 << (levels - 1);
  if (s.h % f != 0 || s.w % f != 0) {
    fail("make_pyramid: extent " + s.str() + " not divisible by 2^" + std::to_string(levels - 1));
  }
  std::vector<Var<T>> out{field};
  for (int i = 1; i < levels; ++i) out.push_back(downsample_avg(out.back(), 2));
  return out;
}

template <typename T>
Var<T> generator_forward(std::span<const Var<T>> pyramid, Var<T> noise,
                         std::span<const int> labels, Bound<T>& p, const GeneratorConfig& c) {
  validate(c);
  const int L = c.levels();
  if (static_cast<int>(pyramid.size()) < L) {
    fail("generator: pyramid has " + std::to_string(pyramid.size()) + " levels, need " +
         std::to_string(L));
  }
  const Shape s0 = pyramid[0].shape();
  if (s0.c != kFieldChannels || s0.h != c.resolution || s0.w != c.resolution) {
    fail("generator: expected sketch (N, 1, " + std::to_string(c.resolution) + ", " +
         std::to_string(c.resolution) + "), got " + s0.str());
  }
  const Shape ns = noise.shape();
  if (ns.n != s0.n || ns.c != c.noise_dim || ns.h != 1 || ns.w != 1) {
    fail("generator: expected noise (" + std::to_string(s0.n) + ", " + std::to_string(c.noise_dim) +
         ", 1, 1), got " + ns.str());
  }
  check_labels(labels, s0.n, c.classes, "generator");

  const auto enc = c.encoder_blocks();
  const auto dec = c.decoder_blocks();
  std::vector<Var<T>> skips;
  Var<T> h = pyramid[0];
  for (int i = 0; i < L; ++i) {
    h = mru_forward(h, pyramid[i], p, block_prefix("enc", i), enc[i], labels).y;
    skips.push_back(h);
  }
  const Shape bs = h.shape();
  if (c.noise_dim > 0) h = concat_channels(h, broadcast_spatial(noise, bs.h, bs.w));
  for (int j = 0; j < L; ++j) {
    h = upsample_nearest(h, 2);
    if (c.skips && j < L - 1) h = concat_channels(h, skips[L - 2 - j]);
    h = mru_forward(h, pyramid[L - 1 - j], p, block_prefix("dec", j), dec[j], labels).y;
  }
  return tanh(conv2d(h, p("out/kernel"), p("out/bias"), 1, 0));
}

template <typename T>
DiscriminatorOutput<T> discriminator_forward(Var<T> image, Bound<T>& p,
                                             const DiscriminatorConfig& c, const Var<T>* sketch) {
  validate(c);
  const Shape s = image.shape();
  if (s.c != kRgbChannels || s.h != c.resolution || s.w != c.resolution) {
    fail("discriminator: expected image (N, 3, " + std::to_string(c.resolution) + ", " +
         std::to_string(c.resolution) + "), got " + s.str());
  }
  const int L = static_cast<int>(c.channels.size());
  std::vector<Var<T>> cond = make_pyramid(image, L);
  if (c.sketch_conditioned) {
    if (sketch == nullptr) fail("discriminator: sketch-conditioned variant needs a sketch");
    const Shape ks = sketch->shape();
    if (ks.n != s.n || ks.c != kFieldChannels || ks.h != s.h || ks.w != s.w) {
      fail("discriminator: sketch " + ks.str() + " does not match image " + s.str());
    }
    const std::vector<Var<T>> sk = make_pyramid(*sketch, L);
    for (int i = 0; i < L; ++i) cond[i] = concat_channels(cond[i], sk[i]);
  }
  const std::vector<int> zeros(static_cast<std::size_t>(s.n), 0);
  const auto blocks = c.blocks();
  const Var<T> h = global_avg_pool(
      mru_stack(image, std::span<const Var<T>>(cond), p, "mru/", std::span<const MRUConfig>(blocks),
                std::span<const int>(zeros)));
  return {dense(h, p("gan/kernel"), p("gan/bias")), dense(h, p("cls/kernel"), p("cls/bias"))};
}

template <typename T>
Var<T> classifier_forward(Var<T> photo, Bound<T>& p, const ClassifierConfig& c) {
  const Shape s = photo.shape();
  if (s.c != kRgbChannels || s.h != c.resolution || s.w != c.resolution) {
    fail("classifier: expected photo (N, 3, " + std::to_string(c.resolution) + ", " +
         std::to_string(c.resolution) + "), got " + s.str());
  }
  const auto blocks = c.blocks();
  const std::vector<Var<T>> pyr = make_pyramid(photo, static_cast<int>(blocks.size()));
  const std::vector<int> zeros(static_cast<std::size_t>(s.n), 0);
  const Var<T> h = global_avg_pool(mru_stack(photo, std::span<const Var<T>>(pyr), p, "mru/",
                                             std::span<const MRUConfig>(blocks),
                                             std::span<const int>(zeros)));
  return dense(h, p("cls/kernel"), p("cls/bias"));
}

#define SKETCHYGAN_INSTANTIATE_NETWORKS(T)                                                     \
  template std::vector<Var<T>> make_pyramid(Var<T>, int);                                     \
  template Var<T> generator_forward(std::span<const Var<T>>, Var<T>, std::span<const int>,    \
                                    Bound<T>&, const GeneratorConfig&);                       \
  template DiscriminatorOutput<T> discriminator_forward(Var<T>, Bound<T>&,                    \
                                                        const DiscriminatorConfig&,           \
                                                        const Var<T>*);                       \
  template Var<T> classifier_forward(Var<T>, Bound<T>&, const ClassifierConfig&);

SKETCHYGAN_INSTANTIATE_NETWORKS(float)
SKETCHYGAN_INSTANTIATE_NETWORKS(double)
SKETCHYGAN_INSTANTIATE_NETWORKS(Dual<float>)
SKETCHYGAN_INSTANTIATE_NETWORKS(Dual<double>)
#undef SKETCHYGAN_INSTANTIATE_NETWORKS

}  // namespace sketchygan
