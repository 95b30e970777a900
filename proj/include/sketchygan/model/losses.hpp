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
#include <functional>
#include <random>
#include <span>
#include <string>

#include "sketchygan/model/networks.hpp"

namespace sketchygan {

/// Term switches; a disabled term contributes exactly 0 to its total.
struct LossSwitches {
  bool gan = true;
  bool ac = true;
  bool l1 = true;
  bool perceptual = true;
  bool diversity = true;
  bool dragan = true;
};

struct LossWeights {
  double lambda_p = 1.0;
  double lambda_div = 10.0;
  double lambda_gp = 10.0;
  double focal_gamma = 2.0;
  double perturb_scale = 0.5;
  /// Magnitude cap on mean |G(x, z1) - G(x, z2)| before weighting.
  double diversity_cap = 0.1;
  LossSwitches enable;
};

void validate(const LossWeights& w);

/// mean softplus(-real) + mean softplus(fake): -log D(y) - log(1 - D(G(x, z))) on logits.
template <typename T>
Var<T> gan_loss_d(Var<T> real_logits, Var<T> fake_logits);
/// Non-saturating generator loss: mean softplus(-fake) = -log D(G(x, z)).
template <typename T>
Var<T> gan_loss_g(Var<T> fake_logits);

template <typename T>
Var<T> focal_ac_loss(Var<T> class_logits, std::span<const int> labels, double gamma);

template <typename T>
Var<T> l1_supervision(Var<T> generated, Var<T> target);

/*
 * Frozen feature network for the perceptual term: four stride-2 3x3
 * convolutions (3 -> 16 -> 32 -> 64 -> 64) with LeakyReLU 0.2, He-uniform
 * weights drawn from a fixed seed. Parameters never receive updates.
 */
class FeatureExtractor {
 public:
  explicit FeatureExtractor(std::uint64_t seed = 0x5eed);

  static constexpr int kLayers = 4;
  const ParamSet<float>& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }

  /// Tapped activations at 1/2, 1/4, 1/8 and 1/16 of the input resolution.
  template <typename T>
  std::vector<Var<T>> features(Var<T> image) const;

 private:
  std::uint64_t seed_;
  ParamSet<float> params_;
};

/// lambda_p * sum over the tapped layers of mean |phi_i(generated) - phi_i(target)|.
template <typename T>
Var<T> perceptual_loss(Var<T> generated, Var<T> target, const FeatureExtractor& extractor,
                       double lambda_p);

/// -lambda_div * min(mean |g1 - g2|, cap).
template <typename T>
Var<T> diversity_loss(Var<T> g1, Var<T> g2, double lambda_div, double cap);

/*
 * The GAN logit of a discriminator as a function of its input, in primal and
 * dual arithmetic. The penalty needs both: the primal pass gives the input
 * gradient, the dual pass differentiates that gradient w.r.t. the parameters.
 */
template <typename T>
struct Critic {
  std::function<Var<T>(Var<T>, Bound<T>&)> primal;
  std::function<Var<Dual<T>>(Var<Dual<T>>, Bound<Dual<T>>&)> dual;
};

/// The MRU discriminator's GAN head (sketch is required for the sketch-conditioned variant).
template <typename T>
Critic<T> discriminator_critic(const DiscriminatorConfig& c, const Tensor<T>* sketch = nullptr);

/// real + perturb_scale * std(real) * u with u ~ U[-1, 1] per element.
template <typename T>
Tensor<T> dragan_points(const Tensor<T>& real, double perturb_scale, std::mt19937_64& rng);

/*
 * lambda_gp * mean_i (||grad_x D(x_i)||_2 - 1)^2 at the given points. The
 * returned scalar is a tape node whose backward delivers the exact parameter
 * gradient (a mixed second derivative, obtained by forward-over-reverse).
 */
template <typename T>
Var<T> dragan_penalty_at(const Critic<T>& critic, Bound<T>& params, const Tensor<T>& points,
                         double lambda_gp);

template <typename T>
Var<T> dragan_penalty(const Critic<T>& critic, Bound<T>& params, const Tensor<T>& real,
                      double lambda_gp, double perturb_scale, std::mt19937_64& rng);

/// Components already carry their weights; invalid handles count as disabled.
template <typename T>
struct DLossTerms {
  Var<T> gan;
  Var<T> ac;
  Var<T> dragan;
};

template <typename T>
struct GLossTerms {
  Var<T> gan;
  Var<T> ac;
  Var<T> l1;
  Var<T> perceptual;
  Var<T> diversity;
};

/// GAN_D + AC + DRAGAN over the enabled terms.
template <typename T>
Var<T> total_d(Tape<T>& tape, const DLossTerms<T>& terms, const LossSwitches& enable);
/// GAN_G + AC(fakes) + L1 + perceptual + diversity over the enabled terms.
template <typename T>
Var<T> total_g(Tape<T>& tape, const GLossTerms<T>& terms, const LossSwitches& enable);

#define SKETCHYGAN_DECLARE_LOSSES(T)                                                           \
  extern template Var<T> gan_loss_d(Var<T>, Var<T>);                                          \
  extern template Var<T> gan_loss_g(Var<T>);                                                  \
  extern template Var<T> focal_ac_loss(Var<T>, std::span<const int>, double);                 \
  extern template Var<T> l1_supervision(Var<T>, Var<T>);                                      \
  extern template std::vector<Var<T>> FeatureExtractor::features(Var<T>) const;               \
  extern template Var<T> perceptual_loss(Var<T>, Var<T>, const FeatureExtractor&, double);    \
  extern template Var<T> diversity_loss(Var<T>, Var<T>, double, double);                      \
  extern template Var<T> total_d(Tape<T>&, const DLossTerms<T>&, const LossSwitches&);        \
  extern template Var<T> total_g(Tape<T>&, const GLossTerms<T>&, const LossSwitches&);

SKETCHYGAN_DECLARE_LOSSES(float)
SKETCHYGAN_DECLARE_LOSSES(double)
#undef SKETCHYGAN_DECLARE_LOSSES

#define SKETCHYGAN_DECLARE_PENALTY(T)                                                          \
  extern template Critic<T> discriminator_critic(const DiscriminatorConfig&, const Tensor<T>*); \
  extern template Tensor<T> dragan_points(const Tensor<T>&, double, std::mt19937_64&);        \
  extern template Var<T> dragan_penalty_at(const Critic<T>&, Bound<T>&, const Tensor<T>&,     \
                                           double);                                           \
  extern template Var<T> dragan_penalty(const Critic<T>&, Bound<T>&, const Tensor<T>&, double, \
                                        double, std::mt19937_64&);

SKETCHYGAN_DECLARE_PENALTY(float)
SKETCHYGAN_DECLARE_PENALTY(double)
#undef SKETCHYGAN_DECLARE_PENALTY

}  // namespace sketchygan
