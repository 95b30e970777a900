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


#include "sketchygan/model/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sketchygan {
namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

template <typename T>
Var<T> zero(Tape<T>& tape) {
  return tape.constant(Tensor<T>(Shape{1, 1, 1, 1}));
}

template <typename T>
Var<T> accumulate_term(Var<T> total, const Var<T>& term, bool enabled, const char* name) {
  if (!enabled) return total;
  if (!term.valid()) fail(std::string("loss total: enabled term '") + name + "' was not computed");
  if (term.value().size() != 1) fail(std::string("loss total: term '") + name + "' is not a scalar");
  return add(total, term);
}

constexpr int kExtractorChannels[FeatureExtractor::kLayers + 1] = {3, 16, 32, 64, 64};

}  // namespace

void validate(const LossWeights& w) {
  const auto ok = [](double v) { return std::isfinite(v) && v >= 0; };
  if (!ok(w.lambda_p) || !ok(w.lambda_div) || !ok(w.lambda_gp)) fail("loss weights must be finite and >= 0");
  if (!ok(w.focal_gamma)) fail("focal gamma must be finite and >= 0");
  if (!ok(w.perturb_scale)) fail("perturb scale must be finite and >= 0");
  if (!ok(w.diversity_cap) || w.diversity_cap == 0) fail("diversity cap must be finite and > 0");
}

template <typename T>
Var<T> gan_loss_d(Var<T> real_logits, Var<T> fake_logits) {
  return add(mean(softplus(-real_logits)), mean(softplus(fake_logits)));
}

template <typename T>
Var<T> gan_loss_g(Var<T> fake_logits) {
  return mean(softplus(-fake_logits));
}

template <typename T>
Var<T> focal_ac_loss(Var<T> class_logits, std::span<const int> labels, double gamma) {
  return focal_loss(class_logits, labels, gamma);
}

template <typename T>
Var<T> l1_supervision(Var<T> generated, Var<T> target) {
  return mean_abs_diff(generated, target);
}

FeatureExtractor::FeatureExtractor(std::uint64_t seed) : seed_(seed) {
  std::mt19937_64 rng(seed);
  const double gain = std::sqrt(2.0 / (1.0 + 0.2 * 0.2));
  for (int i = 0; i < kLayers; ++i) {
    const int cin = kExtractorChannels[i];
    const int cout = kExtractorChannels[i + 1];
    const std::string name = "phi" + std::to_string(i);
    params_.add(name + "/kernel",
                fan_in_uniform<float>(Shape{cout, cin, 3, 3}, cin * 9, gain, rng));
    params_.add(name + "/bias", TensorF(Shape{1, cout, 1, 1}));
  }
}

template <typename T>
std::vector<Var<T>> FeatureExtractor::features(Var<T> image) const {
  Tape<T>& tape = image.tape();
  std::vector<Var<T>> out;
  Var<T> h = image;
  for (int i = 0; i < kLayers; ++i) {
    const std::string name = "phi" + std::to_string(i);
    auto k = tape.constant(params_.at(name + "/kernel").template cast<T>());
    auto b = tape.constant(params_.at(name + "/bias").template cast<T>());
    h = leaky_relu(conv2d(h, k, b, 2, 1), 0.2);
    out.push_back(h);
  }
  return out;
}

template <typename T>
Var<T> perceptual_loss(Var<T> generated, Var<T> target, const FeatureExtractor& extractor,
                       double lambda_p) {
  if (generated.shape() != target.shape()) {
    fail("perceptual_loss: shape mismatch " + generated.shape().str() + " vs " +
         target.shape().str());
  }
  if (lambda_p == 0.0) return zero(generated.tape());
  const auto fg = extractor.features(generated);
  const auto ft = extractor.features(target);
  Var<T> total = mean_abs_diff(fg[0], ft[0]);
  for (int i = 1; i < FeatureExtractor::kLayers; ++i) total = add(total, mean_abs_diff(fg[i], ft[i]));
  return total * lambda_p;
}

template <typename T>
Var<T> diversity_loss(Var<T> g1, Var<T> g2, double lambda_div, double cap) {
  if (cap <= 0) fail("diversity_loss: cap must be > 0");
  return clamp_max(mean_abs_diff(g1, g2), cap) * (-lambda_div);
}

template <typename T>
Critic<T> discriminator_critic(const DiscriminatorConfig& c, const Tensor<T>* sketch) {
  if (c.sketch_conditioned && sketch == nullptr) {
    fail("discriminator_critic: sketch-conditioned variant needs a sketch");
  }
  Critic<T> critic;
  const Tensor<T> sk = sketch ? *sketch : Tensor<T>();
  critic.primal = [c, sk](Var<T> x, Bound<T>& p) {
    if (!c.sketch_conditioned) return discriminator_forward(x, p, c).gan_logit;
    const Var<T> s = x.tape().constant(sk);
    return discriminator_forward(x, p, c, &s).gan_logit;
  };
  critic.dual = [c, sk](Var<Dual<T>> x, Bound<Dual<T>>& p) {
    if (!c.sketch_conditioned) return discriminator_forward(x, p, c).gan_logit;
    const Var<Dual<T>> s = x.tape().constant(sk.template cast<Dual<T>>());
    return discriminator_forward(x, p, c, &s).gan_logit;
  };
  return critic;
}

template <typename T>
Tensor<T> dragan_points(const Tensor<T>& real, double perturb_scale, std::mt19937_64& rng) {
  const std::size_t n = real.size();
  if (n == 0) fail("dragan_points: empty batch");
  double mu = 0.0;
  for (std::size_t i = 0; i < n; ++i) mu += real[i];
  mu /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += (real[i] - mu) * (real[i] - mu);
  const double sigma = std::sqrt(var / static_cast<double>(n));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor<T> out = real;
  for (std::size_t i = 0; i < n; ++i) out[i] += static_cast<T>(perturb_scale * sigma * u(rng));
  return out;
}

/*
 * With g_i = grad_x D(x_i) and P = lambda/N sum_i (|g_i| - 1)^2,
 *   dP/dtheta = sum_i c_i g_i . d g_i / dtheta,  c_i = 2 lambda/N (|g_i| - 1)/|g_i|,
 * which is the parameter derivative of the directional derivative of sum D
 * along v = c * g. Seeding the input with tangent v and running reverse mode
 * in dual numbers yields it as the tangent of the parameter gradients.
 */
template <typename T>
Var<T> dragan_penalty_at(const Critic<T>& critic, Bound<T>& params, const Tensor<T>& points,
                         double lambda_gp) {
  Tape<T>& outer = params.tape();
  if (lambda_gp < 0) fail("dragan_penalty: coefficient must be >= 0");
  if (lambda_gp == 0.0) return zero(outer);
  const Shape s = points.shape();

  // Current parameter values as seen through the bound leaves.
  ParamSet<T> current;
  std::vector<Var<T>> leaves;
  const ParamSet<T>& layout = params.params();
  for (std::size_t i = 0; i < layout.size(); ++i) {
    leaves.push_back(params(layout.name(i)));
    current.add(layout.name(i), leaves.back().value());
  }

  Tensor<T> g;
  {
    Tape<T> tape;
    Bound<T> b(tape, current, false);
    Var<T> x = tape.variable(points);
    Var<T> out = critic.primal(x, b);
    if (out.shape() != Shape{s.n, 1, 1, 1}) {
      fail("dragan_penalty: critic must return (N, 1, 1, 1), got " + out.shape().str());
    }
    tape.backward(sum(out));
    g = x.grad();
  }

  const std::size_t per = s.per_sample();
  const double scale = lambda_gp / s.n;
  double penalty = 0.0;
  Tensor<T> v(s);
  for (int n = 0; n < s.n; ++n) {
    double sq = 0.0;
    for (std::size_t i = 0; i < per; ++i) {
      const double gi = g[n * per + i];
      sq += gi * gi;
    }
    const double norm = std::sqrt(sq);
    penalty += (norm - 1.0) * (norm - 1.0);
    const double c = norm > 0.0 ? 2.0 * scale * (norm - 1.0) / norm : 0.0;
    for (std::size_t i = 0; i < per; ++i) v[n * per + i] = static_cast<T>(c * g[n * per + i]);
  }
  penalty *= scale;

  bool any_grad = false;
  for (const Var<T>& leaf : leaves) any_grad = any_grad || leaf.requires_grad();
  std::vector<Tensor<T>> dparams;
  if (any_grad) {
    const ParamSet<Dual<T>> dual_params = current.template cast<Dual<T>>();
    Tape<Dual<T>> tape;
    Bound<Dual<T>> b(tape, dual_params, true);
    Var<Dual<T>> x = tape.constant(make_dual(points, v));
    tape.backward(sum(critic.dual(x, b)));
    const ParamSet<Dual<T>> grads = b.gradients();
    for (std::size_t i = 0; i < grads.size(); ++i) dparams.push_back(tangent_of(grads.tensor(i)));
  }

  std::vector<int> ids;
  for (const Var<T>& leaf : leaves) ids.push_back(leaf.id());
  return outer.record(
      Tensor<T>(Shape{1, 1, 1, 1}, static_cast<T>(penalty)), any_grad,
      [ids, dparams](Tape<T>& t, const Tensor<T>&, const Tensor<T>& grad_out) {
        const T go = grad_out[0];
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (!t.requires_grad(ids[i])) continue;
          Tensor<T> d = dparams[i];
          for (std::size_t j = 0; j < d.size(); ++j) d[j] *= go;
          t.accumulate(ids[i], d);
        }
      });
}

template <typename T>
Var<T> dragan_penalty(const Critic<T>& critic, Bound<T>& params, const Tensor<T>& real,
                      double lambda_gp, double perturb_scale, std::mt19937_64& rng) {
  if (lambda_gp == 0.0) return zero(params.tape());
  return dragan_penalty_at(critic, params, dragan_points(real, perturb_scale, rng), lambda_gp);
}

template <typename T>
Var<T> total_d(Tape<T>& tape, const DLossTerms<T>& terms, const LossSwitches& enable) {
  Var<T> total = zero(tape);
  total = accumulate_term(total, terms.gan, enable.gan, "gan");
  total = accumulate_term(total, terms.ac, enable.ac, "ac");
  total = accumulate_term(total, terms.dragan, enable.dragan, "dragan");
  return total;
}

template <typename T>
Var<T> total_g(Tape<T>& tape, const GLossTerms<T>& terms, const LossSwitches& enable) {
  Var<T> total = zero(tape);
  total = accumulate_term(total, terms.gan, enable.gan, "gan");
  total = accumulate_term(total, terms.ac, enable.ac, "ac");
  total = accumulate_term(total, terms.l1, enable.l1, "l1");
  total = accumulate_term(total, terms.perceptual, enable.perceptual, "perceptual");
  total = accumulate_term(total, terms.diversity, enable.diversity, "diversity");
  return total;
}

#define SKETCHYGAN_INSTANTIATE_LOSSES(T)                                                       \
  template Var<T> gan_loss_d(Var<T>, Var<T>);                                                 \
  template Var<T> gan_loss_g(Var<T>);                                                         \
  template Var<T> focal_ac_loss(Var<T>, std::span<const int>, double);                        \
  template Var<T> l1_supervision(Var<T>, Var<T>);                                             \
  template std::vector<Var<T>> FeatureExtractor::features(Var<T>) const;                      \
  template Var<T> perceptual_loss(Var<T>, Var<T>, const FeatureExtractor&, double);           \
  template Var<T> diversity_loss(Var<T>, Var<T>, double, double);                             \
  template Var<T> total_d(Tape<T>&, const DLossTerms<T>&, const LossSwitches&);               \
  template Var<T> total_g(Tape<T>&, const GLossTerms<T>&, const LossSwitches&);

SKETCHYGAN_INSTANTIATE_LOSSES(float)
SKETCHYGAN_INSTANTIATE_LOSSES(double)
#undef SKETCHYGAN_INSTANTIATE_LOSSES

#define SKETCHYGAN_INSTANTIATE_PENALTY(T)                                                      \
  template Critic<T> discriminator_critic(const DiscriminatorConfig&, const Tensor<T>*);      \
  template Tensor<T> dragan_points(const Tensor<T>&, double, std::mt19937_64&);               \
  template Var<T> dragan_penalty_at(const Critic<T>&, Bound<T>&, const Tensor<T>&, double);   \
  template Var<T> dragan_penalty(const Critic<T>&, Bound<T>&, const Tensor<T>&, double,       \
                                 double, std::mt19937_64&);

SKETCHYGAN_INSTANTIATE_PENALTY(float)
SKETCHYGAN_INSTANTIATE_PENALTY(double)
#undef SKETCHYGAN_INSTANTIATE_PENALTY

}  // namespace sketchygan
