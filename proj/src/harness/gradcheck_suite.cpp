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

#include "sketchygan/harness/gradcheck_suite.hpp"

#include <random>

#include "sketchygan/core/grad_check.hpp"
#include "sketchygan/model/losses.hpp"

namespace sketchygan {
namespace {

TensorD uniform(Shape s, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  TensorD t(s);
  for (auto& v : t.values()) v = dist(rng);
  return t;
}

/// Scalar with a distinct random weight per coordinate.
Var<double> project(Tape<double>& tape, Var<double> y, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sum(mul(y, tape.constant(uniform(y.shape(), rng))));
}

std::vector<TensorD> with_params(std::vector<TensorD> leading, const ParamSet<double>& p) {
  for (std::size_t i = 0; i < p.size(); ++i) leading.push_back(p.tensor(i));
  return leading;
}

void bind_leaves(Bound<double>& b, const ParamSet<double>& p, std::span<const Var<double>> leaves, std::size_t offset) {
  for (std::size_t i = 0; i < p.size(); ++i) b.bind(p.name(i), leaves[offset + i]);
}

class Suite {
 public:
  explicit Suite(int draws) : draws_(draws) {}

  void check(const std::string& name, const GradCheckFn& fn, const std::vector<TensorD>& inputs,
             std::uint64_t seed, std::size_t max_coords = 0) {
    GradCheckOptions opt;
    opt.seed = seed;
    opt.max_coords = max_coords;
    const GradCheckReport r = grad_check(fn, inputs, opt);
    GradCheckCase& c = entry(name);
    ++c.draws;
    c.failures += r.passed ? 0 : 1;
    c.worst = std::max(c.worst, r.worst());
    c.probed += r.probed();
    c.skipped += r.skipped();
  }

  int draws() const { return draws_; }
  std::vector<GradCheckCase> results() const { return cases_; }

 private:
  GradCheckCase& entry(const std::string& name) {
    for (auto& c : cases_) {
      if (c.name == name) return c;
    }
    cases_.push_back({name});
    return cases_.back();
  }

  int draws_;
  std::vector<GradCheckCase> cases_;
};

MRUConfig block(GateKind gate, NormKind norm, int in, int out, int stride, BlockKind kind = BlockKind::kMru) {
  MRUConfig c;
  c.in_channels = in;
  c.out_channels = out;
  c.image_channels = 1;
  c.stride = stride;
  c.gate = gate;
  c.norm = norm;
  c.norm_classes = 2;
  c.kind = kind;
  return c;
}

}  // namespace

std::vector<GradCheckCase> run_gradcheck_suite(int draws, std::uint64_t seed) {
  Suite s(draws);
  const std::vector<int> labels2 = {1, 0};
  const std::vector<int> labels3 = {1, 3, 0};

  struct NamedBlock {
    std::string name;
    MRUConfig config;
  };
  const std::vector<NamedBlock> blocks = {
      {"mru sigmoid (conditional norm, stride 2)", block(GateKind::kSigmoid, NormKind::kConditional, 2, 3, 2)},
      {"mru sigmoid (no norm, stride 1)", block(GateKind::kSigmoid, NormKind::kNone, 3, 3, 1)},
      {"mru leakyrelu (conditional norm, stride 2)", block(GateKind::kLeakyNormalized, NormKind::kConditional, 2, 3, 2)},
      {"mru leakyrelu (no norm, stride 1)", block(GateKind::kLeakyNormalized, NormKind::kNone, 3, 3, 1)},
      {"residual block (instance norm)", block(GateKind::kSigmoid, NormKind::kInstance, 2, 3, 1, BlockKind::kResidual)},
  };

  GeneratorConfig gc;
  gc.resolution = 8;
  gc.channels = {2, 3};
  gc.noise_dim = 2;
  gc.classes = 2;
  DiscriminatorConfig dc;
  dc.resolution = 8;
  dc.channels = {2, 3};
  dc.classes = 2;
  const FeatureExtractor phi(seed + 17);
  const auto critic = discriminator_critic<double>(dc);

  for (int draw = 0; draw < draws; ++draw) {
    const std::uint64_t base = seed * 7919 + static_cast<std::uint64_t>(draw) * 104729;
    std::mt19937_64 rng(base);

    s.check("conv2d (3x3, stride 1, bias)",
            [](Tape<double>&, std::span<const Var<double>> v) {
              return sum(mul(conv2d(v[0], v[1], v[2], 1, 1), conv2d(v[0], v[1], v[2], 1, 1)));
            },
            {uniform(Shape{2, 2, 5, 5}, rng), uniform(Shape{3, 2, 3, 3}, rng), uniform(Shape{1, 3, 1, 1}, rng)},
            base + 1);
    s.check("conv2d (3x3, stride 2)",
            [&](Tape<double>& t, std::span<const Var<double>> v) { return project(t, conv2d(v[0], v[1], 2, 1), base + 2); },
            {uniform(Shape{2, 2, 6, 6}, rng), uniform(Shape{3, 2, 3, 3}, rng)}, base + 2);
    s.check("cond_instance_norm",
            [&](Tape<double>& t, std::span<const Var<double>> v) {
              return project(t, cond_instance_norm(v[0], labels2, v[1], v[2], 1e-5), base + 3);
            },
            {uniform(Shape{2, 3, 4, 4}, rng), uniform(Shape{2, 3, 1, 1}, rng, 0.5, 1.5), uniform(Shape{2, 3, 1, 1}, rng)},
            base + 3);

    for (const auto& nb : blocks) {
      std::mt19937_64 init(base + 4);
      ParamSet<float> pf;
      init_mru_params(pf, "b/", nb.config, init);
      const ParamSet<double> p = pf.cast<double>();
      s.check(nb.name,
              [&](Tape<double>& t, std::span<const Var<double>> v) {
                Bound<double> b(t, p, true);
                bind_leaves(b, p, v, 2);
                return project(t, mru_forward(v[0], v[1], b, "b/", nb.config, labels2).y, base + 5);
              },
              with_params({uniform(Shape{2, nb.config.in_channels, 4, 4}, rng), uniform(Shape{2, 1, 4, 4}, rng)}, p),
              base + 5, 24);
    }

    for (GateKind gate : {GateKind::kSigmoid, GateKind::kLeakyNormalized}) {
      GeneratorConfig g = gc;
      g.gate = gate;
      DiscriminatorConfig d = dc;
      d.gate = gate;
      const ParamSet<double> gp = init_generator(g, base + 6).cast<double>();
      s.check("generator_forward (" + to_string(gate) + ")",
              [&](Tape<double>& t, std::span<const Var<double>> v) {
                Bound<double> b(t, gp, true);
                bind_leaves(b, gp, v, 2);
                return project(t, generator_forward<double>(make_pyramid(v[0], 2), v[1], labels2, b, g), base + 7);
              },
              with_params({uniform(Shape{2, 1, 8, 8}, rng, 0.0, 1.0), uniform(Shape{2, 2, 1, 1}, rng)}, gp),
              base + 7, 6);
      const ParamSet<double> dp = init_discriminator(d, base + 8).cast<double>();
      s.check("discriminator_forward (" + to_string(gate) + ")",
              [&](Tape<double>& t, std::span<const Var<double>> v) {
                Bound<double> b(t, dp, true);
                bind_leaves(b, dp, v, 1);
                const auto o = discriminator_forward<double>(v[0], b, d);
                return add(project(t, o.gan_logit, base + 9), project(t, o.class_logits, base + 10));
              },
              with_params({uniform(Shape{2, 3, 8, 8}, rng)}, dp), base + 9, 6);
    }

    s.check("gan_loss_d", [](Tape<double>&, std::span<const Var<double>> v) { return gan_loss_d(v[0], v[1]); },
            {uniform(Shape{3, 1, 1, 1}, rng, -3, 3), uniform(Shape{3, 1, 1, 1}, rng, -3, 3)}, base + 11);
    s.check("gan_loss_g", [](Tape<double>&, std::span<const Var<double>> v) { return gan_loss_g(v[0]); },
            {uniform(Shape{3, 1, 1, 1}, rng, -3, 3)}, base + 12);
    s.check("focal_ac_loss",
            [&](Tape<double>&, std::span<const Var<double>> v) { return focal_ac_loss(v[0], labels3, 2.0); },
            {uniform(Shape{3, 4, 1, 1}, rng, -3, 3)}, base + 13);
    s.check("l1_supervision", [](Tape<double>&, std::span<const Var<double>> v) { return l1_supervision(v[0], v[1]); },
            {uniform(Shape{2, 3, 4, 4}, rng), uniform(Shape{2, 3, 4, 4}, rng)}, base + 14);
    s.check("perceptual_loss",
            [&](Tape<double>&, std::span<const Var<double>> v) { return perceptual_loss(v[0], v[1], phi, 1.0); },
            {uniform(Shape{1, 3, 16, 16}, rng), uniform(Shape{1, 3, 16, 16}, rng)}, base + 15, 40);
    s.check("diversity_loss",
            [](Tape<double>&, std::span<const Var<double>> v) { return diversity_loss(v[0], v[1], 10.0, 5.0); },
            {uniform(Shape{2, 3, 4, 4}, rng), uniform(Shape{2, 3, 4, 4}, rng)}, base + 16);
    const ParamSet<double> dp = init_discriminator(dc, base + 17).cast<double>();
    const TensorD points = uniform(Shape{2, 3, 8, 8}, rng);
    s.check("dragan_penalty",
            [&](Tape<double>& t, std::span<const Var<double>> v) {
              Bound<double> b(t, dp, true);
              bind_leaves(b, dp, v, 0);
              return dragan_penalty_at(critic, b, points, 10.0);
            },
            with_params({}, dp), base + 18, 6);
    LossSwitches all;
    s.check("total_d / total_g",
            [&](Tape<double>& t, std::span<const Var<double>> v) {
              const DLossTerms<double> d{gan_loss_d(v[0], v[1]), focal_ac_loss(v[2], labels3, 2.0),
                                         mul(sum(v[0]), sum(v[0]))};
              const GLossTerms<double> g{gan_loss_g(v[1]), focal_ac_loss(v[2], labels3, 0.0), l1_supervision(v[0], v[1]),
                                         sum(mul(v[1], v[1])), diversity_loss(v[0], v[1], 1.0, 5.0)};
              return add(total_d(t, d, all), total_g(t, g, all));
            },
            {uniform(Shape{3, 1, 1, 1}, rng, -3, 3), uniform(Shape{3, 1, 1, 1}, rng, -3, 3),
             uniform(Shape{3, 4, 1, 1}, rng, -3, 3)},
            base + 19);
  }
  return s.results();
}

}  // namespace sketchygan
