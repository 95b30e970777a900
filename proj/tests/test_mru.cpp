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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sketchygan/core/grad_check.hpp"
#include "sketchygan/model/mru.hpp"
#include "test_util.hpp"

namespace sketchygan {
namespace {

using test::project;
using test::random_tensor;

MRUConfig square_config(GateKind gate, NormKind norm) {
  MRUConfig c;
  c.in_channels = 4;
  c.out_channels = 4;
  c.image_channels = 1;
  c.gate = gate;
  c.norm = norm;
  c.norm_classes = 3;
  return c;
}

ParamSet<float> init_block(const MRUConfig& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParamSet<float> p;
  init_mru_params(p, "b/", c, rng);
  return p;
}

TEST(MRU, ForcedOpenGateIsIdentity) {
  for (GateKind g : {GateKind::kSigmoid, GateKind::kLeakyNormalized}) {
    for (NormKind norm : {NormKind::kNone, NormKind::kInstance, NormKind::kConditional}) {
      const MRUConfig c = square_config(g, norm);
      const ParamSet<float> p = init_block(c, 1);
      Tape<float> tape;
      Bound<float> b(tape, p, true);
      const TensorF x = random_tensor<float>(Shape{2, 4, 6, 6}, 2, 3.0);
      const std::vector<int> labels = {0, 2};
      MRUOverrides ov;
      ov.n = 1.0;
      auto out = mru_forward(tape.constant(x), tape.constant(random_tensor<float>(Shape{2, 1, 6, 6}, 3)),
                             b, "b/", c, labels, ov);
      ASSERT_TRUE(test::bit_identical(out.y.value(), x));
    }
  }
}

TEST(MRU, SaturatedSigmoidBiasIsIdentity) {
  const MRUConfig c = square_config(GateKind::kSigmoid, NormKind::kConditional);
  ParamSet<float> p = init_block(c, 4);
  p.at("b/n/bias").fill(1e4f);
  Tape<float> tape;
  Bound<float> b(tape, p, false);
  const TensorF x = random_tensor<float>(Shape{1, 4, 5, 5}, 5);
  const std::vector<int> labels = {1};
  auto out = mru_forward(tape.constant(x), tape.constant(random_tensor<float>(Shape{1, 1, 5, 5}, 6)), b,
                         "b/", c, labels);
  for (std::size_t i = 0; i < out.n.value().size(); ++i) ASSERT_EQ(out.n.value()[i], 1.0f);
  ASSERT_TRUE(test::bit_identical(out.y.value(), x));
}

TEST(MRU, ForcedClosedGateYieldsCandidate) {
  for (GateKind g : {GateKind::kSigmoid, GateKind::kLeakyNormalized}) {
    MRUConfig c = square_config(g, NormKind::kConditional);
    c.out_channels = 6;
    c.stride = 2;
    const ParamSet<float> p = init_block(c, 7);
    Tape<float> tape;
    Bound<float> b(tape, p, true);
    const std::vector<int> labels = {2, 1};
    MRUOverrides ov;
    ov.n = 0.0;
    auto out = mru_forward(tape.constant(random_tensor<float>(Shape{2, 4, 8, 8}, 8)),
                           tape.constant(random_tensor<float>(Shape{2, 1, 8, 8}, 9)), b, "b/", c,
                           labels, ov);
    ASSERT_EQ(out.y.shape(), (Shape{2, 6, 4, 4}));
    EXPECT_EQ(out.y.value(), out.z.value());
  }
}

TEST(MRU, GatesStayInUnitInterval) {
  for (GateKind g : {GateKind::kSigmoid, GateKind::kLeakyNormalized}) {
    MRUConfig c = square_config(g, NormKind::kInstance);
    c.out_channels = 5;
    for (int draw = 0; draw < 100; ++draw) {
      const ParamSet<double> p = init_block(c, 100 + draw).cast<double>();
      Tape<double> tape;
      Bound<double> b(tape, p, false);
      auto out = mru_forward(tape.constant(random_tensor<double>(Shape{1, 4, 6, 6}, 300 + draw, 2.0)),
                             tape.constant(random_tensor<double>(Shape{1, 1, 6, 6}, 500 + draw)), b,
                             "b/", c, std::vector<int>{0});
      for (const TensorD* t : {&out.m.value(), &out.n.value()}) {
        for (double v : t->values()) {
          if (g == GateKind::kSigmoid) {
            ASSERT_GT(v, 0.0);
            ASSERT_LT(v, 1.0);
          } else {
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 1.0);
          }
        }
      }
    }
  }
}

TEST(MRU, MaskWidths) {
  MRUConfig c = square_config(GateKind::kSigmoid, NormKind::kNone);
  c.out_channels = 7;
  c.stride = 2;
  const ParamSet<float> p = init_block(c, 10);
  EXPECT_EQ(p.at("b/m/kernel").shape(), (Shape{4, 5, 3, 3}));
  EXPECT_EQ(p.at("b/n/kernel").shape(), (Shape{7, 5, 3, 3}));
  EXPECT_EQ(p.at("b/z0/kernel").shape(), (Shape{7, 5, 3, 3}));
  EXPECT_EQ(p.at("b/z1/kernel").shape(), (Shape{7, 7, 3, 3}));
  EXPECT_EQ(p.at("b/proj/kernel").shape(), (Shape{7, 4, 1, 1}));
}

TEST(GateNormalize, Examples) {
  Tape<double> tape;
  auto y = gate_normalize_leakyrelu(tape.constant(TensorD(Shape{1, 1, 1, 3}, {-1.0, 0.0, 3.0})), 0.2);
  EXPECT_DOUBLE_EQ(y.value()[0], 0.0);
  EXPECT_DOUBLE_EQ(y.value()[1], 0.0625);
  EXPECT_DOUBLE_EQ(y.value()[2], 1.0);

  auto c = gate_normalize_leakyrelu(tape.constant(TensorD(Shape{2, 3, 4, 4}, -0.7)));
  for (double v : c.value().values()) EXPECT_EQ(v, 0.5);

  for (int draw = 0; draw < 20; ++draw) {
    auto r = gate_normalize_leakyrelu(tape.constant(random_tensor<double>(Shape{2, 3, 5, 5}, draw, 10.0)));
    for (double v : r.value().values()) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

struct GradCase {
  const char* name;
  MRUConfig config;
};

std::vector<GradCase> grad_cases() {
  std::vector<GradCase> out;
  for (GateKind g : {GateKind::kSigmoid, GateKind::kLeakyNormalized}) {
    MRUConfig down = square_config(g, NormKind::kConditional);
    down.in_channels = 2;
    down.out_channels = 3;
    down.stride = 2;
    down.norm_classes = 2;
    out.push_back({g == GateKind::kSigmoid ? "sigmoid/cond/s2" : "leaky/cond/s2", down});
    MRUConfig same = square_config(g, NormKind::kNone);
    same.in_channels = 3;
    same.out_channels = 3;
    out.push_back({g == GateKind::kSigmoid ? "sigmoid/plain/s1" : "leaky/plain/s1", same});
  }
  MRUConfig res = square_config(GateKind::kSigmoid, NormKind::kInstance);
  res.in_channels = 2;
  res.out_channels = 3;
  res.kind = BlockKind::kResidual;
  out.push_back({"residual", res});
  return out;
}

TEST(MRU, GradCheckEveryVariantOverTenDraws) {
  for (const GradCase& gc : grad_cases()) {
    const MRUConfig& c = gc.config;
    for (int draw = 0; draw < 10; ++draw) {
      const ParamSet<double> p = init_block(c, 40 + draw).cast<double>();
      const std::vector<int> labels = {1, 0};
      const std::vector<TensorD> inputs = test::with_params(
          {random_tensor<double>(Shape{2, c.in_channels, 4, 4}, 60 + draw),
           random_tensor<double>(Shape{2, 1, 4, 4}, 80 + draw)},
          p);
      auto fn = [&](Tape<double>& tape, std::span<const Var<double>> v) {
        Bound<double> b(tape, p, true);
        test::bind_params(b, p, v, 2);
        return project(tape, mru_forward(v[0], v[1], b, "b/", c, labels).y, 900 + draw);
      };
      GradCheckOptions opt;
      opt.seed = draw;
      opt.max_coords = 24;
      const GradCheckReport r = grad_check(fn, inputs, opt);
      EXPECT_TRUE(r.passed) << gc.name << " draw " << draw << " worst " << r.worst()
                            << " skipped " << r.skipped() << "/" << r.probed();
    }
  }
}

TEST(MRU, DirectResidualGradientIsN) {
  const MRUConfig c = square_config(GateKind::kSigmoid, NormKind::kInstance);
  const ParamSet<double> p = init_block(c, 11).cast<double>();
  const TensorD x0 = random_tensor<double>(Shape{1, 4, 5, 5}, 12);
  const TensorD img = random_tensor<double>(Shape{1, 1, 5, 5}, 13);
  const std::vector<int> labels = {0};

  Tape<double> tape;
  Bound<double> b(tape, p, false);
  auto x = tape.variable(x0);
  MRUOverrides ov;
  ov.detach_gates = true;
  ov.detach_z = true;
  auto out = mru_forward(x, tape.constant(img), b, "b/", c, labels, ov);
  tape.backward(sum(out.y));
  const TensorD n = out.n.value();
  const TensorD z = out.z.value();
  for (std::size_t i = 0; i < n.size(); ++i) EXPECT_DOUBLE_EQ(x.grad()[i], n[i]);

  // Finite differences of y(x) with n and z held at their values above.
  const GradCheckReport r = grad_check(
      [&](Tape<double>& t, std::span<const Var<double>> v) {
        auto nn = t.constant(n);
        return sum(add(mul(1.0 - nn, t.constant(z)), mul(nn, v[0])));
      },
      {x0});
  EXPECT_TRUE(r.passed) << r.worst();

  // Without detaching, the gradient picks up the gate and candidate paths.
  Tape<double> full;
  Bound<double> fb(full, p, false);
  auto xf = full.variable(x0);
  full.backward(sum(mru_forward(xf, full.constant(img), fb, "b/", c, labels).y));
  double diff = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) diff += std::abs(xf.grad()[i] - n[i]);
  EXPECT_GT(diff, 1e-3);
}

TEST(MRUStack, SingleBlockMatchesForward) {
  MRUConfig c = square_config(GateKind::kSigmoid, NormKind::kConditional);
  c.stride = 2;
  c.out_channels = 8;
  std::mt19937_64 rng(14);
  ParamSet<float> p;
  init_mru_params(p, "s/0/", c, rng);
  Tape<float> tape;
  Bound<float> b(tape, p, true);
  const std::vector<int> labels = {2};
  auto x = tape.constant(random_tensor<float>(Shape{1, 4, 8, 8}, 15));
  auto img = tape.constant(random_tensor<float>(Shape{1, 1, 8, 8}, 16));
  const std::vector<Var<float>> pyr = {img};
  const std::vector<MRUConfig> cfgs = {c};
  auto s = mru_stack(x, std::span<const Var<float>>(pyr), b, "s/", std::span<const MRUConfig>(cfgs),
                     labels);
  auto f = mru_forward(x, img, b, "s/0/", c, labels);
  EXPECT_EQ(s.value(), f.y.value());
}

TEST(MRUStack, TwoStrideTwoBlocksAndPerLevelGradient) {
  MRUConfig a = square_config(GateKind::kLeakyNormalized, NormKind::kInstance);
  a.in_channels = 1;
  a.out_channels = 4;
  a.stride = 2;
  MRUConfig bcfg = a;
  bcfg.in_channels = 4;
  bcfg.out_channels = 6;
  std::mt19937_64 rng(17);
  ParamSet<double> p;
  {
    ParamSet<float> pf;
    init_mru_params(pf, "s/0/", a, rng);
    init_mru_params(pf, "s/1/", bcfg, rng);
    p = pf.cast<double>();
  }
  const std::vector<MRUConfig> cfgs = {a, bcfg};
  const TensorD field = random_tensor<double>(Shape{1, 1, 32, 32}, 18);
  const TensorD level1 = random_tensor<double>(Shape{1, 1, 16, 16}, 19);

  Tape<double> tape;
  Bound<double> b(tape, p, false);
  auto l0 = tape.variable(field);
  auto l1 = tape.variable(level1);
  const std::vector<Var<double>> pyr = {l0, l1};
  auto y = mru_stack(l0, std::span<const Var<double>>(pyr), b, "s/", std::span<const MRUConfig>(cfgs),
                     std::vector<int>{0});
  ASSERT_EQ(y.shape(), (Shape{1, 6, 8, 8}));
  tape.backward(project(tape, y, 20));
  for (const Var<double>* l : {&l0, &l1}) {
    double norm = 0.0;
    for (double g : l->grad().values()) norm += g * g;
    EXPECT_GT(norm, 0.0);
  }

  // Spot-check level-1 gradient coordinates against finite differences.
  GradCheckOptions opt;
  opt.max_coords = 12;
  const GradCheckReport r = grad_check(
      [&](Tape<double>& t, std::span<const Var<double>> v) {
        Bound<double> bb(t, p, false);
        const std::vector<Var<double>> pv = {v[0], v[1]};
        return project(t, mru_stack(v[0], std::span<const Var<double>>(pv), bb, "s/",
                                    std::span<const MRUConfig>(cfgs), std::vector<int>{0}),
                       20);
      },
      {field, level1}, opt);
  EXPECT_TRUE(r.passed) << r.worst();

  const std::vector<Var<double>> short_pyr = {l0};
  EXPECT_THROW(mru_stack(l0, std::span<const Var<double>>(short_pyr), b, "s/",
                         std::span<const MRUConfig>(cfgs), std::vector<int>{0}),
               std::invalid_argument);
}

TEST(MRU, RejectsMismatchedInputs) {
  const MRUConfig c = square_config(GateKind::kSigmoid, NormKind::kNone);
  const ParamSet<float> p = init_block(c, 21);
  Tape<float> tape;
  Bound<float> b(tape, p, false);
  const std::vector<int> labels = {0};
  auto x = tape.constant(TensorF(Shape{1, 4, 6, 6}));
  EXPECT_THROW(mru_forward(x, tape.constant(TensorF(Shape{1, 1, 3, 3})), b, "b/", c, labels),
               std::invalid_argument);
  EXPECT_THROW(mru_forward(tape.constant(TensorF(Shape{1, 3, 6, 6})), tape.constant(TensorF(Shape{1, 1, 6, 6})),
                           b, "b/", c, labels),
               std::invalid_argument);
  MRUConfig bad = c;
  bad.stride = 3;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = c;
  bad.in_channels = 0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
}

TEST(MRU, ParameterCountFormula) {
  // Hand count for in=2, out=3, image=1, depth=2, no norm, stride 2:
  //   m 9*3*2+2 = 56, n 9*3*3+3 = 84, z 9*3*3+3 + 9*3*3+3 = 168, proj 6.
  MRUConfig c = square_config(GateKind::kSigmoid, NormKind::kNone);
  c.in_channels = 2;
  c.out_channels = 3;
  c.stride = 2;
  EXPECT_EQ(mru_param_count(c), 56u + 84u + 168u + 6u);

  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> ch(1, 9), dep(1, 3), st(1, 2), nk(0, 2), kind(0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    MRUConfig r;
    r.in_channels = ch(rng);
    r.out_channels = ch(rng);
    r.image_channels = ch(rng);
    r.depth = dep(rng);
    r.stride = st(rng);
    r.norm = static_cast<NormKind>(nk(rng));
    r.norm_classes = ch(rng);
    r.kind = static_cast<BlockKind>(kind(rng));
    ParamSet<float> p;
    init_mru_params(p, "x/", r, rng);
    EXPECT_EQ(p.count(), mru_param_count(r)) << "trial " << trial;
  }
}

}  // namespace
}  // namespace sketchygan
