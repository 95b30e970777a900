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
#include <filesystem>
#include <random>
#include <vector>

#include "sketchygan/core/adam.hpp"
#include "sketchygan/core/checkpoint.hpp"
#include "sketchygan/core/grad_check.hpp"
#include "sketchygan/core/ops.hpp"
#include "test_util.hpp"

namespace sketchygan {
namespace {

using test::naive_conv2d;
using test::project;
using test::random_tensor;

TEST(Tensor, RejectsLengthMismatch) {
  EXPECT_THROW(TensorF(Shape{1, 2, 2, 2}, std::vector<float>(7)), std::invalid_argument);
  EXPECT_THROW(TensorF(Shape{1, -1, 2, 2}), std::invalid_argument);
}

TEST(Conv2d, IdentityKernel) {
  Tape<float> tape;
  TensorF x = random_tensor<float>(Shape{1, 1, 4, 5}, 1);
  auto y = conv2d(tape.constant(x), tape.constant(TensorF(Shape{1, 1, 1, 1}, 1.0f)), 1, 0);
  EXPECT_EQ(y.value(), x);
}

TEST(Conv2d, AllOnesSums) {
  Tape<float> tape;
  auto y = conv2d(tape.constant(TensorF(Shape{1, 1, 3, 3}, 1.0f)),
                  tape.constant(TensorF(Shape{1, 1, 3, 3}, 1.0f)), 1, 0);
  ASSERT_EQ(y.shape(), (Shape{1, 1, 1, 1}));
  EXPECT_EQ(y.value()[0], 9.0f);
}

TEST(Conv2d, MatchesNaiveLoops) {
  Tape<double> tape;
  TensorD x = random_tensor<double>(Shape{1, 2, 5, 5}, 2);
  TensorD k = random_tensor<double>(Shape{3, 2, 3, 3}, 3);
  auto y = conv2d(tape.constant(x), tape.constant(k), 1, 0);
  TensorD ref = naive_conv2d(x, k, 1, 0);
  ASSERT_EQ(y.shape(), ref.shape());
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(y.value()[i], ref[i], 1e-6);
}

TEST(Conv2d, RandomConfigurationsMatchNaiveLoops) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> small(1, 3), extent(3, 9), kern(1, 3), str(1, 2), pad(0, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const int kh = kern(rng);
    const int kw = kern(rng);
    const Shape xs{small(rng), small(rng), extent(rng), extent(rng)};
    const Shape ks{small(rng), xs.c, kh, kw};
    const int s = str(rng);
    const int p = pad(rng);
    Tape<double> tape;
    TensorD x = random_tensor<double>(xs, 100 + trial);
    TensorD k = random_tensor<double>(ks, 200 + trial);
    auto y = conv2d(tape.constant(x), tape.constant(k), s, p);
    TensorD ref = naive_conv2d(x, k, s, p);
    ASSERT_EQ(y.shape(), ref.shape()) << "trial " << trial;
    for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_NEAR(y.value()[i], ref[i], 1e-6);
  }
}

TEST(Conv2d, RejectsChannelMismatchAndBadStride) {
  Tape<float> tape;
  auto x = tape.constant(TensorF(Shape{1, 2, 4, 4}));
  EXPECT_THROW(conv2d(x, tape.constant(TensorF(Shape{1, 3, 3, 3})), 1, 1), std::invalid_argument);
  EXPECT_THROW(conv2d(x, tape.constant(TensorF(Shape{1, 2, 3, 3})), 0, 1), std::invalid_argument);
}

TEST(Concat, ShapesAndEmptyOperand) {
  Tape<float> tape;
  TensorF a = random_tensor<float>(Shape{1, 2, 4, 4}, 4);
  auto ab = concat_channels(tape.constant(a), tape.constant(TensorF(Shape{1, 3, 4, 4})));
  EXPECT_EQ(ab.shape(), (Shape{1, 5, 4, 4}));
  auto ae = concat_channels(tape.constant(a), tape.constant(TensorF(Shape{1, 0, 4, 4})));
  EXPECT_EQ(ae.value(), a);
  EXPECT_THROW(concat_channels(tape.constant(a), tape.constant(TensorF(Shape{1, 1, 3, 4}))),
               std::invalid_argument);
}

TEST(Concat, GradientIsOnesAndHasNoCrossTalk) {
  Tape<double> tape;
  auto a = tape.variable(random_tensor<double>(Shape{2, 2, 3, 3}, 5));
  auto b = tape.variable(random_tensor<double>(Shape{2, 1, 3, 3}, 6));
  auto c = concat_channels(a, b);
  tape.backward(sum(c));
  for (double g : a.grad().values()) EXPECT_EQ(g, 1.0);

  // Only b's slice feeds the loss: a must get exactly zero.
  Tape<double> t2;
  auto a2 = t2.variable(random_tensor<double>(Shape{1, 2, 3, 3}, 7));
  auto b2 = t2.variable(random_tensor<double>(Shape{1, 1, 3, 3}, 8));
  auto c2 = concat_channels(a2, b2);
  auto tail = slice_batch(c2, 0, 1);
  TensorD mask(c2.shape());
  for (int h = 0; h < 3; ++h) {
    for (int w = 0; w < 3; ++w) mask(0, 2, h, w) = 1.0;
  }
  t2.backward(sum(mul(tail, t2.constant(mask))));
  for (double g : a2.grad().values()) EXPECT_EQ(g, 0.0);
  for (double g : b2.grad().values()) EXPECT_EQ(g, 1.0);
}

TEST(Elementwise, Definitions) {
  Tape<float> tape;
  EXPECT_FLOAT_EQ(sigmoid(tape.constant(TensorF::scalar(0.0f))).value()[0], 0.5f);
  EXPECT_FLOAT_EQ(leaky_relu(tape.constant(TensorF::scalar(-2.0f)), 0.2).value()[0], -0.4f);
  auto big = sigmoid(tape.constant(TensorF(Shape{1, 1, 1, 2}, std::vector<float>{-30.f, 30.f})));
  EXPECT_GT(big.value()[0], 0.0f);
  EXPECT_LT(big.value()[1], 1.0f + 1e-7f);
  EXPECT_THROW(add(tape.constant(TensorF(Shape{1, 1, 2, 2})), tape.constant(TensorF(Shape{1, 1, 2, 1}))),
               std::invalid_argument);
}

TEST(Resample, ConstantAndInversePair) {
  Tape<double> tape;
  auto d = downsample_avg(tape.constant(TensorD(Shape{1, 2, 8, 8}, 0.7)), 2);
  for (double v : d.value().values()) EXPECT_DOUBLE_EQ(v, 0.7);
  TensorD x = random_tensor<double>(Shape{2, 3, 4, 4}, 9);
  auto round = downsample_avg(upsample_nearest(tape.constant(x), 2), 2);
  EXPECT_EQ(round.value(), x);
  EXPECT_THROW(downsample_avg(tape.constant(TensorD(Shape{1, 1, 5, 4})), 2), std::invalid_argument);
}

TEST(Resample, BlockMeanOracle) {
  Tape<double> tape;
  TensorD x = random_tensor<double>(Shape{1, 1, 8, 8}, 10);
  auto d = downsample_avg(tape.constant(x), 2);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double ref = (x(0, 0, 2 * i, 2 * j) + x(0, 0, 2 * i, 2 * j + 1) +
                          x(0, 0, 2 * i + 1, 2 * j) + x(0, 0, 2 * i + 1, 2 * j + 1)) / 4.0;
      EXPECT_EQ(d.value()(0, 0, i, j), ref);
    }
  }
}

TEST(CondInstanceNorm, DegenerateCases) {
  Tape<double> tape;
  const int labels[] = {1};
  TensorD x(Shape{1, 2, 3, 3});
  for (int h = 0; h < 3; ++h) {
    for (int w = 0; w < 3; ++w) {
      x(0, 0, h, w) = 4.0;
      x(0, 1, h, w) = -1.0;
    }
  }
  auto zeros = cond_instance_norm(tape.constant(x), labels, tape.constant(TensorD(Shape{2, 2, 1, 1}, 1.0)),
                                  tape.constant(TensorD(Shape{2, 2, 1, 1}, 0.0)), 1e-5);
  for (double v : zeros.value().values()) EXPECT_EQ(v, 0.0);
  TensorD rx = random_tensor<double>(Shape{1, 2, 3, 3}, 12);
  auto threes = cond_instance_norm(tape.constant(rx), labels, tape.constant(TensorD(Shape{2, 2, 1, 1}, 0.0)),
                                   tape.constant(TensorD(Shape{2, 2, 1, 1}, 3.0)), 1e-5);
  for (double v : threes.value().values()) EXPECT_EQ(v, 3.0);
  const int bad[] = {2};
  EXPECT_THROW(cond_instance_norm(tape.constant(rx), bad, tape.constant(TensorD(Shape{2, 2, 1, 1})),
                                  tape.constant(TensorD(Shape{2, 2, 1, 1})), 1e-5),
               std::invalid_argument);
}

TEST(CondInstanceNorm, StatisticsFollowLabelRow) {
  Tape<double> tape;
  const Shape s{3, 4, 8, 8};
  TensorD x = random_tensor<double>(s, 13);
  TensorD scale = random_tensor<double>(Shape{5, 4, 1, 1}, 14);
  TensorD shift = random_tensor<double>(Shape{5, 4, 1, 1}, 15);
  const int labels[] = {4, 0, 2};
  auto y = cond_instance_norm(tape.constant(x), labels, tape.constant(scale), tape.constant(shift), 1e-5);
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      double mu = 0, sq = 0;
      for (int h = 0; h < s.h; ++h) {
        for (int w = 0; w < s.w; ++w) mu += y.value()(n, c, h, w);
      }
      mu /= s.plane();
      for (int h = 0; h < s.h; ++h) {
        for (int w = 0; w < s.w; ++w) sq += std::pow(y.value()(n, c, h, w) - mu, 2);
      }
      const double sd = std::sqrt(sq / s.plane());
      EXPECT_NEAR(mu, shift(labels[n], c, 0, 0), 1e-3);
      EXPECT_NEAR(sd, std::abs(scale(labels[n], c, 0, 0)), 1e-3);
    }
  }
}

TEST(Dense, IdentityAndSoftmax) {
  Tape<double> tape;
  TensorD x = random_tensor<double>(Shape{2, 3, 1, 1}, 16);
  TensorD eye(Shape{3, 3, 1, 1});
  for (int i = 0; i < 3; ++i) eye(i, i, 0, 0) = 1.0;
  auto y = dense(tape.constant(x), tape.constant(eye), tape.constant(TensorD(Shape{1, 3, 1, 1})));
  EXPECT_EQ(y.value(), x);
  auto u = softmax(tape.constant(TensorD(Shape{1, 5, 1, 1}, 2.5)));
  for (double v : u.value().values()) EXPECT_NEAR(v, 0.2, 1e-15);
  auto p = softmax(tape.constant(random_tensor<double>(Shape{20, 7, 1, 1}, 17, 5.0)));
  for (int n = 0; n < 20; ++n) {
    double total = 0;
    for (int k = 0; k < 7; ++k) total += p.value()(n, k, 0, 0);
    EXPECT_NEAR(total, 1.0, 1e-6);
  }
  EXPECT_THROW(dense(tape.constant(x), tape.constant(TensorD(Shape{3, 4, 1, 1})),
                     tape.constant(TensorD(Shape{1, 3, 1, 1}))),
               std::invalid_argument);
}

TEST(MinmaxNormalize, Arithmetic) {
  Tape<double> tape;
  auto pre = tape.constant(TensorD(Shape{1, 1, 1, 3}, std::vector<double>{-1.0, 0.0, 3.0}));
  auto y = minmax_normalize(leaky_relu(pre, 0.2));
  EXPECT_NEAR(y.value()[0], 0.0, 1e-15);
  EXPECT_NEAR(y.value()[1], 0.0625, 1e-15);
  EXPECT_NEAR(y.value()[2], 1.0, 1e-15);
  auto flat = minmax_normalize(tape.constant(TensorD(Shape{1, 2, 2, 2}, -4.0)));
  for (double v : flat.value().values()) EXPECT_EQ(v, 0.5);
}

// Each op reduced to a scalar with a random projection so every output
// coordinate carries a distinct weight.
struct OpCase {
  const char* name;
  std::vector<Shape> shapes;
  std::function<Var<double>(Tape<double>&, std::span<const Var<double>>)> op;
};

std::vector<OpCase> op_cases() {
  const std::vector<int> labels = {1, 0};
  return {
      {"add", {{2, 2, 3, 3}, {2, 2, 3, 3}}, [](auto& t, auto v) { return project(t, add(v[0], v[1]), 1); }},
      {"sub", {{2, 2, 3, 3}, {2, 2, 3, 3}}, [](auto& t, auto v) { return project(t, sub(v[0], v[1]), 1); }},
      {"mul", {{2, 2, 3, 3}, {2, 2, 3, 3}}, [](auto& t, auto v) { return project(t, mul(v[0], v[1]), 1); }},
      {"sigmoid", {{2, 2, 3, 3}}, [](auto& t, auto v) { return project(t, sigmoid(v[0]), 2); }},
      {"tanh", {{2, 2, 3, 3}}, [](auto& t, auto v) { return project(t, tanh(v[0]), 2); }},
      {"leaky_relu", {{2, 2, 3, 3}}, [](auto& t, auto v) { return project(t, leaky_relu(v[0], 0.2), 2); }},
      {"softplus", {{2, 2, 3, 3}}, [](auto& t, auto v) { return project(t, softplus(v[0]), 2); }},
      {"abs", {{2, 2, 3, 3}}, [](auto& t, auto v) { return project(t, abs(v[0]), 2); }},
      {"conv2d", {{2, 3, 6, 5}, {4, 3, 3, 3}, {1, 4, 1, 1}},
       [](auto& t, auto v) { return project(t, conv2d(v[0], v[1], v[2], 2, 1), 3); }},
      {"concat", {{2, 2, 3, 3}, {2, 1, 3, 3}},
       [](auto& t, auto v) { return project(t, concat_channels(v[0], v[1]), 4); }},
      {"concat_batch", {{2, 2, 3, 3}, {1, 2, 3, 3}},
       [](auto& t, auto v) { return project(t, concat_batch(v[0], v[1]), 4); }},
      {"slice_batch", {{3, 2, 3, 3}}, [](auto& t, auto v) { return project(t, slice_batch(v[0], 1, 2), 4); }},
      {"downsample", {{2, 2, 4, 6}}, [](auto& t, auto v) { return project(t, downsample_avg(v[0], 2), 5); }},
      {"upsample", {{2, 2, 3, 2}}, [](auto& t, auto v) { return project(t, upsample_nearest(v[0], 2), 5); }},
      {"cond_instance_norm", {{2, 3, 4, 4}, {2, 3, 1, 1}, {2, 3, 1, 1}},
       [labels](auto& t, auto v) {
         return project(t, cond_instance_norm(v[0], labels, v[1], v[2], 1e-5), 6);
       }},
      {"global_avg_pool", {{2, 3, 4, 4}}, [](auto& t, auto v) { return project(t, global_avg_pool(v[0]), 7); }},
      {"dense", {{2, 3, 2, 2}, {5, 12, 1, 1}, {1, 5, 1, 1}},
       [](auto& t, auto v) { return project(t, dense(v[0], v[1], v[2]), 8); }},
      {"softmax", {{3, 5, 1, 1}}, [](auto& t, auto v) { return project(t, softmax(v[0]), 9); }},
      {"log_softmax", {{3, 5, 1, 1}}, [](auto& t, auto v) { return project(t, log_softmax(v[0]), 9); }},
      {"broadcast", {{2, 3, 1, 1}}, [](auto& t, auto v) { return project(t, broadcast_spatial(v[0], 3, 2), 10); }},
      {"mean", {{2, 3, 2, 2}}, [](auto&, auto v) { return mean(v[0]); }},
      {"mean_abs_diff", {{2, 3, 2, 2}, {2, 3, 2, 2}}, [](auto&, auto v) { return mean_abs_diff(v[0], v[1]); }},
      {"minmax_normalize", {{2, 3, 3, 3}}, [](auto& t, auto v) { return project(t, minmax_normalize(v[0]), 11); }},
      {"focal_loss", {{2, 4, 1, 1}},
       [labels](auto&, auto v) { return focal_loss(v[0], std::span<const int>(labels), 2.0); }},
      {"clamp_max", {{2, 2, 3, 3}}, [](auto& t, auto v) { return project(t, clamp_max(v[0], 0.3), 12); }},
  };
}

TEST(GradCheck, EveryOpOverTenDraws) {
  for (const OpCase& c : op_cases()) {
    for (int draw = 0; draw < 10; ++draw) {
      std::vector<TensorD> inputs;
      for (std::size_t i = 0; i < c.shapes.size(); ++i) {
        inputs.push_back(random_tensor<double>(c.shapes[i], 1000 * draw + 17 * i + 3));
      }
      GradCheckOptions opt;
      opt.seed = draw;
      const GradCheckReport r = grad_check(c.op, inputs, opt);
      EXPECT_TRUE(r.passed) << c.name << " draw " << draw << " worst " << r.worst() << " skipped "
                            << r.skipped();
    }
  }
}

TEST(GradCheck, SumAndSquaredNorm) {
  std::vector<TensorD> x = {random_tensor<double>(Shape{1, 2, 3, 3}, 21)};
  const GradCheckReport s = grad_check([](auto&, auto v) { return sum(v[0]); }, x);
  EXPECT_LT(s.worst(), 1e-8);
  const GradCheckReport q = grad_check([](auto&, auto v) { return sum(mul(v[0], v[0])); }, x);
  EXPECT_LT(q.worst(), 1e-6);
  EXPECT_THROW(grad_check([](auto&, auto v) { return mul(v[0], v[0]); }, x), std::invalid_argument);
}

// x^2 with a deliberately scaled backward.
Var<double> skewed_square(Var<double> x, double skew) {
  TensorD y = x.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= y[i];
  const int id = x.id();
  return x.tape().record(std::move(y), x.requires_grad(),
                         [id, skew](Tape<double>& t, const TensorD&, const TensorD& g) {
                           TensorD d = t.value(id);
                           for (std::size_t i = 0; i < d.size(); ++i) d[i] = 2.0 * skew * d[i] * g[i];
                           t.accumulate(id, d);
                         });
}

TEST(GradCheck, CatchesWrongBackwardAtEveryStep) {
  const std::vector<TensorD> x = {random_tensor<double>(Shape{1, 1, 3, 3}, 24)};
  EXPECT_TRUE(grad_check([](auto&, auto v) { return sum(skewed_square(v[0], 1.0)); }, x).passed);
  const GradCheckReport bad = grad_check([](auto&, auto v) { return sum(skewed_square(v[0], 1.001)); }, x);
  EXPECT_FALSE(bad.passed);
  EXPECT_EQ(bad.skipped(), 0u);
}

TEST(GradCheck, KinksAreRefinedOrSkipped) {
  // abs at exactly 0 stays kinked at every step and is skipped.
  TensorD x(Shape{1, 1, 1, 40});
  for (int i = 0; i < 40; ++i) x[i] = 0.1 + 0.05 * i;
  x[0] = 0.0;
  const GradCheckReport r = grad_check([](auto&, auto v) { return sum(abs(v[0])); }, {x});
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.skipped(), 1u);
  // A kink 3e-6 away is inside the default step but outside the refined one.
  x[0] = 3e-6;
  const GradCheckReport near = grad_check([](auto&, auto v) { return sum(abs(v[0])); }, {x});
  EXPECT_TRUE(near.passed);
  EXPECT_EQ(near.skipped(), 0u);
  // Too many kinks fail the check.
  const GradCheckReport many =
      grad_check([](auto&, auto v) { return sum(abs(v[0])); }, {TensorD(Shape{1, 1, 1, 4})});
  EXPECT_FALSE(many.passed);
}

TEST(Tape, BackwardVisitsEachOpOnce) {
  Tape<double> tape;
  auto x = tape.variable(random_tensor<double>(Shape{1, 1, 2, 2}, 22));
  auto y = sigmoid(x);
  auto z = mul(y, y);
  auto w = add(z, x);
  tape.backward(sum(w));
  EXPECT_EQ(tape.backward_visits(), 4u);
  EXPECT_EQ(x.grad().shape(), x.shape());
  EXPECT_THROW(tape.backward(w), std::invalid_argument);
}

TEST(Dual, ForwardOverReverseIsHessianVectorProduct) {
  // f(x) = sum(softplus(W x)); compare (d/de) grad f(x + e v) with differences of gradients.
  TensorD x = random_tensor<double>(Shape{1, 4, 1, 1}, 23);
  TensorD wt = random_tensor<double>(Shape{3, 4, 1, 1}, 24);
  TensorD v = random_tensor<double>(Shape{1, 4, 1, 1}, 25);
  auto grad_at = [&](const TensorD& at) {
    Tape<double> t;
    auto xv = t.variable(at);
    t.backward(sum(softplus(dense(xv, t.constant(wt), t.constant(TensorD(Shape{1, 3, 1, 1}))))));
    return xv.grad();
  };
  Tape<Dual<double>> dt;
  auto xd = dt.variable(make_dual(x, v));
  dt.backward(sum(softplus(dense(xd, dt.constant(wt.cast<Dual<double>>()),
                                 dt.constant(Tensor<Dual<double>>(Shape{1, 3, 1, 1}))))));
  const double h = 1e-6;
  TensorD xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] += h * v[i];
    xm[i] -= h * v[i];
  }
  TensorD gp = grad_at(xp), gm = grad_at(xm), g0 = grad_at(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(xd.grad()[i].v, g0[i], 1e-12);
    EXPECT_NEAR(xd.grad()[i].d, (gp[i] - gm[i]) / (2 * h), 1e-7);
  }
}

TEST(Adam, ZeroGradientLeavesParamsAndDecaysMoments) {
  ParamSet<double> p;
  p.add("w", random_tensor<double>(Shape{1, 1, 2, 2}, 26));
  const ParamSet<double> before = p;
  AdamState<double> s = make_adam_state(p);
  s.m.at("w").fill(0.4);
  s.v.at("w").fill(0.2);
  adam_step(p, p.filled_like(0.0), s, 0.1);
  EXPECT_EQ(s.step, 1);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_LT(s.m.at("w")[i], 0.4);
    EXPECT_LT(s.v.at("w")[i], 0.2);
  }
  // Stale moments still move params, so check with fresh state for strict equality.
  AdamState<double> fresh = make_adam_state(p);
  ParamSet<double> q = before;
  adam_step(q, q.filled_like(0.0), fresh, 0.1);
  EXPECT_EQ(q, before);
}

TEST(Adam, FirstStepIsLrTimesSign) {
  ParamSet<double> p;
  p.add("w", TensorD(Shape{1, 1, 1, 3}, std::vector<double>{1.0, 2.0, 3.0}));
  AdamState<double> s = make_adam_state(p);
  ParamSet<double> g;
  g.add("w", TensorD(Shape{1, 1, 1, 3}, std::vector<double>{0.3, -5.0, 1e-3}));
  adam_step(p, g, s, 0.01);
  EXPECT_NEAR(p.at("w")[0], 1.0 - 0.01, 1e-7);
  EXPECT_NEAR(p.at("w")[1], 2.0 + 0.01, 1e-7);
  EXPECT_NEAR(p.at("w")[2], 3.0 - 0.01, 1e-6);
}

TEST(Adam, MinimizesSquare) {
  ParamSet<double> p;
  p.add("w", TensorD::scalar(1.0));
  AdamState<double> s = make_adam_state(p, 0.9, 0.999);
  for (int i = 0; i < 200; ++i) {
    ParamSet<double> g;
    g.add("w", TensorD::scalar(2.0 * p.at("w")[0]));
    adam_step(p, g, s, 0.01);
  }
  EXPECT_LT(std::abs(p.at("w")[0]), 0.5);
  EXPECT_EQ(s.step, 200);
  ParamSet<double> wrong;
  wrong.add("v", TensorD::scalar(1.0));
  EXPECT_THROW(adam_step(p, wrong, s, 0.01), std::invalid_argument);
}

TEST(Checkpoint, RoundTrip) {
  Checkpoint cp;
  cp.params.add("generator/a", random_tensor<float>(Shape{2, 3, 3, 3}, 27));
  cp.params.add("discriminator/b", random_tensor<float>(Shape{1, 4, 1, 1}, 28));
  cp.params.add("empty", TensorF(Shape{1, 0, 1, 1}));
  cp.scalars["lr"] = 1e-4;
  cp.strings["gate"] = "sigmoid";
  const auto path = std::filesystem::temp_directory_path() / "sketchygan_test_ckpt.bin";
  save_checkpoint(path, cp);
  EXPECT_EQ(load_checkpoint(path), cp);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 4);
  EXPECT_THROW(load_checkpoint(path), std::runtime_error);
  std::filesystem::remove(path);
}

TEST(Determinism, ConvIsBitIdentical) {
  auto run = [] {
    Tape<float> tape;
    auto x = tape.variable(random_tensor<float>(Shape{4, 8, 16, 16}, 29));
    auto k = tape.variable(random_tensor<float>(Shape{16, 8, 3, 3}, 30));
    auto y = conv2d(x, k, 2, 1);
    tape.backward(sum(y));
    return std::make_pair(y.value(), k.grad());
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace sketchygan
