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

#include "sketchygan/harness/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sketchygan/core/adam.hpp"

namespace sketchygan {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kGeneratorStream = 0x67656e;
constexpr std::uint64_t kDiscriminatorStream = 0x646973;
constexpr std::uint64_t kLoopStream = 0x6c6f6f70;

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

double scalar(const Var<float>& v) { return v.valid() ? static_cast<double>(v.value()[0]) : 0.0; }

void check_finite(const std::string& term, double v, long long iteration) {
  if (!std::isfinite(v)) throw NonFiniteLoss(term, iteration);
}

MixRatio ratio_at(const TrainConfig& c, long long i) {
  const ScheduleState s{i, c.schedule.i_max > 0 ? c.schedule.i_max : c.iterations, c.schedule.lambda};
  return c.schedule.mode == ScheduleMode::kRamp ? mix_ratio(s)
                                                : pretrain_finetune_ratio(s, c.schedule.pretrain_fraction);
}

bool trains_discriminator(const LossSwitches& e) { return e.gan || e.ac || e.dragan; }

void check_data(const TrainConfig& c, const Dataset& data) {
  if (data.resolution() != c.generator.resolution) {
    throw std::invalid_argument("train: corpus resolution " + std::to_string(data.resolution()) +
                                " differs from generator.resolution " +
                                std::to_string(c.generator.resolution));
  }
  if (data.manifest().classes() > c.generator.classes) {
    throw std::invalid_argument("train: corpus has more classes than generator.classes");
  }
  if (data.indices(Split::kTrain).empty()) throw std::invalid_argument("train: empty train split");
}

void save_pair(const fs::path& dir, const std::string& suffix, const TrainConfig& c,
               const ParamSet<float>& g, const ParamSet<float>& d, long long iteration) {
  save_checkpoint(dir / ("generator" + suffix + ".ckpt"), generator_checkpoint(g, c.generator, iteration));
  Checkpoint dc;
  dc.params = d;
  dc.scalars["iteration"] = static_cast<double>(iteration);
  dc.strings["kind"] = "discriminator";
  save_checkpoint(dir / ("discriminator" + suffix + ".ckpt"), dc);
}

}  // namespace

NonFiniteLoss::NonFiniteLoss(const std::string& term, long long iteration)
    : std::runtime_error("non-finite loss term '" + term + "' at iteration " + std::to_string(iteration)),
      term_(term),
      iteration_(iteration) {}

std::string metrics_header() {
  return "iteration,p_sketch,d_gan,d_ac,d_dragan,d_total,g_gan,g_ac,g_l1,g_perceptual,g_diversity,g_total";
}

std::string format_metrics(const MetricsRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%lld,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g", r.iteration,
                r.p_sketch, r.d_gan, r.d_ac, r.d_dragan, r.d_total, r.g_gan, r.g_ac, r.g_l1, r.g_perceptual,
                r.g_diversity, r.g_total);
  return buf;
}

ParamSet<float> initial_generator(const TrainConfig& c) {
  return init_generator(c.generator, stream(c.seed, kGeneratorStream)());
}

ParamSet<float> initial_discriminator(const TrainConfig& c) {
  return init_discriminator(c.discriminator, stream(c.seed, kDiscriminatorStream)());
}

std::vector<Var<float>> field_pyramid(Tape<float>& tape, const TensorF& fields, int levels) {
  return make_pyramid(tape.constant(fields), levels);
}

TensorF sample_noise(int n, int noise_dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  TensorF z(Shape{n, noise_dim, 1, 1});
  for (auto& v : z.values()) v = static_cast<float>(normal(rng));
  return z;
}

TensorF generate(const ParamSet<float>& params, const GeneratorConfig& c, const TensorF& fields,
                 const TensorF& noise, std::span<const int> labels) {
  Tape<float> tape;
  Bound<float> g(tape, params, false);
  const auto pyramid = field_pyramid(tape, fields, c.levels());
  return generator_forward<float>(pyramid, tape.constant(noise), labels, g, c).value();
}

Checkpoint generator_checkpoint(const ParamSet<float>& params, const GeneratorConfig& c, long long iteration) {
  Checkpoint ck;
  ck.params = params;
  ck.scalars["iteration"] = static_cast<double>(iteration);
  ck.strings["kind"] = "generator";
  ck.strings["generator"] = generator_fingerprint(c);
  return ck;
}

ParamSet<float> load_generator(const fs::path& path, const GeneratorConfig& c) {
  Checkpoint ck = load_checkpoint(path);
  const auto kind = ck.strings.find("kind");
  if (kind == ck.strings.end() || kind->second != "generator") {
    throw std::invalid_argument(path.string() + ": not a generator checkpoint");
  }
  const auto fp = ck.strings.find("generator");
  if (fp == ck.strings.end() || fp->second != generator_fingerprint(c)) {
    throw std::invalid_argument(path.string() + ": generator config does not match the checkpoint");
  }
  if (!ck.params.same_layout(init_generator(c, 0))) {
    throw std::invalid_argument(path.string() + ": parameter layout does not match the generator config");
  }
  return std::move(ck.params);
}

TrainResult train(const TrainConfig& c, const Dataset& data, const fs::path& out_dir,
                  const std::function<void(const MetricsRow&)>& on_iteration) {
  validate(c);
  check_data(c, data);
  const LossWeights& w = c.loss;
  const LossSwitches& on = w.enable;
  const GeneratorConfig& gc = c.generator;
  const DiscriminatorConfig& dc = c.discriminator;
  const int levels = gc.levels();
  const int n = c.batch;
  const FeatureExtractor extractor(c.feature_seed);

  TrainResult result;
  result.generator = initial_generator(c);
  result.discriminator = initial_discriminator(c);
  ParamSet<float>& gp = result.generator;
  ParamSet<float>& dp = result.discriminator;
  AdamState<float> g_opt = make_adam_state(gp, c.beta1, c.beta2);
  AdamState<float> d_opt = make_adam_state(dp, c.beta1, c.beta2);

  std::ofstream log;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    ExperimentConfig e;
    e.train = c;
    std::ofstream(out_dir / "config.json") << to_json(to_flat(e)) << '\n';
    log.open(out_dir / "metrics.csv");
    if (!log) throw std::runtime_error("train: cannot write " + (out_dir / "metrics.csv").string());
    log << metrics_header() << '\n';
  }

  std::mt19937_64 rng = stream(c.seed, kLoopStream);
  const std::vector<std::size_t> pool = data.indices(Split::kTrain);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::bernoulli_distribution coin(0.5);

  for (long long it = 0; it < c.iterations; ++it) {
    MetricsRow row;
    row.iteration = it;
    const MixRatio ratio = ratio_at(c, it);
    row.p_sketch = ratio.sketch;
    const std::vector<Source> sources = draw_batch_sources(ratio, n, rng);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = pool[pick(rng)];
    std::vector<std::uint8_t> flips(n, 0);
    if (c.flip) {
      for (auto& f : flips) f = coin(rng);
    }
    const Batch b = data.batch(idx, sources, flips);
    const TensorF z1 = sample_noise(n, gc.noise_dim, rng);
    const TensorF z2 = sample_noise(n, gc.noise_dim, rng);

    if (trains_discriminator(on)) {
      const TensorF fake = generate(gp, gc, b.fields, z1, b.labels);
      Tape<float> tape;
      Bound<float> d(tape, dp, true);
      const Var<float> sketch = tape.constant(b.fields);
      const Var<float>* cond = dc.sketch_conditioned ? &sketch : nullptr;
      const auto real_out = discriminator_forward(tape.constant(b.photos), d, dc, cond);
      const auto fake_out = discriminator_forward(tape.constant(fake), d, dc, cond);
      DLossTerms<float> terms;
      if (on.gan) terms.gan = gan_loss_d(real_out.gan_logit, fake_out.gan_logit);
      if (on.ac) terms.ac = focal_ac_loss(real_out.class_logits, b.labels, w.focal_gamma);
      if (on.dragan) {
        const Critic<float> critic = discriminator_critic<float>(dc, dc.sketch_conditioned ? &b.fields : nullptr);
        terms.dragan = dragan_penalty(critic, d, b.photos, w.lambda_gp, w.perturb_scale, rng);
      }
      const Var<float> total = total_d(tape, terms, on);
      row.d_gan = scalar(terms.gan);
      row.d_ac = scalar(terms.ac);
      row.d_dragan = scalar(terms.dragan);
      row.d_total = scalar(total);
      check_finite("d_gan", row.d_gan, it);
      check_finite("d_ac", row.d_ac, it);
      check_finite("d_dragan", row.d_dragan, it);
      tape.backward(total);
      adam_step(dp, d.gradients(), d_opt, c.lr_d);
      ++result.d_updates;
    }

    {
      Tape<float> tape;
      Bound<float> g(tape, gp, true);
      Bound<float> d(tape, dp, false);
      const Var<float> fields = tape.constant(b.fields);
      const Var<float> fields2 = concat_batch(fields, fields);
      std::vector<int> labels2 = b.labels;
      labels2.insert(labels2.end(), b.labels.begin(), b.labels.end());
      const auto pyramid = make_pyramid(fields2, levels);
      const Var<float> noise = concat_batch(tape.constant(z1), tape.constant(z2));
      const Var<float> gen = generator_forward<float>(pyramid, noise, labels2, g, gc);
      const Var<float> photos = tape.constant(b.photos);
      const Var<float> target = concat_batch(photos, photos);
      GLossTerms<float> terms;
      if (on.gan || on.ac) {
        const Var<float>* cond = dc.sketch_conditioned ? &fields2 : nullptr;
        const auto out = discriminator_forward(gen, d, dc, cond);
        if (on.gan) terms.gan = gan_loss_g(out.gan_logit);
        if (on.ac) terms.ac = focal_ac_loss(out.class_logits, labels2, w.focal_gamma);
      }
      if (on.l1) terms.l1 = l1_supervision(gen, target);
      if (on.perceptual) terms.perceptual = perceptual_loss(gen, target, extractor, w.lambda_p);
      if (on.diversity) {
        terms.diversity = diversity_loss(slice_batch(gen, 0, n), slice_batch(gen, n, n), w.lambda_div,
                                         w.diversity_cap);
      }
      const Var<float> total = total_g(tape, terms, on);
      row.g_gan = scalar(terms.gan);
      row.g_ac = scalar(terms.ac);
      row.g_l1 = scalar(terms.l1);
      row.g_perceptual = scalar(terms.perceptual);
      row.g_diversity = scalar(terms.diversity);
      row.g_total = scalar(total);
      check_finite("g_gan", row.g_gan, it);
      check_finite("g_ac", row.g_ac, it);
      check_finite("g_l1", row.g_l1, it);
      check_finite("g_perceptual", row.g_perceptual, it);
      check_finite("g_diversity", row.g_diversity, it);
      tape.backward(total);
      adam_step(gp, g.gradients(), g_opt, c.lr_g);
      ++result.g_updates;
    }

    result.log.push_back(row);
    if (log.is_open()) log << format_metrics(row) << '\n';
    if (on_iteration) on_iteration(row);
    if (!out_dir.empty() && c.checkpoint_every > 0 && (it + 1) % c.checkpoint_every == 0 &&
        it + 1 < c.iterations) {
      char suffix[32];
      std::snprintf(suffix, sizeof suffix, "_%06lld", it + 1);
      fs::create_directories(out_dir / "checkpoints");
      save_pair(out_dir / "checkpoints", suffix, c, gp, dp, it + 1);
    }
  }
  if (!out_dir.empty()) {
    log.flush();
    save_pair(out_dir, "", c, gp, dp, c.iterations);
  }
  return result;
}

}  // namespace sketchygan
