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

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sketchygan/core/checkpoint.hpp"
#include "sketchygan/data/dataset.hpp"
#include "sketchygan/harness/config.hpp"

namespace sketchygan {

/// Loss values of one iteration. Disabled terms are logged as 0.
struct MetricsRow {
  long long iteration = 0;
  double p_sketch = 0.0;
  double d_gan = 0.0;
  double d_ac = 0.0;
  double d_dragan = 0.0;
  double d_total = 0.0;
  double g_gan = 0.0;
  double g_ac = 0.0;
  double g_l1 = 0.0;
  double g_perceptual = 0.0;
  double g_diversity = 0.0;
  double g_total = 0.0;
};

std::string metrics_header();
std::string format_metrics(const MetricsRow& row);

class NonFiniteLoss : public std::runtime_error {
 public:
  NonFiniteLoss(const std::string& term, long long iteration);
  const std::string& term() const { return term_; }
  long long iteration() const { return iteration_; }

 private:
  std::string term_;
  long long iteration_;
};

struct TrainResult {
  ParamSet<float> generator;
  ParamSet<float> discriminator;
  std::vector<MetricsRow> log;
  long long d_updates = 0;
  long long g_updates = 0;
};

ParamSet<float> initial_generator(const TrainConfig& c);
ParamSet<float> initial_discriminator(const TrainConfig& c);

/*
 * Per iteration: draw source flags from the schedule, sample a train batch
 * (with joint horizontal flips), update D once, then update G once. The G
 * step runs the generator on the batch twice with independent noise; every
 * G term is averaged over both generations and the diversity term compares
 * them. D is not updated when its GAN, AC and DRAGAN terms are all disabled.
 *
 * With a non-empty out_dir writes metrics.csv, config.json,
 * generator.ckpt, discriminator.ckpt and checkpoints/<kind>_<iter>.ckpt at
 * the configured cadence. Throws NonFiniteLoss on the first non-finite term.
 */
TrainResult train(const TrainConfig& c, const Dataset& data, const std::filesystem::path& out_dir = {},
                  const std::function<void(const MetricsRow&)>& on_iteration = {});

/// Generator checkpoint tagged with the generator config fingerprint.
Checkpoint generator_checkpoint(const ParamSet<float>& params, const GeneratorConfig& c,
                                long long iteration);
/// Loads a generator checkpoint, rejecting config or layout mismatches.
ParamSet<float> load_generator(const std::filesystem::path& path, const GeneratorConfig& c);

/// Sketch or edge fields (N, 1, R, R) -> generator pyramid.
std::vector<Var<float>> field_pyramid(Tape<float>& tape, const TensorF& fields, int levels);

/// Standard normal noise (N, noise_dim, 1, 1).
TensorF sample_noise(int n, int noise_dim, std::mt19937_64& rng);

/// Generator output on constant inputs, without gradients.
TensorF generate(const ParamSet<float>& params, const GeneratorConfig& c, const TensorF& fields,
                 const TensorF& noise, std::span<const int> labels);

}  // namespace sketchygan
