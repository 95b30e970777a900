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
#include <filesystem>
#include <map>
#include <string>

#include "sketchygan/model/losses.hpp"
#include "sketchygan/model/networks.hpp"
#include "sketchygan/train/schedule.hpp"

namespace sketchygan {

struct ScheduleConfig {
  ScheduleMode mode = ScheduleMode::kRamp;
  double lambda = 1.0;
  /// 0 means the run's iteration count.
  long long i_max = 0;
  double pretrain_fraction = 0.5;
};

struct TrainConfig {
  long long iterations = 2000;
  int batch = 8;
  double lr_g = 1e-4;
  double lr_d = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::uint64_t seed = 0;
  bool flip = true;
  /// Intermediate checkpoint cadence in iterations; 0 keeps only the final one.
  long long checkpoint_every = 0;
  std::uint64_t feature_seed = 0x5eed;
  ScheduleConfig schedule;
  LossWeights loss;
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;
};

/// Frozen evaluation classifier and the generated-sample evaluation.
struct EvalConfig {
  std::uint64_t seed = 7;
  int batch = 8;
  long long classifier_iterations = 600;
  int classifier_batch = 32;
  double classifier_lr = 1e-3;
};

struct ClassifyConfig {
  long long iterations = 2000;
  int batch = 16;
  double lr = 1e-3;
  ClassifierConfig network;
  /// Allowed relative parameter-count gap of the residual baseline.
  double match_tolerance = 0.05;
};

struct ExperimentConfig {
  TrainConfig train;
  EvalConfig eval;
  ClassifyConfig classify;
};

void validate(const TrainConfig& c);
void validate(const ExperimentConfig& c);

/// Dotted key -> JSON-encoded value, e.g. "loss.enable.diversity" -> "false".
using FlatConfig = std::map<std::string, std::string>;

/// Nested objects become dotted keys. Throws on malformed JSON or non-object roots.
FlatConfig flatten_json(const std::string& text);
FlatConfig read_config_file(const std::filesystem::path& path);

/*
 * Applies keys on top of c. Keys are grouped as train.*, schedule.*, loss.*
 * (loss.enable.<term> for switches), generator.*, discriminator.*, eval.*
 * and classify.*. Unknown keys and ill-typed values throw
 * std::invalid_argument naming the key.
 */
void apply_config(ExperimentConfig& c, const FlatConfig& values);

/// Parses "key=value" with value read as JSON, falling back to a bare string.
std::pair<std::string, std::string> parse_override(const std::string& assignment);

/// Every key with its current value; apply_config(c, to_flat(c)) reproduces c.
FlatConfig to_flat(const ExperimentConfig& c);
std::string to_json(const FlatConfig& flat);

/// Canonical text of the generator section, stored in checkpoints.
std::string generator_fingerprint(const GeneratorConfig& c);

}  // namespace sketchygan
