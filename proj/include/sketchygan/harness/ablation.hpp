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
#include <span>
#include <string>
#include <vector>

#include "sketchygan/harness/evaluate.hpp"

namespace sketchygan {

/*
 * Variant names:
 *   -GAN   no GAN, AC or DRAGAN terms; the discriminator is never trained
 *   -L-AC  no AC terms; the generator uses plain instance norm (no labels)
 *   -P     no L1 and no perceptual term
 *   -DIV   no diversity term
 *   residual  generator blocks without masks
 */
const std::vector<std::string>& ablation_variants();
TrainConfig apply_variant(TrainConfig base, const std::string& variant);

struct AblationRow {
  std::string variant;
  std::size_t generator_params = 0;
  EvalReport report;
};

/// Trains the base config and each variant with the same seed and data; row 0 is "full".
std::vector<AblationRow> run_ablation(const TrainConfig& base, std::span<const std::string> variants,
                                      const Dataset& data, const EvalClassifier& classifier,
                                      const EvalConfig& eval, const std::filesystem::path& out_dir = {});

std::string format_ablation_table(const std::vector<AblationRow>& rows);

}  // namespace sketchygan
