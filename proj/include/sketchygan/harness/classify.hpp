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
#include <string>
#include <vector>

#include "sketchygan/data/dataset.hpp"
#include "sketchygan/harness/config.hpp"

namespace sketchygan {

struct ClassifierTraining {
  long long iterations = 2000;
  int batch = 16;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};

/// Adam (beta1 0.9) on focal loss with gamma 0, random train photos with flips.
ParamSet<float> train_classifier(const ClassifierConfig& c, const Dataset& data, const ClassifierTraining& t);

/// Softmax rows (N, K, 1, 1) for photos (N, 3, R, R).
TensorF classifier_probabilities(const ParamSet<float>& params, const ClassifierConfig& c, const TensorF& photos);

double classifier_accuracy(const ParamSet<float>& params, const ClassifierConfig& c, const Dataset& data,
                           Split split);

/*
 * Residual baseline for an MRU classifier: the same layout with every
 * channel count scaled by a common factor, chosen so the closed-form
 * parameter count is nearest the MRU one. Throws when the best match is
 * outside the tolerance.
 */
ClassifierConfig matched_residual(const ClassifierConfig& mru, double tolerance);

struct ClassifierRun {
  std::string variant;
  ClassifierConfig config;
  std::size_t params = 0;
  double test_accuracy = 0.0;
};

/// MRU classifiers with both gates and the matched residual baseline.
std::vector<ClassifierRun> classify_mode(const ClassifyConfig& c, std::uint64_t seed, const Dataset& data);

std::string format_classify_table(const std::vector<ClassifierRun>& runs);

}  // namespace sketchygan
