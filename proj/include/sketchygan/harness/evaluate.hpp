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
#include <string>
#include <vector>

#include "sketchygan/core/checkpoint.hpp"
#include "sketchygan/data/dataset.hpp"
#include "sketchygan/harness/config.hpp"

namespace sketchygan {

/*
 * exp(mean_i KL(p(y|x_i) || p(y))) with p(y) the mean of the rows.
 * probabilities: (N, K, 1, 1), each row a distribution. Throws for N < 2.
 */
double score_analogue(const TensorF& probabilities);

/// Small residual conv net trained on real train photos, then frozen.
class EvalClassifier {
 public:
  EvalClassifier(ClassifierConfig config, ParamSet<float> params);

  static ClassifierConfig network(int resolution, int classes);
  static EvalClassifier fit(const Dataset& data, const EvalConfig& c, int classes);

  const ClassifierConfig& config() const { return config_; }
  const ParamSet<float>& params() const { return params_; }
  TensorF probabilities(const TensorF& photos) const;
  double accuracy(const Dataset& data, Split split) const;

  void save(const std::filesystem::path& path) const;
  static EvalClassifier load(const std::filesystem::path& path);

 private:
  ClassifierConfig config_;
  ParamSet<float> params_;
};

struct EvalReport {
  double score = 1.0;
  /// Fraction of generated test samples the frozen classifier assigns to their label, per class.
  std::vector<double> per_class_accuracy;
  double mean_l1 = 0.0;
  /// Mean |G(x, z1) - G(x, z2)|.
  double diversity = 0.0;
  double wall_clock_seconds = 0.0;
  long long samples = 0;

  bool operator==(const EvalReport&) const = default;
  /// Equality ignoring wall-clock time.
  bool same_metrics(const EvalReport& other) const;
};

std::string to_json(const EvalReport& r);
EvalReport report_from_json(const std::string& text);
void write_report(const std::filesystem::path& path, const EvalReport& r);
EvalReport read_report(const std::filesystem::path& path);

/*
 * Generates every test sample from its sketch field with two noise draws
 * fixed by c.seed, then scores the first draw with the classifier, measures
 * its L1 to the photo and the L1 between the two draws.
 */
EvalReport evaluate(const ParamSet<float>& generator, const GeneratorConfig& g, const Dataset& data,
                    const EvalClassifier& classifier, const EvalConfig& c);

/// Rejects checkpoints whose config or layout differ from g.
EvalReport evaluate(const std::filesystem::path& checkpoint, const GeneratorConfig& g, const Dataset& data,
                    const EvalClassifier& classifier, const EvalConfig& c);

}  // namespace sketchygan
