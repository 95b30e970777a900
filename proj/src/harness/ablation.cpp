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

#include "sketchygan/harness/ablation.hpp"

#include <cstdio>
#include <sstream>

#include "sketchygan/harness/train.hpp"

namespace sketchygan {

const std::vector<std::string>& ablation_variants() {
  static const std::vector<std::string> names = {"-GAN", "-L-AC", "-P", "-DIV", "residual"};
  return names;
}

TrainConfig apply_variant(TrainConfig c, const std::string& v) {
  LossSwitches& e = c.loss.enable;
  if (v == "-GAN") {
    e.gan = e.ac = e.dragan = false;
  } else if (v == "-L-AC") {
    e.ac = false;
    c.generator.conditional = false;
  } else if (v == "-P") {
    e.l1 = e.perceptual = false;
  } else if (v == "-DIV") {
    e.diversity = false;
  } else if (v == "residual") {
    c.generator.block = BlockKind::kResidual;
  } else {
    throw std::invalid_argument("unknown ablation variant '" + v + "'");
  }
  return c;
}

std::vector<AblationRow> run_ablation(const TrainConfig& base, std::span<const std::string> variants,
                                      const Dataset& data, const EvalClassifier& classifier,
                                      const EvalConfig& eval, const std::filesystem::path& out_dir) {
  std::vector<std::pair<std::string, TrainConfig>> runs = {{"full", base}};
  for (const auto& v : variants) runs.emplace_back(v, apply_variant(base, v));
  for (const auto& [name, config] : runs) validate(config);
  std::vector<AblationRow> rows;
  for (const auto& [name, config] : runs) {
    const auto dir = out_dir.empty() ? out_dir : out_dir / name;
    const TrainResult r = train(config, data, dir);
    rows.push_back({name, r.generator.count(), evaluate(r.generator, config.generator, data, classifier, eval)});
  }
  return rows;
}

std::string format_ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "| variant | G params | score | mean L1 | diversity | mean class accuracy |\n"
      << "|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    double acc = 0.0;
    for (double a : r.report.per_class_accuracy) acc += a;
    if (!r.report.per_class_accuracy.empty()) acc /= static_cast<double>(r.report.per_class_accuracy.size());
    char line[256];
    std::snprintf(line, sizeof line, "| %s | %zu | %.4f | %.4f | %.4f | %.4f |\n", r.variant.c_str(),
                  r.generator_params, r.report.score, r.report.mean_l1, r.report.diversity, acc);
    out << line;
  }
  return out.str();
}

}  // namespace sketchygan
