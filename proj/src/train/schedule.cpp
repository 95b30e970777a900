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


#include "sketchygan/train/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sketchygan {
namespace {

void validate(const ScheduleState& s) {
  if (s.i_max <= 0) throw std::invalid_argument("schedule: i_max must be > 0");
  if (s.i_cur < 0 || s.i_cur > s.i_max) {
    throw std::invalid_argument("schedule: i_cur " + std::to_string(s.i_cur) + " outside [0, " +
                                std::to_string(s.i_max) + "]");
  }
  if (!(s.lambda > 0)) throw std::invalid_argument("schedule: lambda must be > 0");
}

}  // namespace

std::string to_string(ScheduleMode m) {
  return m == ScheduleMode::kRamp ? "ramp" : "pretrain-finetune";
}

ScheduleMode parse_schedule_mode(const std::string& s) {
  if (s == "ramp") return ScheduleMode::kRamp;
  if (s == "pretrain-finetune") return ScheduleMode::kPretrainFinetune;
  throw std::invalid_argument("unknown schedule mode '" + s + "' (expected ramp|pretrain-finetune)");
}

MixRatio mix_ratio(const ScheduleState& s) {
  validate(s);
  const double t = static_cast<double>(s.i_cur) / static_cast<double>(s.i_max);
  const double sketch = 0.1 + std::min(0.8, std::pow(t, s.lambda));
  return {sketch, 1.0 - sketch};
}

MixRatio pretrain_finetune_ratio(const ScheduleState& s, double pretrain_fraction) {
  validate(s);
  if (pretrain_fraction < 0 || pretrain_fraction > 1) {
    throw std::invalid_argument("schedule: pretrain fraction must lie in [0, 1]");
  }
  const bool pretraining = static_cast<double>(s.i_cur) < pretrain_fraction * s.i_max;
  return pretraining ? MixRatio{0.0, 1.0} : MixRatio{1.0, 0.0};
}

std::vector<Source> draw_batch_sources(const MixRatio& ratio, int batch_size, std::mt19937_64& rng) {
  if (batch_size < 1) throw std::invalid_argument("schedule: batch size must be >= 1");
  std::bernoulli_distribution coin(std::clamp(ratio.sketch, 0.0, 1.0));
  std::vector<Source> out(static_cast<std::size_t>(batch_size));
  for (Source& s : out) s = coin(rng) ? Source::kSketch : Source::kEdge;
  return out;
}

std::vector<Source> draw_batch_sources(const ScheduleState& s, int batch_size, std::mt19937_64& rng) {
  return draw_batch_sources(mix_ratio(s), batch_size, rng);
}

}  // namespace sketchygan
