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
#include <random>
#include <string>
#include <vector>

namespace sketchygan {

enum class Source : std::uint8_t { kEdge, kSketch };

enum class ScheduleMode { kRamp, kPretrainFinetune };

std::string to_string(ScheduleMode m);
ScheduleMode parse_schedule_mode(const std::string& s);

struct ScheduleState {
  long long i_cur = 0;
  long long i_max = 1;
  double lambda = 1.0;
};

struct MixRatio {
  double sketch;
  double edge;
};

/// P_sk = 0.1 + min(0.8, (i_cur / i_max)^lambda), P_edge = 1 - P_sk.
MixRatio mix_ratio(const ScheduleState& s);

/*
 * Discrete alternative to the ramp: edges only for the first
 * pretrain_fraction of training, sketches only afterwards.
 */
MixRatio pretrain_finetune_ratio(const ScheduleState& s, double pretrain_fraction = 0.5);

/// One independent Bernoulli(P_sk) draw per slot.
std::vector<Source> draw_batch_sources(const MixRatio& ratio, int batch_size, std::mt19937_64& rng);
std::vector<Source> draw_batch_sources(const ScheduleState& s, int batch_size, std::mt19937_64& rng);

}  // namespace sketchygan
