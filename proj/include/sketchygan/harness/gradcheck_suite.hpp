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

namespace sketchygan {

/// Outcome of one component checked over several random draws (double precision).
struct GradCheckCase {
  std::string name;
  int draws = 0;
  int failures = 0;
  double worst = 0.0;
  std::size_t probed = 0;
  std::size_t skipped = 0;

  bool passed() const { return draws > 0 && failures == 0; }
};

/*
 * Finite-difference checks (eps 1e-5, tolerance 1e-4) of conv2d,
 * cond_instance_norm, every block variant, the generator, the discriminator
 * and every loss, each on small random inputs and parameters.
 */
std::vector<GradCheckCase> run_gradcheck_suite(int draws = 10, std::uint64_t seed = 0);

}  // namespace sketchygan
