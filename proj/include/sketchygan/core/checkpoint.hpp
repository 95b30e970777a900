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
#include <map>
#include <string>

#include "sketchygan/core/params.hpp"

namespace sketchygan {

/*
 * Checkpoint file layout: one line of JSON
 *   {"format_version":1,"entries":[{"name":..,"shape":[n,c,h,w]},..],
 *    "scalars":{..},"strings":{..}}
 * terminated by '\n', followed by the raw little-endian float32 payload of
 * every entry in header order.
 */
struct Checkpoint {
  ParamSet<float> params;
  std::map<std::string, double> scalars;
  std::map<std::string, std::string> strings;

  bool operator==(const Checkpoint&) const = default;
};

inline constexpr int kCheckpointFormatVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
/// Throws std::runtime_error naming the file on I/O or format errors.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sketchygan
