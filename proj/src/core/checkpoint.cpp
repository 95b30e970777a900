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

#include "sketchygan/core/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace sketchygan {
namespace {

using nlohmann::json;

std::uint32_t to_le(std::uint32_t x) {
  if constexpr (std::endian::native == std::endian::little) {
    return x;
  } else {
    return ((x & 0xffu) << 24) | ((x & 0xff00u) << 8) | ((x >> 8) & 0xff00u) | (x >> 24);
  }
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error("checkpoint " + path.string() + ": " + what);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  json header;
  header["format_version"] = kCheckpointFormatVersion;
  json entries = json::array();
  for (std::size_t i = 0; i < checkpoint.params.size(); ++i) {
    const Shape& s = checkpoint.params.tensor(i).shape();
    entries.push_back({{"name", checkpoint.params.name(i)}, {"shape", {s.n, s.c, s.h, s.w}}});
  }
  header["entries"] = entries;
  header["scalars"] = checkpoint.scalars;
  header["strings"] = checkpoint.strings;

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(path, "cannot open for writing");
  out << header.dump() << '\n';
  std::vector<std::uint32_t> buffer;
  for (std::size_t i = 0; i < checkpoint.params.size(); ++i) {
    const TensorF& t = checkpoint.params.tensor(i);
    buffer.resize(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) buffer[j] = to_le(std::bit_cast<std::uint32_t>(t[j]));
    out.write(reinterpret_cast<const char*>(buffer.data()),
              static_cast<std::streamsize>(buffer.size() * sizeof(std::uint32_t)));
  }
  if (!out) fail(path, "write failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) fail(path, "missing header line");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    fail(path, std::string("malformed header: ") + e.what());
  }
  if (header.value("format_version", -1) != kCheckpointFormatVersion) {
    fail(path, "unsupported format_version");
  }
  Checkpoint cp;
  try {
    cp.scalars = header.value("scalars", json::object()).get<std::map<std::string, double>>();
    cp.strings = header.value("strings", json::object()).get<std::map<std::string, std::string>>();
    std::vector<std::uint32_t> buffer;
    for (const json& e : header.at("entries")) {
      const auto dims = e.at("shape").get<std::vector<int>>();
      if (dims.size() != 4) fail(path, "entry shape must have 4 extents");
      const Shape shape{dims[0], dims[1], dims[2], dims[3]};
      buffer.resize(shape.size());
      in.read(reinterpret_cast<char*>(buffer.data()),
              static_cast<std::streamsize>(buffer.size() * sizeof(std::uint32_t)));
      if (static_cast<std::size_t>(in.gcount()) != buffer.size() * sizeof(std::uint32_t)) {
        fail(path, "truncated payload for " + e.at("name").get<std::string>());
      }
      TensorF t(shape);
      for (std::size_t j = 0; j < t.size(); ++j) t[j] = std::bit_cast<float>(to_le(buffer[j]));
      cp.params.add(e.at("name").get<std::string>(), std::move(t));
    }
  } catch (const json::exception& e) {
    fail(path, std::string("malformed header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  if (in.peek() != std::char_traits<char>::eof()) fail(path, "trailing bytes after payload");
  return cp;
}

}  // namespace sketchygan
