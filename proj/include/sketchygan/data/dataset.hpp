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
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sketchygan/core/tensor.hpp"
#include "sketchygan/data/synth.hpp"
#include "sketchygan/train/schedule.hpp"

namespace sketchygan {

enum class Split { kTrain, kTest };

std::string to_string(Split s);
Split parse_split(const std::string& s);

/// File paths are relative to the manifest's directory.
struct ManifestEntry {
  std::string id;
  int label = 0;
  Split split = Split::kTrain;
  std::string photo;
  std::string edge;
  std::string sketch;

  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;

  const ManifestEntry& find(const std::string& id) const;
  std::vector<std::string> ids(Split split) const;
  int classes() const;
};

/// JSON lines: {"id","label","split","photo","edge","sketch"} per record.
void write_manifest(const std::filesystem::path& path, const Manifest& m);
/// Rejects duplicate ids and malformed records (with the line number).
Manifest read_manifest(const std::filesystem::path& path);

struct CorpusOptions {
  int classes = kShapeClasses;
  int per_class = 100;
  int resolution = 32;
  std::uint64_t seed = 0;
  SynthOptions synth;
};

/// Per-sample seed derived from the corpus seed, label and index.
std::uint64_t sample_seed(std::uint64_t corpus_seed, int label, int index);

/*
 * Renders classes x per_class samples into out_dir/{photo,edge,sketch}/ and
 * writes out_dir/manifest.jsonl. One tenth of each class (at least one
 * sample) goes to the test split.
 */
Manifest build_corpus(const std::filesystem::path& out_dir, const CorpusOptions& options);

/// Renders sample (label, index) exactly as build_corpus does.
PairedSample render_corpus_sample(const CorpusOptions& options, int label, int index);

PairedSample load_sample(const Manifest& m, const ManifestEntry& e);

struct Batch {
  TensorF fields;  // (N, 1, R, R) in [0, 1]
  TensorF photos;  // (N, 3, R, R) in [-1, 1]
  std::vector<int> labels;
};

/// Field per slot chosen by its source flag. Reads files on every call.
Batch load_batch(const Manifest& m, std::span<const std::string> ids, std::span<const Source> sources);

/// Manifest with every sample decoded once and held in memory.
class Dataset {
 public:
  explicit Dataset(Manifest m);

  const Manifest& manifest() const { return manifest_; }
  std::size_t size() const { return samples_.size(); }
  int resolution() const { return resolution_; }
  const PairedSample& sample(std::size_t i) const { return samples_[i]; }
  std::vector<std::size_t> indices(Split split) const;

  /// flips[i] mirrors slot i horizontally (photo and field together); may be empty.
  Batch batch(std::span<const std::size_t> indices, std::span<const Source> sources,
              std::span<const std::uint8_t> flips = {}) const;

 private:
  Manifest manifest_;
  std::vector<PairedSample> samples_;
  int resolution_ = 0;
};

/// Photo as a (1, 3, H, W) tensor in [-1, 1].
TensorF photo_tensor(const RgbImage& photo);
/// Field as a (1, 1, H, W) tensor.
TensorF field_tensor(const DistanceField& field);
/// Inverse of photo_tensor for sample n of a batch.
RgbImage tensor_to_photo(const TensorF& t, int n);

}  // namespace sketchygan
