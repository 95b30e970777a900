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


#include "sketchygan/data/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "sketchygan/augment/png_io.hpp"

namespace sketchygan {
namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string sample_id(int label, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04d", class_name(label).c_str(), index);
  return buf;
}

void copy_sample(const PairedSample& s, Source src, bool flip, int n, Batch& b) {
  const int r = s.photo.width;
  const DistanceField& f = src == Source::kSketch ? s.sketch_field : s.edge_field;
  for (int y = 0; y < r; ++y) {
    for (int x = 0; x < r; ++x) {
      const int sx = flip ? r - 1 - x : x;
      b.fields(n, 0, y, x) = f.at(sx, y);
      for (int c = 0; c < 3; ++c) b.photos(n, c, y, x) = 2.0f * s.photo.at(sx, y, c) - 1.0f;
    }
  }
  b.labels.push_back(s.label);
}

Batch empty_batch(int n, int r) {
  return {TensorF(Shape{n, 1, r, r}), TensorF(Shape{n, 3, r, r}), {}};
}

}  // namespace

std::string to_string(Split s) { return s == Split::kTrain ? "train" : "test"; }

Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "test") return Split::kTest;
  throw std::invalid_argument("unknown split '" + s + "'");
}

const ManifestEntry& Manifest::find(const std::string& id) const {
  for (const ManifestEntry& e : entries) {
    if (e.id == id) return e;
  }
  throw std::invalid_argument("manifest: unknown id '" + id + "'");
}

std::vector<std::string> Manifest::ids(Split split) const {
  std::vector<std::string> out;
  for (const ManifestEntry& e : entries) {
    if (e.split == split) out.push_back(e.id);
  }
  return out;
}

int Manifest::classes() const {
  int k = 0;
  for (const ManifestEntry& e : entries) k = std::max(k, e.label + 1);
  return k;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  for (const ManifestEntry& e : m.entries) {
    const json j = {{"id", e.id},       {"label", e.label}, {"split", to_string(e.split)},
                    {"photo", e.photo}, {"edge", e.edge},   {"sketch", e.sketch}};
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("error writing manifest " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read manifest " + path.string());
  Manifest m;
  m.root = path.parent_path();
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      ManifestEntry e;
      e.id = j.at("id").get<std::string>();
      e.label = j.at("label").get<int>();
      e.split = parse_split(j.at("split").get<std::string>());
      e.photo = j.at("photo").get<std::string>();
      e.edge = j.at("edge").get<std::string>();
      e.sketch = j.at("sketch").get<std::string>();
      if (e.label < 0) throw std::invalid_argument("negative label");
      if (!seen.insert(e.id).second) throw std::invalid_argument("duplicate id '" + e.id + "'");
      m.entries.push_back(std::move(e));
    } catch (const std::exception& ex) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return m;
}

std::uint64_t sample_seed(std::uint64_t corpus_seed, int label, int index) {
  return splitmix64(splitmix64(corpus_seed ^ 0x5ce7c4a11ULL) + static_cast<std::uint64_t>(label) * 0x10001ULL +
                    static_cast<std::uint64_t>(index));
}

PairedSample render_corpus_sample(const CorpusOptions& o, int label, int index) {
  std::mt19937_64 rng(sample_seed(o.seed, label, index));
  const ShapeSpec spec = random_spec(label, o.resolution, rng, o.synth);
  return render_sample(spec, o.resolution, rng, o.synth);
}

Manifest build_corpus(const std::filesystem::path& out_dir, const CorpusOptions& o) {
  if (o.classes < 1 || o.classes > kShapeClasses) {
    throw std::invalid_argument("corpus: classes must lie in [1, " + std::to_string(kShapeClasses) + "]");
  }
  if (o.per_class < 2) throw std::invalid_argument("corpus: need at least 2 samples per class");
  namespace fs = std::filesystem;
  for (const char* sub : {"photo", "edge", "sketch"}) {
    std::error_code ec;
    fs::create_directories(out_dir / sub, ec);
    if (ec) throw std::runtime_error("cannot create " + (out_dir / sub).string() + ": " + ec.message());
  }
  Manifest m;
  m.root = out_dir;
  const int test_count = std::max(1, static_cast<int>(std::lround(o.per_class * 0.1)));
  for (int label = 0; label < o.classes; ++label) {
    std::vector<int> order(static_cast<std::size_t>(o.per_class));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 split_rng(sample_seed(o.seed, label, -1));
    std::shuffle(order.begin(), order.end(), split_rng);
    std::vector<bool> is_test(static_cast<std::size_t>(o.per_class), false);
    for (int i = 0; i < test_count; ++i) is_test[order[i]] = true;

    for (int index = 0; index < o.per_class; ++index) {
      const PairedSample s = render_corpus_sample(o, label, index);
      ManifestEntry e;
      e.id = sample_id(label, index);
      e.label = label;
      e.split = is_test[index] ? Split::kTest : Split::kTrain;
      e.photo = "photo/" + e.id + ".png";
      e.edge = "edge/" + e.id + ".png";
      e.sketch = "sketch/" + e.id + ".png";
      write_png_rgb(out_dir / e.photo, s.photo);
      write_png_field(out_dir / e.edge, s.edge_field);
      write_png_field(out_dir / e.sketch, s.sketch_field);
      m.entries.push_back(std::move(e));
    }
  }
  write_manifest(out_dir / "manifest.jsonl", m);
  return m;
}

PairedSample load_sample(const Manifest& m, const ManifestEntry& e) {
  PairedSample s;
  s.label = e.label;
  s.photo = read_png_rgb(m.root / e.photo);
  s.edge_field = read_png_field(m.root / e.edge);
  s.sketch_field = read_png_field(m.root / e.sketch);
  const int r = s.photo.width;
  for (const DistanceField* f : {&s.edge_field, &s.sketch_field}) {
    if (s.photo.height != r || f->width != r || f->height != r) {
      throw std::runtime_error("sample '" + e.id + "': rasters must be square and share a resolution");
    }
  }
  return s;
}

Batch load_batch(const Manifest& m, std::span<const std::string> ids, std::span<const Source> sources) {
  if (ids.size() != sources.size()) throw std::invalid_argument("load_batch: one source flag per id");
  if (ids.empty()) throw std::invalid_argument("load_batch: empty batch");
  std::vector<PairedSample> samples;
  for (const std::string& id : ids) samples.push_back(load_sample(m, m.find(id)));
  const int r = samples[0].photo.width;
  Batch b = empty_batch(static_cast<int>(ids.size()), r);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].photo.width != r) throw std::runtime_error("load_batch: mixed resolutions");
    copy_sample(samples[i], sources[i], false, static_cast<int>(i), b);
  }
  return b;
}

Dataset::Dataset(Manifest m) : manifest_(std::move(m)) {
  if (manifest_.entries.empty()) throw std::invalid_argument("dataset: manifest is empty");
  for (const ManifestEntry& e : manifest_.entries) {
    samples_.push_back(load_sample(manifest_, e));
    if (resolution_ == 0) resolution_ = samples_.back().photo.width;
    if (samples_.back().photo.width != resolution_) {
      throw std::runtime_error("dataset: sample '" + e.id + "' has a different resolution");
    }
  }
}

std::vector<std::size_t> Dataset::indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < manifest_.entries.size(); ++i) {
    if (manifest_.entries[i].split == split) out.push_back(i);
  }
  return out;
}

Batch Dataset::batch(std::span<const std::size_t> idx, std::span<const Source> sources,
                     std::span<const std::uint8_t> flips) const {
  if (idx.size() != sources.size()) throw std::invalid_argument("batch: one source flag per index");
  if (!flips.empty() && flips.size() != idx.size()) throw std::invalid_argument("batch: one flip flag per index");
  if (idx.empty()) throw std::invalid_argument("batch: empty batch");
  Batch b = empty_batch(static_cast<int>(idx.size()), resolution_);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= samples_.size()) throw std::out_of_range("batch: sample index out of range");
    copy_sample(samples_[idx[i]], sources[i], !flips.empty() && flips[i] != 0, static_cast<int>(i), b);
  }
  return b;
}

TensorF photo_tensor(const RgbImage& photo) {
  TensorF t(Shape{1, 3, photo.height, photo.width});
  for (int y = 0; y < photo.height; ++y) {
    for (int x = 0; x < photo.width; ++x) {
      for (int c = 0; c < 3; ++c) t(0, c, y, x) = 2.0f * photo.at(x, y, c) - 1.0f;
    }
  }
  return t;
}

TensorF field_tensor(const DistanceField& field) {
  TensorF t(Shape{1, 1, field.height, field.width});
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) t(0, 0, y, x) = field.at(x, y);
  }
  return t;
}

RgbImage tensor_to_photo(const TensorF& t, int n) {
  const Shape s = t.shape();
  if (s.c != 3 || n < 0 || n >= s.n) throw std::invalid_argument("tensor_to_photo: expected (N, 3, H, W)");
  RgbImage img(s.w, s.h);
  for (int y = 0; y < s.h; ++y) {
    for (int x = 0; x < s.w; ++x) {
      for (int c = 0; c < 3; ++c) {
        img.at(x, y, c) = std::clamp(0.5f * (t(n, c, y, x) + 1.0f), 0.0f, 1.0f);
      }
    }
  }
  return img;
}

}  // namespace sketchygan
