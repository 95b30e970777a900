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

// Command-line front end: corpus synthesis, preprocessing, training,
// evaluation, ablations, classifier comparison, gradient checks and samples.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sketchygan/augment/pipeline.hpp"
#include "sketchygan/augment/png_io.hpp"
#include "sketchygan/harness/ablation.hpp"
#include "sketchygan/harness/classify.hpp"
#include "sketchygan/harness/gradcheck_suite.hpp"
#include "sketchygan/harness/train.hpp"

namespace fs = std::filesystem;
using namespace sketchygan;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
};

ExperimentConfig load_config(const Globals& g) {
  ExperimentConfig c;
  if (!g.config.empty()) apply_config(c, read_config_file(g.config));
  FlatConfig extra;
  for (const auto& o : g.overrides) extra.insert_or_assign(parse_override(o).first, parse_override(o).second);
  apply_config(c, extra);
  if (g.seed) c.train.seed = *g.seed;
  validate(c);
  return c;
}

fs::path require_out(const Globals& g) {
  if (g.out.empty()) throw std::invalid_argument("--out is required for this command");
  fs::create_directories(g.out);
  return g.out;
}

Dataset open_data(const std::string& manifest) { return Dataset(read_manifest(manifest)); }

EvalClassifier eval_classifier(const std::string& path, const Dataset& data, const ExperimentConfig& c,
                               const fs::path& out) {
  if (!path.empty()) return EvalClassifier::load(path);
  std::cerr << "training the evaluation classifier (" << c.eval.classifier_iterations << " iterations)\n";
  EvalClassifier clf = EvalClassifier::fit(data, c.eval, c.train.generator.classes);
  clf.save(out / "eval_classifier.ckpt");
  std::cerr << "evaluation classifier test accuracy " << clf.accuracy(data, Split::kTest) << '\n';
  return clf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int run_synth(const Globals& g, const CorpusOptions& o) {
  CorpusOptions opts = o;
  if (g.seed) opts.seed = *g.seed;
  const Manifest m = build_corpus(require_out(g), opts);
  std::cout << "wrote " << m.entries.size() << " samples (" << m.ids(Split::kTrain).size() << " train, "
            << m.ids(Split::kTest).size() << " test) to " << (fs::path(g.out) / "manifest.jsonl").string() << '\n';
  return 0;
}

struct AugmentArgs {
  std::string input, output, manifest, id, split = "train";
  int label = 0;
  bool edges = false;
  AugmentConfig config;
  bool cap_set = false;
};

int run_augment(const AugmentArgs& a) {
  DistanceField field;
  if (a.edges) {
    const GrayImage in = read_png_gray(a.input);
    AugmentConfig c = a.config;
    if (!a.cap_set) c.cap = AugmentConfig::for_resolution(in.width).cap;
    field = augment_pipeline(in, c);
  } else {
    const RgbImage in = read_png_rgb(a.input);
    AugmentConfig c = a.config;
    if (!a.cap_set) c.cap = AugmentConfig::for_resolution(in.width).cap;
    field = augment_pipeline(in, c);
  }
  write_png_field(a.output, field);
  if (!a.manifest.empty()) {
    if (a.id.empty()) throw std::invalid_argument("--id is required with --manifest");
    Manifest m;
    m.root = fs::path(a.manifest).parent_path();
    if (fs::exists(a.manifest)) m = read_manifest(a.manifest);
    const fs::path root = m.root.empty() ? fs::path(".") : m.root;
    const std::string out_rel = fs::relative(fs::absolute(a.output), fs::absolute(root)).generic_string();
    const std::string in_rel = fs::relative(fs::absolute(a.input), fs::absolute(root)).generic_string();
    ManifestEntry e{a.id, a.label, parse_split(a.split), a.edges ? "" : in_rel, out_rel, out_rel};
    bool replaced = false;
    for (auto& old : m.entries) {
      if (old.id == a.id) {
        old = e;
        replaced = true;
      }
    }
    if (!replaced) m.entries.push_back(e);
    write_manifest(a.manifest, m);
  }
  std::cout << "wrote " << a.output << '\n';
  return 0;
}

int run_train(const Globals& g, const std::string& data_path, int log_every) {
  const ExperimentConfig c = load_config(g);
  const Dataset data = open_data(data_path);
  const fs::path out = require_out(g);
  const TrainResult r = train(c.train, data, out, [&](const MetricsRow& row) {
    if (log_every > 0 && (row.iteration % log_every == 0 || row.iteration + 1 == c.train.iterations)) {
      std::cerr << "iter " << row.iteration << " p_sketch " << row.p_sketch << " d " << row.d_total << " g "
                << row.g_total << " l1 " << row.g_l1 << '\n';
    }
  });
  std::cout << "trained " << r.g_updates << " G / " << r.d_updates << " D updates; checkpoints in " << out.string()
            << '\n';
  return 0;
}

int run_eval(const Globals& g, const std::string& data_path, std::string checkpoint, const std::string& classifier) {
  const ExperimentConfig c = load_config(g);
  const Dataset data = open_data(data_path);
  const fs::path out = require_out(g);
  if (checkpoint.empty()) checkpoint = (out / "generator.ckpt").string();
  const EvalClassifier clf = eval_classifier(classifier, data, c, out);
  const EvalReport r = evaluate(checkpoint, c.train.generator, data, clf, c.eval);
  write_report(out / "report.json", r);
  std::cout << to_json(r) << '\n';
  return 0;
}

int run_ablate(const Globals& g, const std::string& data_path, std::vector<std::string> variants,
               const std::string& classifier) {
  const ExperimentConfig c = load_config(g);
  const Dataset data = open_data(data_path);
  const fs::path out = require_out(g);
  const EvalClassifier clf = eval_classifier(classifier, data, c, out);
  const auto rows = run_ablation(c.train, variants, data, clf, c.eval, out);
  const std::string table = format_ablation_table(rows);
  write_text(out / "ablation.md", table);
  std::cout << table;
  return 0;
}

int run_classify(const Globals& g, const std::string& data_path) {
  const ExperimentConfig c = load_config(g);
  const Dataset data = open_data(data_path);
  const auto runs = classify_mode(c.classify, c.train.seed, data);
  const std::string table = format_classify_table(runs);
  if (!g.out.empty()) write_text(require_out(g) / "classify.md", table);
  std::cout << table;
  return 0;
}

int run_gradcheck(const Globals& g, int draws) {
  bool ok = true;
  for (const auto& c : run_gradcheck_suite(draws, g.seed.value_or(0))) {
    std::printf("%-4s %-45s %d/%d draws, worst rel. error %.2e, %zu/%zu probes skipped\n",
                c.passed() ? "PASS" : "FAIL", c.name.c_str(), c.draws - c.failures, c.draws, c.worst, c.skipped,
                c.probed + c.skipped);
    ok = ok && c.passed();
  }
  return ok ? 0 : 1;
}

int run_sample(const Globals& g, const std::string& data_path, std::string checkpoint, int count,
               const std::string& split) {
  const ExperimentConfig c = load_config(g);
  const Dataset data = open_data(data_path);
  const fs::path out = require_out(g);
  if (checkpoint.empty()) checkpoint = (out / "generator.ckpt").string();
  const GeneratorConfig& gc = c.train.generator;
  const ParamSet<float> params = load_generator(checkpoint, gc);
  std::vector<std::size_t> idx = data.indices(parse_split(split));
  if (idx.empty()) throw std::invalid_argument("split '" + split + "' is empty");
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(count)));
  const int n = static_cast<int>(idx.size());
  const Batch b = data.batch(idx, std::vector<Source>(n, Source::kSketch));
  std::mt19937_64 rng(c.train.seed);
  const TensorF g1 = generate(params, gc, b.fields, sample_noise(n, gc.noise_dim, rng), b.labels);
  const TensorF g2 = generate(params, gc, b.fields, sample_noise(n, gc.noise_dim, rng), b.labels);
  // Columns: sketch field, generation with z1, generation with z2, ground truth.
  const int r = data.resolution();
  RgbImage grid(4 * r, n * r, 1.0f);
  for (int s = 0; s < n; ++s) {
    const RgbImage cols[3] = {tensor_to_photo(g1, s), tensor_to_photo(g2, s), tensor_to_photo(b.photos, s)};
    for (int y = 0; y < r; ++y) {
      for (int x = 0; x < r; ++x) {
        for (int ch = 0; ch < 3; ++ch) {
          grid.at(x, s * r + y, ch) = b.fields(s, 0, y, x);
          for (int k = 0; k < 3; ++k) grid.at((k + 1) * r + x, s * r + y, ch) = cols[k].at(x, y, ch);
        }
      }
    }
  }
  write_png_rgb(out / "samples.png", grid);
  std::cout << "wrote " << (out / "samples.png").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketch-to-image GAN with masked residual units, at desk scale"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "JSON config file (nested objects or dotted keys)")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides train.seed)");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--set", g.overrides, "Config override key=value (repeatable)");

  CorpusOptions corpus;
  auto* synth = app.add_subcommand("synth-data", "Render a synthetic paired corpus");
  synth->add_option("--classes", corpus.classes, "Shape classes (1-4)");
  synth->add_option("--per-class", corpus.per_class, "Samples per class");
  synth->add_option("--resolution", corpus.resolution, "Image side in pixels");
  synth->add_option("--jitter-fraction", corpus.synth.jitter_fraction, "Sketch jitter as a fraction of shape scale");

  AugmentArgs aug;
  auto* augment = app.add_subcommand("augment", "Edge map or photo PNG -> 16-bit distance-field PNG");
  augment->add_option("--input", aug.input, "Input PNG")->required()->check(CLI::ExistingFile);
  augment->add_option("--output", aug.output, "Output PNG")->required();
  augment->add_flag("--edges", aug.edges, "Input is an edge-probability map (skip edge detection)");
  augment->add_option("--threshold", aug.config.threshold, "Binarization threshold");
  augment->add_option("--min-component", aug.config.min_component, "Smallest kept component (pixels)");
  augment->add_option("--erode-k", aug.config.erode_k, "Erosion neighbour threshold");
  augment->add_option("--spur-len", aug.config.spur_len, "Longest removed spur (pixels)");
  auto* cap_opt = augment->add_option("--cap", aug.config.cap, "Distance truncation (pixels)");
  augment->add_option("--manifest", aug.manifest, "Manifest to add or update a record in");
  augment->add_option("--id", aug.id, "Record id");
  augment->add_option("--label", aug.label, "Record label");
  augment->add_option("--split", aug.split, "Record split (train|test)");

  std::string data, checkpoint, classifier, split = "test";
  int log_every = 50, draws = 10, count = 8;
  std::vector<std::string> variants = ablation_variants();

  auto* train_cmd = app.add_subcommand("train", "Train generator and discriminator");
  train_cmd->add_option("--data", data, "Corpus manifest")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--log-every", log_every, "Progress line cadence (0 = quiet)");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a generator checkpoint on the test split");
  eval_cmd->add_option("--data", data, "Corpus manifest")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--checkpoint", checkpoint, "Generator checkpoint (default <out>/generator.ckpt)");
  eval_cmd->add_option("--classifier", classifier, "Frozen evaluation classifier (trained if omitted)");

  auto* ablate_cmd = app.add_subcommand("ablate", "Train and evaluate term-removal variants");
  ablate_cmd->add_option("--data", data, "Corpus manifest")->required()->check(CLI::ExistingFile);
  ablate_cmd->add_option("--variants", variants, "Variants: -GAN -L-AC -P -DIV residual")->allow_extra_args();
  ablate_cmd->add_option("--classifier", classifier, "Frozen evaluation classifier (trained if omitted)");

  auto* classify_cmd = app.add_subcommand("classify", "Compare MRU gates and a residual baseline as classifiers");
  classify_cmd->add_option("--data", data, "Corpus manifest")->required()->check(CLI::ExistingFile);

  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference checks of every differentiable component");
  grad_cmd->add_option("--draws", draws, "Random draws per component");

  auto* sample_cmd = app.add_subcommand("sample", "Write a sketch / z1 / z2 / ground-truth image grid");
  sample_cmd->add_option("--data", data, "Corpus manifest")->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--checkpoint", checkpoint, "Generator checkpoint (default <out>/generator.ckpt)");
  sample_cmd->add_option("--count", count, "Rows");
  sample_cmd->add_option("--split", split, "Split to draw from");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed;
  aug.cap_set = static_cast<bool>(*cap_opt);
  try {
    if (*synth) return run_synth(g, corpus);
    if (*augment) return run_augment(aug);
    if (*train_cmd) return run_train(g, data, log_every);
    if (*eval_cmd) return run_eval(g, data, checkpoint, classifier);
    if (*ablate_cmd) return run_ablate(g, data, variants, classifier);
    if (*classify_cmd) return run_classify(g, data);
    if (*grad_cmd) return run_gradcheck(g, draws);
    if (*sample_cmd) return run_sample(g, data, checkpoint, count, split);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
