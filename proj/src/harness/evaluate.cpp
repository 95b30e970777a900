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

#include "sketchygan/harness/evaluate.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sketchygan/harness/classify.hpp"
#include "sketchygan/harness/train.hpp"

namespace sketchygan {
namespace {

using nlohmann::json;

constexpr double kRowTolerance = 1e-4;

}  // namespace

double score_analogue(const TensorF& p) {
  const Shape s = p.shape();
  if (s.n < 2) throw std::invalid_argument("score_analogue: needs at least 2 samples, got " + std::to_string(s.n));
  const int k = static_cast<int>(s.per_sample());
  std::vector<double> marginal(k, 0.0);
  for (int n = 0; n < s.n; ++n) {
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
      const double v = p.sample(n)[j];
      if (!(v >= 0.0)) throw std::invalid_argument("score_analogue: negative or NaN probability");
      total += v;
      marginal[j] += v;
    }
    if (std::abs(total - 1.0) > kRowTolerance) throw std::invalid_argument("score_analogue: row does not sum to 1");
  }
  for (double& m : marginal) m /= s.n;
  double kl = 0.0;
  for (int n = 0; n < s.n; ++n) {
    for (int j = 0; j < k; ++j) {
      const double v = p.sample(n)[j];
      if (v > 0.0) kl += v * (std::log(v) - std::log(marginal[j]));
    }
  }
  return std::exp(std::max(0.0, kl / s.n));
}

EvalClassifier::EvalClassifier(ClassifierConfig config, ParamSet<float> params)
    : config_(std::move(config)), params_(std::move(params)) {
  if (!params_.same_layout(init_classifier(config_, 0))) {
    throw std::invalid_argument("EvalClassifier: parameters do not match the network");
  }
}

ClassifierConfig EvalClassifier::network(int resolution, int classes) {
  ClassifierConfig c;
  c.resolution = resolution;
  c.classes = classes;
  c.channels = {16, 32, 64};
  c.block = BlockKind::kResidual;
  c.depth = 1;
  return c;
}

EvalClassifier EvalClassifier::fit(const Dataset& data, const EvalConfig& c, int classes) {
  const ClassifierConfig net = network(data.resolution(), classes);
  const ClassifierTraining t{c.classifier_iterations, c.classifier_batch, c.classifier_lr, c.seed};
  return EvalClassifier(net, train_classifier(net, data, t));
}

TensorF EvalClassifier::probabilities(const TensorF& photos) const {
  return classifier_probabilities(params_, config_, photos);
}

double EvalClassifier::accuracy(const Dataset& data, Split split) const {
  return classifier_accuracy(params_, config_, data, split);
}

void EvalClassifier::save(const std::filesystem::path& path) const {
  Checkpoint ck;
  ck.params = params_;
  ck.strings["kind"] = "eval-classifier";
  ck.scalars["resolution"] = config_.resolution;
  ck.scalars["classes"] = config_.classes;
  save_checkpoint(path, ck);
}

EvalClassifier EvalClassifier::load(const std::filesystem::path& path) {
  Checkpoint ck = load_checkpoint(path);
  const auto kind = ck.strings.find("kind");
  if (kind == ck.strings.end() || kind->second != "eval-classifier") {
    throw std::invalid_argument(path.string() + ": not an evaluation classifier checkpoint");
  }
  return EvalClassifier(network(static_cast<int>(ck.scalars.at("resolution")),
                                static_cast<int>(ck.scalars.at("classes"))),
                        std::move(ck.params));
}

bool EvalReport::same_metrics(const EvalReport& o) const {
  return score == o.score && per_class_accuracy == o.per_class_accuracy && mean_l1 == o.mean_l1 &&
         diversity == o.diversity && samples == o.samples;
}

std::string to_json(const EvalReport& r) {
  json j;
  j["score"] = r.score;
  j["per_class_accuracy"] = r.per_class_accuracy;
  j["mean_l1"] = r.mean_l1;
  j["diversity"] = r.diversity;
  j["wall_clock_seconds"] = r.wall_clock_seconds;
  j["samples"] = r.samples;
  return j.dump(2);
}

EvalReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    EvalReport r;
    r.score = j.at("score").get<double>();
    r.per_class_accuracy = j.at("per_class_accuracy").get<std::vector<double>>();
    r.mean_l1 = j.at("mean_l1").get<double>();
    r.diversity = j.at("diversity").get<double>();
    r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    r.samples = j.at("samples").get<long long>();
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("eval report: ") + e.what());
  }
}

void write_report(const std::filesystem::path& path, const EvalReport& r) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(r) << '\n';
}

EvalReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return report_from_json(text.str());
}

EvalReport evaluate(const ParamSet<float>& generator, const GeneratorConfig& g, const Dataset& data,
                    const EvalClassifier& classifier, const EvalConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  if (c.batch < 1) throw std::invalid_argument("evaluate: batch must be >= 1");
  const std::vector<std::size_t> all = data.indices(Split::kTest);
  if (all.size() < 2) throw std::invalid_argument("evaluate: test split needs at least 2 samples");
  const int classes = classifier.config().classes;
  std::mt19937_64 rng(c.seed);
  TensorF probs(Shape{static_cast<int>(all.size()), classes, 1, 1});
  std::vector<double> hits(classes, 0.0), counts(classes, 0.0);
  double l1 = 0.0, div = 0.0;
  std::size_t elements = 0;
  for (std::size_t begin = 0; begin < all.size(); begin += c.batch) {
    const std::size_t end = std::min(all.size(), begin + c.batch);
    const std::span<const std::size_t> idx(all.data() + begin, end - begin);
    const int n = static_cast<int>(idx.size());
    const Batch b = data.batch(idx, std::vector<Source>(n, Source::kSketch));
    const TensorF z1 = sample_noise(n, g.noise_dim, rng);
    const TensorF z2 = sample_noise(n, g.noise_dim, rng);
    const TensorF g1 = generate(generator, g, b.fields, z1, b.labels);
    const TensorF g2 = generate(generator, g, b.fields, z2, b.labels);
    for (std::size_t i = 0; i < g1.size(); ++i) {
      l1 += std::abs(static_cast<double>(g1[i]) - b.photos[i]);
      div += std::abs(static_cast<double>(g1[i]) - g2[i]);
    }
    elements += g1.size();
    const TensorF p = classifier.probabilities(g1);
    for (int i = 0; i < n; ++i) {
      int best = 0;
      for (int k = 0; k < classes; ++k) {
        probs(static_cast<int>(begin) + i, k, 0, 0) = p(i, k, 0, 0);
        best = p(i, k, 0, 0) > p(i, best, 0, 0) ? k : best;
      }
      counts[b.labels[i]] += 1.0;
      hits[b.labels[i]] += best == b.labels[i];
    }
  }
  EvalReport r;
  r.score = score_analogue(probs);
  for (int k = 0; k < classes; ++k) r.per_class_accuracy.push_back(counts[k] > 0 ? hits[k] / counts[k] : 0.0);
  r.mean_l1 = l1 / static_cast<double>(elements);
  r.diversity = div / static_cast<double>(elements);
  r.samples = static_cast<long long>(all.size());
  r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

EvalReport evaluate(const std::filesystem::path& checkpoint, const GeneratorConfig& g, const Dataset& data,
                    const EvalClassifier& classifier, const EvalConfig& c) {
  return evaluate(load_generator(checkpoint, g), g, data, classifier, c);
}

}  // namespace sketchygan
