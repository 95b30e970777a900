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

#include "sketchygan/harness/classify.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "sketchygan/core/adam.hpp"

namespace sketchygan {
namespace {

constexpr int kEvalChunk = 64;

Batch photo_batch(const Dataset& data, std::span<const std::size_t> idx, std::span<const std::uint8_t> flips) {
  return data.batch(idx, std::vector<Source>(idx.size(), Source::kEdge), flips);
}

}  // namespace

ParamSet<float> train_classifier(const ClassifierConfig& c, const Dataset& data, const ClassifierTraining& t) {
  if (t.iterations < 1 || t.batch < 1 || !(t.lr > 0.0)) {
    throw std::invalid_argument("train_classifier: iterations, batch and lr must be positive");
  }
  if (data.resolution() != c.resolution) {
    throw std::invalid_argument("train_classifier: corpus resolution differs from the classifier's");
  }
  std::mt19937_64 rng(t.seed);
  ParamSet<float> p = init_classifier(c, rng());
  AdamState<float> opt = make_adam_state(p, 0.9, 0.999);
  const std::vector<std::size_t> pool = data.indices(Split::kTrain);
  if (pool.empty()) throw std::invalid_argument("train_classifier: empty train split");
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::size_t> idx(t.batch);
  std::vector<std::uint8_t> flips(t.batch);
  for (long long it = 0; it < t.iterations; ++it) {
    for (int i = 0; i < t.batch; ++i) {
      idx[i] = pool[pick(rng)];
      flips[i] = coin(rng);
    }
    const Batch b = photo_batch(data, idx, flips);
    Tape<float> tape;
    Bound<float> bound(tape, p, true);
    const Var<float> loss = focal_loss(classifier_forward(tape.constant(b.photos), bound, c), b.labels, 0.0);
    if (!std::isfinite(loss.value()[0])) {
      throw std::runtime_error("train_classifier: non-finite loss at iteration " + std::to_string(it));
    }
    tape.backward(loss);
    adam_step(p, bound.gradients(), opt, t.lr);
  }
  return p;
}

TensorF classifier_probabilities(const ParamSet<float>& params, const ClassifierConfig& c, const TensorF& photos) {
  Tape<float> tape;
  Bound<float> bound(tape, params, false);
  return softmax(classifier_forward(tape.constant(photos), bound, c)).value();
}

double classifier_accuracy(const ParamSet<float>& params, const ClassifierConfig& c, const Dataset& data,
                           Split split) {
  const std::vector<std::size_t> all = data.indices(split);
  if (all.empty()) throw std::invalid_argument("classifier_accuracy: empty split");
  std::size_t correct = 0;
  for (std::size_t begin = 0; begin < all.size(); begin += kEvalChunk) {
    const std::size_t end = std::min(all.size(), begin + kEvalChunk);
    const std::span<const std::size_t> idx(all.data() + begin, end - begin);
    const Batch b = photo_batch(data, idx, {});
    const TensorF prob = classifier_probabilities(params, c, b.photos);
    for (int n = 0; n < prob.shape().n; ++n) {
      int best = 0;
      for (int k = 1; k < prob.shape().c; ++k) best = prob(n, k, 0, 0) > prob(n, best, 0, 0) ? k : best;
      correct += best == b.labels[n];
    }
  }
  return static_cast<double>(correct) / static_cast<double>(all.size());
}

ClassifierConfig matched_residual(const ClassifierConfig& mru, double tolerance) {
  const double target = static_cast<double>(classifier_param_count(mru));
  ClassifierConfig best = mru;
  best.block = BlockKind::kResidual;
  double best_gap = INFINITY;
  // Scale factors in steps of 1/64 up to 4x.
  for (int step = 64; step <= 256; ++step) {
    ClassifierConfig cand = mru;
    cand.block = BlockKind::kResidual;
    for (int& ch : cand.channels) ch = std::max(1, static_cast<int>(std::lround(ch * step / 64.0)));
    const double gap = std::abs(static_cast<double>(classifier_param_count(cand)) - target) / target;
    if (gap < best_gap) {
      best_gap = gap;
      best = cand;
    }
  }
  if (best_gap > tolerance) {
    throw std::runtime_error("matched_residual: closest residual width is " + std::to_string(best_gap * 100) +
                             "% off the MRU parameter count");
  }
  return best;
}

std::vector<ClassifierRun> classify_mode(const ClassifyConfig& c, std::uint64_t seed, const Dataset& data) {
  ClassifierConfig net = c.network;
  net.block = BlockKind::kMru;
  const ClassifierTraining t{c.iterations, c.batch, c.lr, seed};
  std::vector<ClassifierRun> runs;
  for (GateKind gate : {GateKind::kSigmoid, GateKind::kLeakyNormalized}) {
    net.gate = gate;
    ClassifierRun r{"mru-" + to_string(gate), net, classifier_param_count(net), 0.0};
    r.test_accuracy = classifier_accuracy(train_classifier(net, data, t), net, data, Split::kTest);
    runs.push_back(r);
  }
  const ClassifierConfig res = matched_residual(net, c.match_tolerance);
  ClassifierRun r{"residual", res, classifier_param_count(res), 0.0};
  r.test_accuracy = classifier_accuracy(train_classifier(res, data, t), res, data, Split::kTest);
  runs.push_back(r);
  return runs;
}

std::string format_classify_table(const std::vector<ClassifierRun>& runs) {
  std::ostringstream out;
  out << "| variant | channels | parameters | test accuracy |\n|---|---|---|---|\n";
  for (const auto& r : runs) {
    std::string ch;
    for (int v : r.config.channels) ch += (ch.empty() ? "" : "/") + std::to_string(v);
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.4f", r.test_accuracy);
    out << "| " << r.variant << " | " << ch << " | " << r.params << " | " << acc << " |\n";
  }
  return out.str();
}

}  // namespace sketchygan
