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

// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Progress goes to stderr. Exit status is non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "augment_oracles.hpp"
#include "sketchygan/augment/distance.hpp"
#include "sketchygan/augment/morphology.hpp"
#include "sketchygan/augment/png_io.hpp"
#include "sketchygan/harness/ablation.hpp"
#include "sketchygan/harness/classify.hpp"
#include "sketchygan/harness/gradcheck_suite.hpp"
#include "sketchygan/harness/train.hpp"

namespace fs = std::filesystem;
using namespace sketchygan;
using namespace sketchygan::test;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

constexpr std::uint64_t kCorpusSeed = 2026;
constexpr std::uint64_t kTrainSeed = 1;

// Shared state built on first use: corpus, frozen evaluation classifier, full run.
class Context {
 public:
  explicit Context(fs::path work) : work_(std::move(work)) {}

  const fs::path& work() const { return work_; }

  const Dataset& data() {
    if (!data_) {
      CorpusOptions o;
      o.seed = kCorpusSeed;
      std::cerr << "building the K=4 corpus\n";
      data_.emplace(build_corpus(work_ / "corpus", o));
    }
    return *data_;
  }

  const EvalClassifier& classifier() {
    if (!classifier_) {
      std::cerr << "training the evaluation classifier\n";
      classifier_.emplace(EvalClassifier::fit(data(), EvalConfig{}, kShapeClasses));
      std::cerr << "evaluation classifier test accuracy " << classifier_->accuracy(data(), Split::kTest) << '\n';
    }
    return *classifier_;
  }

  TrainConfig default_train() const {
    TrainConfig c;
    c.seed = kTrainSeed;
    return c;
  }

  struct Run {
    TrainResult result;
    double seconds = 0.0;
  };

  const Run& run(const std::string& name, const TrainConfig& c) {
    auto it = runs_.find(name);
    if (it != runs_.end()) return it->second;
    std::cerr << "training '" << name << "' for " << c.iterations << " iterations\n";
    const auto start = std::chrono::steady_clock::now();
    TrainResult r = train(c, data(), work_ / name, [&](const MetricsRow& row) {
      if (row.iteration % 100 == 0) {
        std::cerr << fmt("  %s iter %lld  l1 %.4f  g %.4f  d %.4f  (%.0f s)\n", name.c_str(), row.iteration,
                         row.g_l1, row.g_total, row.d_total, seconds_since(start));
      }
    });
    return runs_.emplace(name, Run{std::move(r), seconds_since(start)}).first->second;
  }

 private:
  fs::path work_;
  std::optional<Dataset> data_;
  std::optional<EvalClassifier> classifier_;
  std::map<std::string, Run> runs_;
};

Outcome gradient_integrity(Context&) {
  const auto start = std::chrono::steady_clock::now();
  const auto cases = run_gradcheck_suite(10, 0);
  const double t = seconds_since(start);
  std::string failed;
  double worst = 0.0;
  int draws = 10;
  for (const auto& c : cases) {
    worst = std::max(worst, c.worst);
    draws = std::min(draws, c.draws);
    if (!c.passed()) failed += (failed.empty() ? "" : ", ") + c.name;
  }
  const bool ok = failed.empty() && draws >= 10 && t < 300.0;
  return {ok, fmt("%zu components x %d draws, worst rel. error %.2e, %.1f s", cases.size(), draws, worst, t) +
                  (failed.empty() ? "" : "; failed: " + failed)};
}

Outcome morphology_oracles(Context&) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> density(0.002, 0.2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    BinaryImage b(32, 32);
    std::bernoulli_distribution coin(density(rng));
    for (auto& v : b.values) v = coin(rng) ? 1 : 0;
    const double cap = trial % 2 == 0 ? 8.0 : 50.0;
    const DistanceField f = distance_field(b, cap);
    const std::vector<double> ref = brute_force_field(b, cap);
    for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(f.values[i] - ref[i]));
  }
  int thin_bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const BinaryImage blob = random_blob(32, 32, 1000 + trial);
    const BinaryImage t = thin(blob);
    thin_bad += !(is_subset(t, blob) && thin(t) == t);
  }
  int census_bad = 0;
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 50; ++trial) {
    BinaryImage b(40, 30);
    for (auto& v : b.values) v = coin(rng) ? 1 : 0;
    const int min_size = 1 + trial % 7;
    census_bad += !(remove_small_components(b, min_size) == union_find_filter(b, min_size));
  }
  const double t = seconds_since(start);
  return {worst < 1e-6 && thin_bad == 0 && census_bad == 0 && t < 120.0,
          fmt("distance max |delta| %.1e over 100 masks, thin violations %d/50, component mismatches %d/50, %.1f s",
              worst, thin_bad, census_bad, t)};
}

Outcome schedule_exactness(Context&) {
  const double p0 = mix_ratio({0, 1000, 1.0}).sketch;
  const double p1 = mix_ratio({1000, 1000, 1.0}).sketch;
  const double ph = mix_ratio({500, 1000, 1.0}).sketch;
  bool monotone = true;
  double prev = -1.0;
  for (int i = 0; i <= 999; ++i) {
    const double p = mix_ratio({i, 999, 1.0}).sketch;
    monotone = monotone && p >= prev;
    prev = p;
  }
  std::mt19937_64 rng(11);
  const ScheduleState mid{500, 1000, 1.0};
  long long sketches = 0;
  const int draws = 100000;
  for (int i = 0; i < draws / 8; ++i) {
    for (Source s : draw_batch_sources(mid, 8, rng)) sketches += s == Source::kSketch;
  }
  const double frac = static_cast<double>(sketches) / draws;
  const bool ok = std::abs(p0 - 0.1) < 1e-12 && std::abs(p1 - 0.9) < 1e-12 && std::abs(ph - 0.6) < 1e-12 &&
                  monotone && std::abs(frac - 0.6) <= 0.01;
  return {ok, fmt("P_sk(0)=%.3f P_sk(max)=%.3f P_sk(mid)=%.3f, monotone %s, empirical %.4f vs 0.6", p0, p1, ph,
                  monotone ? "yes" : "no", frac)};
}

Outcome mru_identities(Context&) {
  int open_bad = 0, closed_bad = 0, bound_bad = 0, configs = 0;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<float> u(-3.0f, 3.0f);
  auto random = [&](Shape s) {
    TensorF t(s);
    for (auto& v : t.values()) v = u(rng);
    return t;
  };
  for (GateKind g : {GateKind::kSigmoid, GateKind::kLeakyNormalized}) {
    for (NormKind norm : {NormKind::kNone, NormKind::kInstance, NormKind::kConditional}) {
      MRUConfig c;
      c.in_channels = c.out_channels = 4;
      c.image_channels = 1;
      c.gate = g;
      c.norm = norm;
      c.norm_classes = 3;
      std::mt19937_64 init(configs++);
      ParamSet<float> p;
      init_mru_params(p, "b/", c, init);
      const std::vector<int> labels = {0, 2};
      for (int draw = 0; draw < 100; ++draw) {
        Tape<float> tape;
        Bound<float> b(tape, p, false);
        const TensorF x = random(Shape{2, 4, 6, 6});
        const Var<float> xv = tape.constant(x), img = tape.constant(random(Shape{2, 1, 6, 6}));
        if (draw < 10) {
          MRUOverrides open;
          open.n = 1.0;
          open_bad += !(mru_forward(xv, img, b, "b/", c, labels, open).y.value() == x);
          MRUOverrides closed;
          closed.n = 0.0;
          const auto out = mru_forward(xv, img, b, "b/", c, labels, closed);
          closed_bad += !(out.y.value() == out.z.value());
        }
        const auto out = mru_forward(xv, img, b, "b/", c, labels);
        for (const Var<float>* gate : {&out.m, &out.n}) {
          for (float v : gate->value().values()) bound_bad += !(v >= 0.0f && v <= 1.0f);
        }
      }
    }
  }
  return {open_bad == 0 && closed_bad == 0 && bound_bad == 0,
          fmt("%d configs: n=1 -> y=x mismatches %d, n=0 -> y=z mismatches %d, gate values outside [0,1] %d "
              "(100 draws each)",
              configs, open_bad, closed_bad, bound_bad)};
}

Outcome loss_identities(Context&) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  auto random = [&](Shape s) {
    TensorD t(s);
    for (auto& v : t.values()) v = u(rng);
    return t;
  };
  double focal_gap = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const TensorD logits = random(Shape{6, 5, 1, 1});
    std::vector<int> labels(6);
    for (int& l : labels) l = static_cast<int>(rng() % 5);
    double ce = 0.0;
    for (int n = 0; n < 6; ++n) {
      double mx = -INFINITY, total = 0.0;
      for (int k = 0; k < 5; ++k) mx = std::max(mx, logits(n, k, 0, 0));
      for (int k = 0; k < 5; ++k) total += std::exp(logits(n, k, 0, 0) - mx);
      ce += -(logits(n, labels[n], 0, 0) - mx - std::log(total));
    }
    Tape<double> t;
    focal_gap = std::max(focal_gap, std::abs(focal_ac_loss(t.constant(logits), labels, 0.0).value()[0] - ce / 6));
  }
  Tape<double> t;
  const TensorD img = random(Shape{2, 3, 8, 8});
  const double l1 = l1_supervision(t.constant(img), t.constant(img)).value()[0];
  const double div = diversity_loss(t.constant(img), t.constant(img), 10.0, 1.0).value()[0];

  TensorD w = random(Shape{1, 12, 1, 1});
  double norm = 0.0;
  for (double v : w.values()) norm += v * v;
  for (auto& v : w.values()) v /= std::sqrt(norm);
  ParamSet<double> lp;
  lp.add("w", w);
  lp.add("b", TensorD(Shape{1, 1, 1, 1}, 0.3));
  Critic<double> linear;
  linear.primal = [](Var<double> x, Bound<double>& p) { return dense(x, p("w"), p("b")); };
  linear.dual = [](Var<Dual<double>> x, Bound<Dual<double>>& p) { return dense(x, p("w"), p("b")); };
  Bound<double> lb(t, lp, true);
  const double gp = dragan_penalty(linear, lb, random(Shape{4, 3, 2, 2}), 10.0, 0.5, rng).value()[0];

  const double parts[8] = {0.5, 0.25, 2.0, 1.5, 0.125, 0.75, 3.0, -0.5};
  auto s = [&](double v) { return t.constant(TensorD::scalar(v)); };
  const LossSwitches all;
  const double td = total_d(t, DLossTerms<double>{s(parts[0]), s(parts[1]), s(parts[2])}, all).value()[0];
  const double tg =
      total_g(t, GLossTerms<double>{s(parts[3]), s(parts[4]), s(parts[5]), s(parts[6]), s(parts[7])}, all).value()[0];
  const double total_gap = std::max(std::abs(td - 2.75), std::abs(tg - 4.875));

  const bool ok = focal_gap < 1e-7 && l1 == 0.0 && div == 0.0 && std::abs(gp) < 1e-6 && total_gap < 1e-6;
  return {ok, fmt("focal(g=0) vs CE %.1e, L1(x,x)=%g, div(x,x)=%g, DRAGAN(unit linear)=%.1e, total gap %.1e",
                  focal_gap, l1, div, gp, total_gap)};
}

Outcome score_sanity(Context&) {
  TensorF same(Shape{6, 4, 1, 1});
  const float row[4] = {0.1f, 0.2f, 0.3f, 0.4f};
  for (int n = 0; n < 6; ++n) {
    for (int k = 0; k < 4; ++k) same(n, k, 0, 0) = row[k];
  }
  const double s1 = score_analogue(same);
  TensorF onehot(Shape{12, 4, 1, 1});
  for (int n = 0; n < 12; ++n) onehot(n, n % 4, 0, 0) = 1.0f;
  const double sk = score_analogue(onehot);
  return {std::abs(s1 - 1.0) <= 1e-6 && std::abs(sk - 4.0) <= 1e-6,
          fmt("identical rows -> %.9f, one-hot over K=4 -> %.9f", s1, sk)};
}

Outcome end_to_end(Context& ctx) {
  const TrainConfig c = ctx.default_train();
  const Dataset& data = ctx.data();
  const EvalClassifier& clf = ctx.classifier();
  const EvalConfig ec;
  const EvalReport before = evaluate(initial_generator(c), c.generator, data, clf, ec);
  bool finite = true;
  std::string abort;
  double seconds = 0.0;
  std::optional<EvalReport> after;
  try {
    const auto& run = ctx.run("full", c);
    seconds = run.seconds;
    after = evaluate(run.result.generator, c.generator, data, clf, ec);
  } catch (const NonFiniteLoss& e) {
    finite = false;
    abort = e.what();
  }
  if (!after) return {false, "training aborted: " + abort};
  const double ratio = after->mean_l1 / before.mean_l1;
  const bool ok = finite && seconds < 3600.0 && ratio < 0.8 && after->score > before.score;
  return {ok, fmt("%lld iterations in %.1f min, test L1 %.4f -> %.4f (ratio %.3f, need < 0.8), score %.3f -> %.3f",
                  c.iterations, seconds / 60.0, before.mean_l1, after->mean_l1, ratio, before.score, after->score)};
}

Outcome ablation_direction(Context& ctx) {
  const TrainConfig full = ctx.default_train();
  const TrainConfig no_div = apply_variant(full, "-DIV");
  const EvalConfig ec;
  const EvalReport a = evaluate(ctx.run("full", full).result.generator, full.generator, ctx.data(), ctx.classifier(), ec);
  const EvalReport b =
      evaluate(ctx.run("no_div", no_div).result.generator, no_div.generator, ctx.data(), ctx.classifier(), ec);
  const std::vector<AblationRow> rows = {{"full", 0, a}, {"-DIV", 0, b}};
  std::ofstream(ctx.work() / "ablation_direction.md") << format_ablation_table(rows);
  return {b.diversity <= a.diversity,
          fmt("diversity statistic: full %.4f, -DIV %.4f (matched seed %llu)", a.diversity, b.diversity,
              static_cast<unsigned long long>(kTrainSeed))};
}

Outcome classifier_mode(Context& ctx) {
  const ClassifyConfig c;
  const auto runs = classify_mode(c, kTrainSeed, ctx.data());
  std::ofstream(ctx.work() / "classify.md") << format_classify_table(runs);
  const double mru = static_cast<double>(runs[0].params);
  const double res = static_cast<double>(runs[2].params);
  const double gap = std::abs(mru - res) / mru;
  const bool ok = runs[0].test_accuracy > 0.9 && runs[1].test_accuracy > 0.9 && gap <= 0.05;
  return {ok, fmt("%lld iterations: sigmoid %.3f, leakyrelu %.3f, residual %.3f test accuracy; params %zu vs %zu "
                  "(gap %.2f%%)",
                  c.iterations, runs[0].test_accuracy, runs[1].test_accuracy, runs[2].test_accuracy, runs[0].params,
                  runs[2].params, gap * 100)};
}

Outcome determinism(Context& ctx) {
  TrainConfig c = ctx.default_train();
  c.iterations = 20;
  c.checkpoint_every = 10;
  const fs::path a = ctx.work() / "det_a", b = ctx.work() / "det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const TrainResult ra = train(c, ctx.data(), a);
  train(c, ctx.data(), b);
  const bool logs = slurp(a / "metrics.csv") == slurp(b / "metrics.csv") && !slurp(a / "metrics.csv").empty();

  const Checkpoint ck = load_checkpoint(a / "generator.ckpt");
  const bool ckpt = ck.params == ra.generator &&
                    load_checkpoint(a / "checkpoints" / "generator_000010.ckpt") ==
                        load_checkpoint(b / "checkpoints" / "generator_000010.ckpt");
  const EvalConfig ec;
  const bool eval_same = evaluate(a / "generator.ckpt", c.generator, ctx.data(), ctx.classifier(), ec)
                             .same_metrics(evaluate(ra.generator, c.generator, ctx.data(), ctx.classifier(), ec));

  const Manifest& m = ctx.data().manifest();
  write_manifest(ctx.work() / "corpus" / "manifest_copy.jsonl", m);
  const Manifest back = read_manifest(ctx.work() / "corpus" / "manifest_copy.jsonl");
  bool manifest = back.entries == m.entries;
  for (std::size_t i = 0; i < m.entries.size() && manifest; i += 37) {
    const PairedSample x = load_sample(back, back.entries[i]);
    manifest = x.photo == ctx.data().sample(i).photo && x.sketch_field == ctx.data().sample(i).sketch_field &&
               x.edge_field == ctx.data().sample(i).edge_field;
  }

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    DistanceField f(32, 32);
    for (float& v : f.values) v = u(rng);
    write_png_field(ctx.work() / "field.png", f);
    const DistanceField back_f = read_png_field(ctx.work() / "field.png");
    for (std::size_t i = 0; i < f.values.size(); ++i) worst = std::max(worst, std::abs(double(back_f.values[i]) - f.values[i]));
  }
  const bool png = worst <= 1.0 / 65535.0;
  return {logs && ckpt && eval_same && manifest && png,
          fmt("metrics logs identical %s, checkpoints lossless %s (eval equal %s), manifest lossless %s, "
              "field PNG max error %.2e (limit %.2e)",
              logs ? "yes" : "no", ckpt ? "yes" : "no", eval_same ? "yes" : "no", manifest ? "yes" : "no", worst,
              1.0 / 65535.0)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string work = (fs::temp_directory_path() / "sketchygan_acceptance").string();
  std::vector<int> only;
  app.add_option("--work", work, "Scratch directory");
  app.add_option("--only", only, "Run only these criteria (1-10)");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);
  Context ctx(work);

  const std::vector<std::pair<std::string, std::function<Outcome(Context&)>>> criteria = {
      {"gradient integrity", gradient_integrity},
      {"morphology oracles", morphology_oracles},
      {"schedule exactness", schedule_exactness},
      {"MRU algebraic identities", mru_identities},
      {"loss identities", loss_identities},
      {"score-analogue sanity", score_sanity},
      {"end-to-end desk-scale training", end_to_end},
      {"ablation direction", ablation_direction},
      {"classifier mode", classifier_mode},
      {"determinism and round-trips", determinism},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && selected.count(id) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << " (" << criteria[i].first << "): " << o.detail
              << fmt("  [%.1f s]", seconds_since(start)) << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
