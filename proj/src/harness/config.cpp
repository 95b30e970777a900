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

#include "sketchygan/harness/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sketchygan {
namespace {

using nlohmann::json;

struct Field {
  std::function<json(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const json&)> set;
};

template <typename Member>
Field plain(Member member) {
  return {[member](const ExperimentConfig& c) { return json(member(const_cast<ExperimentConfig&>(c))); },
          [member](ExperimentConfig& c, const json& v) {
            auto& slot = member(c);
            slot = v.get<std::remove_reference_t<decltype(slot)>>();
          }};
}

template <typename Member, typename Parse, typename Print>
Field named(Member member, Parse parse, Print print) {
  return {[member, print](const ExperimentConfig& c) {
            return json(print(member(const_cast<ExperimentConfig&>(c))));
          },
          [member, parse](ExperimentConfig& c, const json& v) { member(c) = parse(v.get<std::string>()); }};
}

#define SLOT(path) [](ExperimentConfig& c) -> auto& { return c.path; }

const std::map<std::string, Field>& registry() {
  static const std::map<std::string, Field> fields = [] {
    std::map<std::string, Field> f;
    f["train.iterations"] = plain(SLOT(train.iterations));
    f["train.batch"] = plain(SLOT(train.batch));
    f["train.lr_g"] = plain(SLOT(train.lr_g));
    f["train.lr_d"] = plain(SLOT(train.lr_d));
    f["train.beta1"] = plain(SLOT(train.beta1));
    f["train.beta2"] = plain(SLOT(train.beta2));
    f["train.seed"] = plain(SLOT(train.seed));
    f["train.flip"] = plain(SLOT(train.flip));
    f["train.checkpoint_every"] = plain(SLOT(train.checkpoint_every));
    f["train.feature_seed"] = plain(SLOT(train.feature_seed));

    f["schedule.mode"] = named(SLOT(train.schedule.mode), parse_schedule_mode,
                               [](ScheduleMode m) { return to_string(m); });
    f["schedule.lambda"] = plain(SLOT(train.schedule.lambda));
    f["schedule.i_max"] = plain(SLOT(train.schedule.i_max));
    f["schedule.pretrain_fraction"] = plain(SLOT(train.schedule.pretrain_fraction));

    f["loss.lambda_p"] = plain(SLOT(train.loss.lambda_p));
    f["loss.lambda_div"] = plain(SLOT(train.loss.lambda_div));
    f["loss.gp"] = plain(SLOT(train.loss.lambda_gp));
    f["loss.focal_gamma"] = plain(SLOT(train.loss.focal_gamma));
    f["loss.perturb_scale"] = plain(SLOT(train.loss.perturb_scale));
    f["loss.diversity_cap"] = plain(SLOT(train.loss.diversity_cap));
    f["loss.enable.gan"] = plain(SLOT(train.loss.enable.gan));
    f["loss.enable.ac"] = plain(SLOT(train.loss.enable.ac));
    f["loss.enable.l1"] = plain(SLOT(train.loss.enable.l1));
    f["loss.enable.perceptual"] = plain(SLOT(train.loss.enable.perceptual));
    f["loss.enable.diversity"] = plain(SLOT(train.loss.enable.diversity));
    f["loss.enable.dragan"] = plain(SLOT(train.loss.enable.dragan));

    const auto gate_print = [](GateKind g) { return to_string(g); };
    const auto block_print = [](BlockKind b) { return to_string(b); };
    f["generator.resolution"] = plain(SLOT(train.generator.resolution));
    f["generator.channels"] = plain(SLOT(train.generator.channels));
    f["generator.noise_dim"] = plain(SLOT(train.generator.noise_dim));
    f["generator.classes"] = plain(SLOT(train.generator.classes));
    f["generator.gate"] = named(SLOT(train.generator.gate), parse_gate_kind, gate_print);
    f["generator.block"] = named(SLOT(train.generator.block), parse_block_kind, block_print);
    f["generator.depth"] = plain(SLOT(train.generator.depth));
    f["generator.skips"] = plain(SLOT(train.generator.skips));
    f["generator.conditional"] = plain(SLOT(train.generator.conditional));

    f["discriminator.resolution"] = plain(SLOT(train.discriminator.resolution));
    f["discriminator.channels"] = plain(SLOT(train.discriminator.channels));
    f["discriminator.classes"] = plain(SLOT(train.discriminator.classes));
    f["discriminator.gate"] = named(SLOT(train.discriminator.gate), parse_gate_kind, gate_print);
    f["discriminator.depth"] = plain(SLOT(train.discriminator.depth));
    f["discriminator.sketch_conditioned"] = plain(SLOT(train.discriminator.sketch_conditioned));

    f["eval.seed"] = plain(SLOT(eval.seed));
    f["eval.batch"] = plain(SLOT(eval.batch));
    f["eval.classifier_iterations"] = plain(SLOT(eval.classifier_iterations));
    f["eval.classifier_batch"] = plain(SLOT(eval.classifier_batch));
    f["eval.classifier_lr"] = plain(SLOT(eval.classifier_lr));

    f["classify.iterations"] = plain(SLOT(classify.iterations));
    f["classify.batch"] = plain(SLOT(classify.batch));
    f["classify.lr"] = plain(SLOT(classify.lr));
    f["classify.resolution"] = plain(SLOT(classify.network.resolution));
    f["classify.channels"] = plain(SLOT(classify.network.channels));
    f["classify.classes"] = plain(SLOT(classify.network.classes));
    f["classify.depth"] = plain(SLOT(classify.network.depth));
    f["classify.match_tolerance"] = plain(SLOT(classify.match_tolerance));
    return f;
  }();
  return fields;
}

#undef SLOT

void flatten_into(const json& node, const std::string& prefix, FlatConfig& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      flatten_into(value, prefix.empty() ? key : prefix + "." + key, out);
    }
    return;
  }
  out[prefix] = node.dump();
}

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument("config: " + what); }

}  // namespace

void validate(const TrainConfig& c) {
  if (c.iterations <= 0) bad("train.iterations must be > 0");
  if (c.batch < 1) bad("train.batch must be >= 1");
  if (!(c.lr_g > 0.0) || !(c.lr_d > 0.0)) bad("learning rates must be > 0");
  if (!(c.beta1 >= 0.0 && c.beta1 < 1.0) || !(c.beta2 >= 0.0 && c.beta2 < 1.0)) {
    bad("Adam betas must lie in [0, 1)");
  }
  if (c.checkpoint_every < 0) bad("train.checkpoint_every must be >= 0");
  if (!(c.schedule.lambda > 0.0)) bad("schedule.lambda must be > 0");
  if (c.schedule.i_max < 0) bad("schedule.i_max must be >= 0");
  if (c.schedule.i_max != 0 && c.schedule.i_max < c.iterations) {
    bad("schedule.i_max must be 0 or >= train.iterations");
  }
  if (!(c.schedule.pretrain_fraction >= 0.0 && c.schedule.pretrain_fraction <= 1.0)) {
    bad("schedule.pretrain_fraction must lie in [0, 1]");
  }
  validate(c.loss);
  validate(c.generator);
  validate(c.discriminator);
  if (c.generator.resolution != c.discriminator.resolution) {
    bad("generator and discriminator resolutions differ");
  }
  if (c.generator.classes != c.discriminator.classes) bad("generator and discriminator class counts differ");
}

void validate(const ExperimentConfig& c) {
  validate(c.train);
  if (c.eval.batch < 2) bad("eval.batch must be >= 2");
  if (c.eval.classifier_iterations < 1 || c.eval.classifier_batch < 1) bad("eval classifier settings must be positive");
  if (!(c.eval.classifier_lr > 0.0)) bad("eval.classifier_lr must be > 0");
  if (c.classify.iterations < 1 || c.classify.batch < 1) bad("classify settings must be positive");
  if (!(c.classify.lr > 0.0)) bad("classify.lr must be > 0");
  if (!(c.classify.match_tolerance > 0.0)) bad("classify.match_tolerance must be > 0");
}

FlatConfig flatten_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) bad("top level must be a JSON object");
  FlatConfig out;
  flatten_into(root, "", out);
  return out;
}

FlatConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return flatten_json(text.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void apply_config(ExperimentConfig& c, const FlatConfig& values) {
  const auto& fields = registry();
  for (const auto& [key, text] : values) {
    const auto it = fields.find(key);
    if (it == fields.end()) bad("unknown key '" + key + "'");
    try {
      it->second.set(c, json::parse(text));
    } catch (const std::exception& e) {
      bad("bad value " + text + " for '" + key + "': " + e.what());
    }
  }
}

std::pair<std::string, std::string> parse_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) bad("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  if (json::accept(value)) return {key, value};
  return {key, json(value).dump()};
}

FlatConfig to_flat(const ExperimentConfig& c) {
  FlatConfig out;
  for (const auto& [key, field] : registry()) out[key] = field.get(c).dump();
  return out;
}

std::string to_json(const FlatConfig& flat) {
  json root = json::object();
  for (const auto& [key, text] : flat) root[key] = json::parse(text);
  return root.dump(2);
}

std::string generator_fingerprint(const GeneratorConfig& c) {
  ExperimentConfig e;
  e.train.generator = c;
  json out = json::object();
  for (const auto& [key, text] : to_flat(e)) {
    if (key.rfind("generator.", 0) == 0) out[key] = json::parse(text);
  }
  return out.dump();
}

}  // namespace sketchygan
