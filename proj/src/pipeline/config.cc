// Copyright 2026 The dexxfer Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dexxfer/pipeline/config.h"

#include <string>

#include "dexxfer/common/errors.h"

namespace dexxfer {

namespace {

std::filesystem::path Resolve(const Json& j, const std::string& key, const std::filesystem::path& base) {
  const std::filesystem::path p = RequireField(j, key, "config").get<std::string>();
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

Json Section(const Json& j, const std::string& key) {
  if (!j.contains(key)) return Json::object();
  if (!j.at(key).is_object()) throw ConfigError("config." + key + " must be an object");
  return j.at(key);
}

}  // namespace

TransferConfig TransferConfig::FromJson(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  TransferConfig c;
  try {
    c.hand = Resolve(j, "hand", base_dir);
    c.demo = Resolve(j, "demo", base_dir);
    c.output_dir = Resolve(j, "output_dir", base_dir);
    c.seed = j.value("seed", c.seed);
    c.no_rl = j.value("no_rl", c.no_rl);

    const Json ingest = Section(j, "ingest");
    c.com_lowering = ingest.value("com_lowering", c.com_lowering);
    c.contact_threshold = ingest.value("contact_threshold", c.contact_threshold);
    if (ingest.contains("grasp_frame") && !ingest.at("grasp_frame").is_null()) {
      c.grasp_frame = ingest.at("grasp_frame").get<int>();
    }

    const Json rt = Section(j, "retarget");
    c.weights.fingertip = rt.value("w_f", c.weights.fingertip);
    c.weights.orientation = rt.value("w_o", c.weights.orientation);
    c.weights.smoothness = rt.value("w_s", c.weights.smoothness);
    c.retarget.max_iterations = rt.value("max_iterations", c.retarget.max_iterations);
    c.retarget.gradient_tolerance = rt.value("gradient_tolerance", c.retarget.gradient_tolerance);
    c.retarget.align_first_frame = rt.value("align_first_frame", c.retarget.align_first_frame);
    c.control_frequency = rt.value("control_frequency", c.control_frequency);

    c.sim = SimConfig::FromJson(Section(j, "sim"));

    const Json ct = Section(j, "contact");
    c.contact.strategy = ParsePregraspStrategy(ct.value("strategy", std::string("thumb")));
    if (ct.contains("trigger")) c.contact.trigger = ParsePregraspTrigger(ct.at("trigger"));
    c.contact.goal_displacement = ct.value("goal_displacement", c.contact.goal_displacement);
    c.contact.grace_steps = ct.value("grace_steps", c.contact.grace_steps);
    c.contact.rho_translation = ct.value("rho_translation", c.contact.rho_translation);
    c.contact.rho_rotation = ct.value("rho_rotation", c.contact.rho_rotation);
    c.contact.delta_max = ct.value("delta_max", c.contact.delta_max);
    c.contact.object_jitter = ct.value("object_jitter", c.contact.object_jitter);
    c.contact.reward = RewardConstants::FromJson(Section(ct, "reward"));

    c.ppo = PpoConfig::FromJson(Section(j, "ppo"));

    const Json wr = Section(j, "wrist");
    c.wrist_gain_scale = wr.value("gain_scale", c.wrist_gain_scale);

    const Json mt = Section(j, "metrics");
    c.semantics.window = mt.value("window", c.semantics.window);
    c.semantics.step = mt.value("step", c.semantics.step);
    c.semantics.translation = mt.value("translation", c.semantics.translation);
    c.semantics.tilt_deg = mt.value("tilt_deg", c.semantics.tilt_deg);
    c.semantics.rotation_deg = mt.value("rotation_deg", c.semantics.rotation_deg);
    const std::string norm = mt.value("dtw_normalization", std::string("path"));
    if (norm == "path") {
      c.dtw = DtwNormalization::kPathLength;
    } else if (norm == "max") {
      c.dtw = DtwNormalization::kMaxLength;
    } else {
      throw ConfigError("metrics.dtw_normalization must be \"path\" or \"max\"");
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

TransferConfig TransferConfig::Load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  Json j;
  try {
    j = ReadJsonFile(path);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  return FromJson(j, std::filesystem::absolute(path).parent_path());
}

Json TransferConfig::ToJson() const {
  Json trigger = contact.trigger.kind == PregraspTrigger::Kind::kNearest
                     ? Json("nearest")
                     : Json{{"threshold", contact.trigger.threshold}};
  return Json{
      {"hand", std::filesystem::absolute(hand).lexically_normal().string()},
      {"demo", std::filesystem::absolute(demo).lexically_normal().string()},
      {"output_dir", std::filesystem::absolute(output_dir).lexically_normal().string()},
      {"seed", seed},
      {"no_rl", no_rl},
      {"ingest",
       {{"com_lowering", com_lowering},
        {"contact_threshold", contact_threshold},
        {"grasp_frame", grasp_frame ? Json(*grasp_frame) : Json(nullptr)}}},
      {"retarget",
       {{"w_f", weights.fingertip},
        {"w_o", weights.orientation},
        {"w_s", weights.smoothness},
        {"max_iterations", retarget.max_iterations},
        {"gradient_tolerance", retarget.gradient_tolerance},
        {"align_first_frame", retarget.align_first_frame},
        {"control_frequency", control_frequency}}},
      {"sim", sim.ToJson()},
      {"contact",
       {{"strategy", contact.strategy == PregraspStrategy::kThumb ? "thumb" : "all"},
        {"trigger", trigger},
        {"goal_displacement", contact.goal_displacement},
        {"grace_steps", contact.grace_steps},
        {"rho_translation", contact.rho_translation},
        {"rho_rotation", contact.rho_rotation},
        {"delta_max", contact.delta_max},
        {"object_jitter", contact.object_jitter},
        {"reward", contact.reward.ToJson()}}},
      {"ppo", ppo.ToJson()},
      {"wrist", {{"gain_scale", wrist_gain_scale}}},
      {"metrics",
       {{"window", semantics.window},
        {"step", semantics.step},
        {"translation", semantics.translation},
        {"tilt_deg", semantics.tilt_deg},
        {"rotation_deg", semantics.rotation_deg},
        {"dtw_normalization", dtw == DtwNormalization::kPathLength ? "path" : "max"}}}};
}

void TransferConfig::Validate() const {
  if (!std::filesystem::is_regular_file(hand)) throw ConfigError("hand file not found: " + hand.string());
  if (!std::filesystem::is_regular_file(demo)) throw ConfigError("demo file not found: " + demo.string());
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
  if (!(com_lowering >= 0.0)) throw ConfigError("ingest.com_lowering must be nonnegative");
  if (!(contact_threshold > 0.0)) throw ConfigError("ingest.contact_threshold must be positive");
  if (!(weights.fingertip > 0.0) || weights.orientation < 0.0 || weights.smoothness < 0.0) {
    throw ConfigError("retarget weights must satisfy w_f > 0, w_o >= 0, w_s >= 0");
  }
  if (!(control_frequency > 0.0)) throw ConfigError("retarget.control_frequency must be positive");
  if (!(contact.rho_translation > 0.0) || !(contact.rho_rotation > 0.0)) {
    throw ConfigError("contact.rho values must be positive");
  }
  if (!(contact.delta_max > 0.0)) throw ConfigError("contact.delta_max must be positive");
  if (contact.grace_steps < 0) throw ConfigError("contact.grace_steps must be nonnegative");
  if (!(wrist_gain_scale > 0.0)) throw ConfigError("wrist.gain_scale must be positive");
  if (semantics.window < 2 || semantics.step < 1) throw ConfigError("metrics window/step out of range");
}

}  // namespace dexxfer
