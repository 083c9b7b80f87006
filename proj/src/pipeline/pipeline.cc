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

#include "dexxfer/pipeline/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>

#include "dexxfer/common/errors.h"
#include "dexxfer/common/hash.h"
#include "dexxfer/contact/env.h"
#include "dexxfer/demo/demo.h"
#include "dexxfer/hand/hand_model.h"
#include "dexxfer/retarget/retargeter.h"
#include "dexxfer/retarget/spline.h"
#include "dexxfer/sim/replay.h"
#include "dexxfer/sim/world.h"

namespace dexxfer {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kConfigFile = "config.json";
// Time over which the manipulation targets converge from the achieved grasp
// pose onto the demo trajectory.
constexpr double kBlendSeconds = 0.5;

enum Stage { kIngest, kRetarget, kReplay, kConfigure, kTrain, kPlan, kTrack, kEvaluate, kNumStages };

// Artifacts: every stage writes its files, then the run continues from what
// was read back, so a resumed run sees exactly what a fresh run saw.
Json ReadArtifact(const fs::path& dir, const std::string& name) {
  const fs::path p = dir / name;
  if (!fs::exists(p)) throw IntegrityError(name, "missing from " + dir.string());
  try {
    return ReadJsonFile(p);
  } catch (const ParseError& e) {
    throw IntegrityError(name, e.what());
  }
}

Json PosesToJson(const std::vector<Pose6>& poses) {
  Json out = Json::array();
  for (const Pose6& p : poses) out.push_back(PoseToJson(p));
  return out;
}

std::vector<Pose6> PosesFromJson(const Json& j, const std::string& where) {
  std::vector<Pose6> out;
  for (const Json& p : j) out.push_back(PoseFromJson(p, where));
  return out;
}

Json StatesToJson(const std::vector<WorldState>& states) {
  Json out = Json::array();
  for (const WorldState& s : states) {
    Json j = s.Summary();
    j["contact"] = s.HandObjectContact();
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<WorldState> StatesFromJson(const Json& j, std::vector<bool>* contact) {
  std::vector<WorldState> out;
  for (const Json& s : j) {
    out.push_back(StateFromSummary(s));
    if (contact) contact->push_back(s.value("contact", false));
  }
  return out;
}

// Persisted grasp-phase rollout.
struct GraspArtifact {
  EpisodeResult result;
  std::vector<bool> touched;
  Eigen::VectorXd last_control;
};

GraspArtifact GraspFromJson(const Json& j) {
  GraspArtifact g;
  const Json& summary = RequireField(j, "summary", "grasp");
  g.result.states = StatesFromJson(RequireField(j, "states", "grasp"), nullptr);
  g.result.episode_return = summary.at("return").get<double>();
  g.result.diverged = summary.at("diverged").get<bool>();
  g.result.hold_steps = summary.at("hold_steps").get<int>();
  g.result.final_distance = summary.at("final_distance").get<double>();
  g.result.success = summary.at("success").get<bool>();
  for (const Json& t : RequireField(j, "touched", "grasp")) {
    g.touched.push_back(t.get<bool>());
    RewardTerms terms;
    terms.touched = g.touched.back();
    g.result.terms.push_back(terms);
  }
  g.last_control = ParseVector(RequireField(j, "last_control", "grasp"), "grasp.last_control");
  return g;
}

Json GraspToJson(const EpisodeResult& r, const Eigen::VectorXd& last_control) {
  Json touched = Json::array();
  for (const RewardTerms& t : r.terms) touched.push_back(t.touched);
  return Json{{"summary", r.Summary()},
              {"states", StatesToJson(r.states)},
              {"touched", touched},
              {"last_control", ToJson(last_control)}};
}

TrackingResult TrackingFromJson(const Json& j) {
  TrackingResult t;
  t.states = StatesFromJson(RequireField(j, "states", "tracking"), nullptr);
  t.dropped = RequireField(j, "dropped", "tracking").get<bool>();
  t.drop_step = RequireField(j, "drop_step", "tracking").get<int>();
  t.diverged = RequireField(j, "diverged", "tracking").get<bool>();
  return t;
}

ControlPlan PlanFromArtifacts(const Json& retarget, const Json* replay) {
  Json merged = retarget.at("plan");
  if (replay) merged["PT"] = replay->at("PT");
  return ControlPlan::FromJson(merged);
}

int TrailingTrue(const std::vector<bool>& flags) {
  int n = 0;
  for (auto it = flags.rbegin(); it != flags.rend() && *it; ++it) ++n;
  return n;
}

// Object trajectory of the whole run on the demo timeline: the primary replay
// up to the pre-grasp step, the grasp episode, then manipulation tracking.
std::vector<Pose6> ExecutedTrajectory(const ControlPlan& plan, const EpisodeConfig& episode,
                                      const std::vector<WorldState>& grasp,
                                      const std::vector<WorldState>& tracking, int frames, double fps) {
  std::vector<Pose6> steps;
  const int p = std::min<int>(episode.pregrasp_step, static_cast<int>(plan.primary.size()) - 1);
  for (int j = 0; j <= p; ++j) steps.push_back(plan.primary[j].object);
  for (const WorldState& s : grasp) steps.push_back(s.object.pose);
  for (const WorldState& s : tracking) steps.push_back(s.object.pose);
  if (steps.empty()) return steps;
  std::vector<Pose6> out;
  const int n = static_cast<int>(steps.size());
  for (int t = 0; t < frames; ++t) {
    const long idx = std::lround(t * plan.frequency / fps);
    out.push_back(steps[std::min<long>(idx, n - 1)]);
  }
  return out;
}

struct ReportInputs {
  const ControlPlan* plan;
  const EpisodeConfig* episode;
  const GraspArtifact* grasp;
  const TrackingResult* tracking;
  const TransferConfig* config;
};

MetricReport ComputeReport(const ReportInputs& in, const std::vector<Pose6>& reference, double fps,
                           std::vector<Pose6>* executed_out) {
  const std::vector<Pose6> executed =
      ExecutedTrajectory(*in.plan, *in.episode, in.grasp->result.states, in.tracking->states,
                         static_cast<int>(reference.size()), fps);
  MetricReport r;
  if (!in.grasp->result.states.empty()) {
    const double final_distance =
        (in.grasp->result.states.back().object.pose.position - in.episode->target.position).norm();
    r.sr_grasp = SrGrasp(final_distance, TrailingTrue(in.grasp->touched), HoldSteps(in.config->sim));
  }
  r.sr_follow = SrFollow(in.tracking->dropped);
  const PoseErrors err = EpEr(reference, executed);
  r.ep = err.ep;
  r.er = err.er;
  r.human_semantics = EncodeSemantics(reference, in.config->semantics);
  r.robot_semantics = EncodeSemantics(executed, in.config->semantics);
  const TsrResult tsr = Tsr(r.human_semantics, r.robot_semantics, in.config->dtw);
  r.tsr = tsr.success;
  r.dtw_distance = tsr.distance;
  if (executed_out) *executed_out = executed;
  return r;
}

// Per-stage parameters entering the cache key.
Json StageParams(int stage, const Json& cfg) {
  switch (stage) {
    case kIngest: return cfg.at("ingest");
    case kRetarget: return cfg.at("retarget");
    case kReplay: return cfg.at("sim");
    case kConfigure: return cfg.at("contact");
    case kTrain: return Json{{"ppo", cfg.at("ppo")}, {"seed", cfg.at("seed")}, {"no_rl", cfg.at("no_rl")}};
    case kPlan: return Json::object();
    case kTrack: return cfg.at("wrist");
    default: return cfg.at("metrics");
  }
}

bool FilesIntact(const fs::path& dir, const StageRecord& rec) {
  if (rec.files.empty()) return false;
  for (const auto& [name, hash] : rec.files) {
    if (!fs::exists(dir / name)) return false;
    if (Sha256File(dir / name) != hash) return false;
  }
  return true;
}

void VerifyFiles(const fs::path& dir, const StageRecord& rec) {
  for (const auto& [name, hash] : rec.files) {
    if (!fs::exists(dir / name)) throw IntegrityError(name, "missing from " + dir.string());
    if (Sha256File(dir / name) != hash) throw IntegrityError(name, "contents do not match the manifest hash");
  }
}

Json LibraryVersions() {
  return Json{{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

// Working state of one run.
struct RunContext {
  TransferConfig config;
  fs::path dir;
  std::shared_ptr<const HandModel> hand;
  DemoSequence demo;
  std::vector<std::string> warnings;

  int grasp_frame = 0;
  ContactSet contacts;
  std::shared_ptr<const ObjectGeometry> object;
  std::unique_ptr<World> world;
  ControlPlan plan;
  EpisodeConfig episode;
  std::optional<GaussianPolicy> policy;
  GraspArtifact grasp;
  ManipulationPlan manipulation;
  TrackingResult tracking;
  std::vector<Pose6> executed;
  MetricReport report;

  DemoSequence ProcessedDemo() const {
    DemoSequence d = demo;
    d.object = *object;
    return d;
  }

  WorldState GraspEndState() const {
    if (!grasp.result.states.empty()) return grasp.result.states.back();
    return GraspEnv(*world, plan, episode).Reset(config.seed);
  }
};

// ---- stage bodies: Compute writes files, Load reads them into the context.

std::vector<std::string> ComputeStage(int stage, RunContext& c) {
  const fs::path& dir = c.dir;
  switch (stage) {
    case kIngest: {
      std::vector<std::vector<Eigen::Vector3d>> raw;
      for (const ConvexPiece& p : c.demo.object.pieces) raw.push_back(p.vertices());
      const ObjectGeometry geom = PreprocessObject(raw, c.demo.object.com, c.demo.object.mass,
                                                   c.config.com_lowering, c.demo.frames[0].object.orientation);
      int gf = c.config.grasp_frame.value_or(DefaultGraspFrame(c.demo));
      if (gf < 0 || gf >= c.demo.horizon()) {
        throw ConfigError("grasp_frame " + std::to_string(gf) + " outside [0, " +
                          std::to_string(c.demo.horizon() - 1) + "]");
      }
      const ContactSet contacts = ExtractContacts(c.demo, gf, c.config.contact_threshold);
      MapContacts(contacts, *c.hand);  // fail early if the hand cannot reproduce any
      Json pieces = Json::array();
      for (const ConvexPiece& p : geom.pieces) {
        Json verts = Json::array();
        for (const Eigen::Vector3d& v : p.vertices()) verts.push_back(ToJson(v));
        pieces.push_back(verts);
      }
      Json points = Json::array();
      for (const Eigen::Vector3d& v : contacts.points) points.push_back(ToJson(v));
      WriteJsonFile(dir / "ingest.json",
                    Json{{"grasp_frame", gf},
                         {"contacts", {{"points", points}, {"finger_ids", contacts.finger_ids}}},
                         {"object", {{"pieces", pieces}, {"com", ToJson(geom.com)}, {"mass", geom.mass}}}});
      return {"ingest.json"};
    }
    case kRetarget: {
      const RetargetedSequence seq =
          RetargetSequence(*c.hand, HumanTrajectory(c.demo), c.config.weights, c.config.retarget);
      ControlPlan plan;
      plan.joint_trajectory = seq.q;
      plan.smooth = SmoothTrajectory::FitUniform(seq.q, c.demo.fps);
      plan.frequency = c.config.control_frequency;
      plan.controls = ToControlSequence(plan.smooth, *c.hand, PlantOf(*c.world), plan.frequency, c.demo.fps);
      Json warnings = Json::array();
      const int unconverged = static_cast<int>(std::count(seq.converged.begin(), seq.converged.end(), false));
      if (unconverged > 0) {
        warnings.push_back("retarget: " + std::to_string(unconverged) + " of " +
                           std::to_string(seq.converged.size()) + " frames hit the iteration limit");
      }
      WriteJsonFile(dir / "retarget.json", Json{{"plan", plan.ToJson()}, {"warnings", warnings}}, -1);
      return {"retarget.json"};
    }
    case kReplay: {
      const WorldState initial =
          c.world->MakeState(c.plan.joint_trajectory.row(0).transpose(), c.demo.frames[0].object);
      ControlPlan plan = c.plan;
      plan.primary = Replay(plan.controls, *c.world, initial).primary;
      WriteJsonFile(dir / "replay.json", Json{{"PT", plan.ToJson().at("PT")}}, -1);
      return {"replay.json"};
    }
    case kConfigure: {
      const DemoSequence demo = c.ProcessedDemo();
      const EpisodeConfig ep =
          ConfigureEpisode(c.plan, demo, *c.hand, c.contacts, c.grasp_frame, c.config.contact);
      const Goal goal = ComputeGoal(demo.ObjectTrajectory(), c.config.contact.goal_displacement);
      Json warnings = Json::array();
      if (goal.fallback) warnings.push_back("configure: " + goal.warning);
      WriteJsonFile(dir / "episode.json", Json{{"episode", ep.ToJson()}, {"warnings", warnings}});
      return {"episode.json"};
    }
    case kTrain: {
      const GraspEnv env(*c.world, c.plan, c.episode);
      std::ofstream log(dir / "train_log.jsonl", std::ios::binary | std::ios::trunc);
      std::vector<std::string> files{"train_log.jsonl", "grasp.json"};
      EpisodeResult r;
      if (c.config.no_rl) {
        log << Json{{"header", {{"algorithm", "none"}, {"seed", c.config.seed}}}}.dump() << "\n";
        r = Rollout(env, nullptr, c.config.seed);
      } else {
        PpoConfig ppo = c.config.ppo;
        ppo.seed = c.config.seed;
        TrainResult tr = TrainResidualPolicy(env, ppo, &log);
        tr.policy.Save(dir / "policy.json");
        const GaussianPolicy policy = GaussianPolicy::Load(dir / "policy.json");
        r = Rollout(env, PolicyResidual(policy, true), c.config.seed);
        files.push_back("policy.json");
      }
      log.close();
      const Eigen::VectorXd last = r.controls.empty() ? env.PrimaryControl(0) : r.controls.back();
      WriteJsonFile(dir / "grasp.json", GraspToJson(r, last), -1);
      return files;
    }
    case kPlan: {
      const HandModel& hand = *c.hand;
      const WorldState end = c.GraspEndState();
      const Pose6 wrist_grasp = hand.WristPose(hand.ForwardKinematics(end.q));
      // Demo frame reached when the grasp episode ends.
      const int steps = c.episode.pregrasp_step + static_cast<int>(c.grasp.result.states.size());
      const int end_frame = static_cast<int>(std::lround(steps * c.demo.fps / c.plan.frequency));
      const int anchor = std::min(end_frame, c.demo.horizon() - 1);
      std::vector<Pose6> tail;
      for (int t = anchor + 1; t < c.demo.horizon(); ++t) tail.push_back(c.demo.frames[t].object);
      const int blend = static_cast<int>(std::lround(kBlendSeconds * c.demo.fps));
      const std::vector<Pose6> objects =
          BlendObjectTrajectory(end.object.pose, c.demo.frames[anchor].object, tail, blend);
      const Eigen::VectorXd hold = c.grasp.last_control.tail(hand.dof() - kFloatingBaseDofs);
      const ManipulationPlan m = PlanWrist(objects, wrist_grasp, hold);
      WriteJsonFile(dir / "manipulation.json", Json{{"plan", m.ToJson()}, {"end_frame", end_frame}}, -1);
      return {"manipulation.json"};
    }
    case kTrack: {
      const TrackingResult t =
          TrackManipulation(c.manipulation, *c.world, c.GraspEndState(), c.config.wrist_gain_scale);
      WriteJsonFile(dir / "tracking.json",
                    Json{{"states", StatesToJson(t.states)}, {"dropped", t.dropped}, {"drop_step", t.drop_step},
                         {"diverged", t.diverged}},
                    -1);
      return {"tracking.json"};
    }
    default: {
      std::vector<Pose6> executed;
      const MetricReport r = ComputeReport({&c.plan, &c.episode, &c.grasp, &c.tracking, &c.config},
                                           c.demo.ObjectTrajectory(), c.demo.fps, &executed);
      WriteJsonFile(dir / "metrics.json", r.ToJson());
      std::ofstream(dir / "metrics.txt", std::ios::binary | std::ios::trunc) << r.Table();
      WriteJsonFile(dir / "executed.json", Json{{"objects", PosesToJson(executed)}}, -1);
      return {"metrics.json", "metrics.txt", "executed.json"};
    }
  }
}

void CollectWarnings(const Json& j, RunContext& c) {
  if (!j.contains("warnings")) return;
  for (const Json& w : j.at("warnings")) c.warnings.push_back(w.get<std::string>());
}

void LoadStage(int stage, RunContext& c) {
  const fs::path& dir = c.dir;
  try {
    switch (stage) {
      case kIngest: {
        const Json j = ReadArtifact(dir, "ingest.json");
        c.grasp_frame = j.at("grasp_frame").get<int>();
        c.contacts = ContactSet{};
        for (const Json& p : j.at("contacts").at("points")) c.contacts.points.push_back(ParseVec3(p, "contacts"));
        c.contacts.finger_ids = j.at("contacts").at("finger_ids").get<std::vector<int>>();
        std::vector<std::vector<Eigen::Vector3d>> raw;
        for (const Json& piece : j.at("object").at("pieces")) {
          std::vector<Eigen::Vector3d> verts;
          for (const Json& v : piece) verts.push_back(ParseVec3(v, "object"));
          raw.push_back(std::move(verts));
        }
        c.object = std::make_shared<const ObjectGeometry>(PreprocessObject(
            raw, ParseVec3(j.at("object").at("com"), "object.com"), j.at("object").at("mass").get<double>(), 0.0));
        c.world = std::make_unique<World>(c.hand, c.object, c.config.sim);
        break;
      }
      case kRetarget: {
        const Json j = ReadArtifact(dir, "retarget.json");
        c.plan = PlanFromArtifacts(j, nullptr);
        CollectWarnings(j, c);
        break;
      }
      case kReplay: {
        const Json rt = ReadArtifact(dir, "retarget.json");
        const Json rp = ReadArtifact(dir, "replay.json");
        c.plan = PlanFromArtifacts(rt, &rp);
        break;
      }
      case kConfigure: {
        const Json j = ReadArtifact(dir, "episode.json");
        c.episode = EpisodeConfig::FromJson(j.at("episode"));
        CollectWarnings(j, c);
        break;
      }
      case kTrain: {
        c.grasp = GraspFromJson(ReadArtifact(dir, "grasp.json"));
        c.policy.reset();
        if (!c.config.no_rl) c.policy = GaussianPolicy::Load(dir / "policy.json");
        break;
      }
      case kPlan:
        c.manipulation = ManipulationPlan::FromJson(ReadArtifact(dir, "manipulation.json").at("plan"));
        break;
      case kTrack:
        c.tracking = TrackingFromJson(ReadArtifact(dir, "tracking.json"));
        break;
      default:
        c.report = MetricReport::FromJson(ReadArtifact(dir, "metrics.json"));
        c.executed = PosesFromJson(ReadArtifact(dir, "executed.json").at("objects"), "executed");
        break;
    }
  } catch (const Json::exception& e) {
    throw IntegrityError(StageNames()[stage], std::string("malformed artifact: ") + e.what());
  } catch (const ParseError& e) {
    throw IntegrityError(StageNames()[stage], e.what());
  }
}

void WriteManifest(const fs::path& dir, const RunManifest& m) {
  WriteJsonFile(dir / kManifestFile, m.ToJson());
}

std::optional<RunManifest> ReadManifest(const fs::path& dir) {
  if (!fs::exists(dir / kManifestFile)) return std::nullopt;
  try {
    return RunManifest::FromJson(ReadJsonFile(dir / kManifestFile));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

const std::vector<std::string>& StageNames() {
  static const std::vector<std::string> names{"ingest", "retarget", "replay", "configure",
                                              "train",  "plan",     "track",  "evaluate"};
  return names;
}

int StageIndex(const std::string& name) {
  const auto& names = StageNames();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown stage '" + name + "' (expected one of: " + list + ")");
  }
  return static_cast<int>(it - names.begin());
}

Json RunManifest::ToJson() const {
  Json st = Json::object();
  for (const auto& [name, r] : stages) {
    st[name] = {{"key", r.key}, {"seconds", r.seconds}, {"cached", r.cached}, {"files", r.files}};
  }
  return Json{{"version", version},   {"libraries", LibraryVersions()},
              {"config_hash", config_hash}, {"inputs", inputs},
              {"seed", seed},         {"no_rl", no_rl},
              {"complete", complete}, {"failed_stage", failed_stage},
              {"error", error},       {"warnings", warnings},
              {"stages", st}};
}

RunManifest RunManifest::FromJson(const Json& j) {
  RunManifest m;
  m.version = j.at("version").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.no_rl = j.at("no_rl").get<bool>();
  m.complete = j.at("complete").get<bool>();
  m.failed_stage = j.value("failed_stage", std::string());
  m.error = j.value("error", std::string());
  m.warnings = j.value("warnings", std::vector<std::string>{});
  for (const auto& [name, r] : j.at("stages").items()) {
    StageRecord rec;
    rec.key = r.at("key").get<std::string>();
    rec.seconds = r.at("seconds").get<double>();
    rec.cached = r.value("cached", false);
    rec.files = r.at("files").get<std::map<std::string, std::string>>();
    m.stages[name] = rec;
  }
  return m;
}

TransferBundle RunTransfer(const TransferConfig& config, const RunOptions& options) {
  // Pre-flight: nothing is written until the inputs check out.
  config.Validate();
  const int resume = options.resume_from ? StageIndex(*options.resume_from) : -1;
  RunContext c;
  c.config = config;
  c.dir = config.output_dir;
  try {
    c.hand = std::make_shared<const HandModel>(HandModel::Load(config.hand));
    c.demo = LoadDemo(config.demo);
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid input: ") + e.what());
  }
  if (!c.hand->floating_base()) throw ConfigError("hand " + c.hand->name() + " has no floating base");

  const Json cfg_json = config.ToJson();
  RunManifest manifest;
  manifest.config_hash = Sha256Hex(cfg_json.dump());
  manifest.inputs = {{"hand", Sha256File(config.hand)}, {"demo", Sha256File(config.demo)}};
  manifest.seed = config.seed;
  manifest.no_rl = config.no_rl;

  const std::optional<RunManifest> previous = ReadManifest(c.dir);
  if (resume > 0 && !previous) {
    throw StageError(StageNames()[resume], "cannot resume: no manifest in " + c.dir.string());
  }
  fs::create_directories(c.dir);
  WriteJsonFile(c.dir / kConfigFile, cfg_json);

  std::map<std::string, std::string> upstream;
  for (const auto& [k, h] : manifest.inputs) upstream["input:" + k] = h;

  for (int s = 0; s < kNumStages; ++s) {
    const std::string& name = StageNames()[s];
    const Json key_src{{"stage", name}, {"version", kToolkitVersion}, {"params", StageParams(s, cfg_json)},
                       {"upstream", upstream}};
    StageRecord rec;
    rec.key = Sha256Hex(key_src.dump());
    const StageRecord* old = nullptr;
    if (previous && previous->stages.count(name)) old = &previous->stages.at(name);
    const bool reusable = old && old->key == rec.key && FilesIntact(c.dir, *old);
    if (resume >= 0 && s < resume && !reusable) {
      throw StageError(options.resume_from.value(), "cannot resume: stage '" + name +
                                                        "' is missing, stale or corrupted in " + c.dir.string());
    }
    const bool reuse = reusable && (resume < 0 || s < resume);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (reuse) {
        rec.files = old->files;
        rec.seconds = old->seconds;
        rec.cached = true;
      } else {
        for (const std::string& f : ComputeStage(s, c)) rec.files[f] = Sha256File(c.dir / f);
      }
      LoadStage(s, c);
    } catch (const Error& e) {
      manifest.failed_stage = name;
      manifest.error = e.what();
      manifest.warnings = c.warnings;
      WriteManifest(c.dir, manifest);
      if (const auto* se = dynamic_cast<const StageError*>(&e)) throw *se;
      throw StageError(name, e.what());
    }
    if (!reuse) rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& [f, h] : rec.files) upstream[name + ":" + f] = h;
    manifest.stages[name] = rec;
    manifest.warnings = c.warnings;
    WriteManifest(c.dir, manifest);
    if (options.log) {
      *options.log << "[" << name << "] " << (reuse ? "cached" : "done") << " in " << rec.seconds << " s\n";
    }
  }
  manifest.complete = true;
  WriteManifest(c.dir, manifest);

  TransferBundle b;
  b.dir = c.dir;
  b.plan = std::move(c.plan);
  b.episode = std::move(c.episode);
  b.policy = std::move(c.policy);
  b.grasp = std::move(c.grasp.result);
  b.manipulation = std::move(c.manipulation);
  b.tracking = std::move(c.tracking);
  b.executed = std::move(c.executed);
  b.report = std::move(c.report);
  b.manifest = std::move(manifest);
  return b;
}

namespace {

// Checks the manifest, config hash and every artifact through `last_stage`.
std::pair<RunManifest, TransferConfig> VerifyBundle(const fs::path& dir, int last_stage) {
  if (!fs::exists(dir / kManifestFile)) throw IntegrityError(kManifestFile, "missing from " + dir.string());
  RunManifest m;
  try {
    m = RunManifest::FromJson(ReadJsonFile(dir / kManifestFile));
  } catch (const std::exception& e) {
    throw IntegrityError(kManifestFile, e.what());
  }
  const Json cfg_json = ReadArtifact(dir, kConfigFile);
  if (Sha256Hex(cfg_json.dump()) != m.config_hash) {
    throw IntegrityError(kConfigFile, "does not match the manifest config hash");
  }
  TransferConfig cfg;
  try {
    cfg = TransferConfig::FromJson(cfg_json, dir);
  } catch (const ConfigError& e) {
    throw IntegrityError(kConfigFile, e.what());
  }
  for (int s = 0; s <= last_stage; ++s) {
    const std::string& name = StageNames()[s];
    if (!m.stages.count(name)) throw IntegrityError(dir.string(), "bundle incomplete: stage '" + name + "' missing");
    VerifyFiles(dir, m.stages.at(name));
  }
  return {m, cfg};
}

}  // namespace

MetricReport EvaluateBundle(const fs::path& dir, const std::vector<Pose6>* reference) {
  auto [manifest, cfg] = VerifyBundle(dir, kTrack);
  try {
    const Json rt = ReadArtifact(dir, "retarget.json");
    const Json rp = ReadArtifact(dir, "replay.json");
    const ControlPlan full = PlanFromArtifacts(rt, &rp);
    const EpisodeConfig episode = EpisodeConfig::FromJson(ReadArtifact(dir, "episode.json").at("episode"));
    const GraspArtifact grasp = GraspFromJson(ReadArtifact(dir, "grasp.json"));
    const TrackingResult tracking = TrackingFromJson(ReadArtifact(dir, "tracking.json"));
    std::vector<Pose6> ref;
    double fps = 0.0;
    {
      if (!fs::exists(cfg.demo)) throw IntegrityError(cfg.demo.string(), "reference demo not found");
      if (manifest.inputs.count("demo") && Sha256File(cfg.demo) != manifest.inputs.at("demo")) {
        throw IntegrityError(cfg.demo.string(), "demo changed since the run");
      }
      const DemoSequence demo = LoadDemo(cfg.demo);
      fps = demo.fps;
      ref = reference ? *reference : demo.ObjectTrajectory();
    }
    return ComputeReport({&full, &episode, &grasp, &tracking, &cfg}, ref, fps, nullptr);
  } catch (const Json::exception& e) {
    throw IntegrityError(dir.string(), std::string("malformed artifact: ") + e.what());
  } catch (const ParseError& e) {
    throw IntegrityError(e.where(), e.what());
  }
}

TransferBundle LoadBundle(const fs::path& dir) {
  auto [manifest, cfg] = VerifyBundle(dir, kEvaluate);
  RunContext c;
  c.config = cfg;
  c.dir = dir;
  c.hand = std::make_shared<const HandModel>(HandModel::Load(cfg.hand));
  for (int s = 0; s < kNumStages; ++s) LoadStage(s, c);
  TransferBundle b;
  b.dir = dir;
  b.plan = std::move(c.plan);
  b.episode = std::move(c.episode);
  b.policy = std::move(c.policy);
  b.grasp = std::move(c.grasp.result);
  b.manipulation = std::move(c.manipulation);
  b.tracking = std::move(c.tracking);
  b.executed = std::move(c.executed);
  b.report = std::move(c.report);
  b.manifest = std::move(manifest);
  return b;
}

CorpusSummary ReportCorpus(const fs::path& dir, std::vector<std::string>* tasks) {
  if (!fs::is_directory(dir)) throw ConfigError("corpus directory not found: " + dir.string());
  std::vector<fs::path> found;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "metrics.json") found.push_back(entry.path());
  }
  std::sort(found.begin(), found.end());
  std::vector<MetricReport> reports;
  for (const fs::path& p : found) {
    try {
      reports.push_back(MetricReport::FromJson(ReadJsonFile(p)));
    } catch (const std::exception& e) {
      throw IntegrityError(p.string(), e.what());
    }
    if (tasks) tasks->push_back(fs::relative(p.parent_path(), dir).string());
  }
  return Summarize(reports);
}

}  // namespace dexxfer
