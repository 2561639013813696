#include "populace/motion.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"
#include "populace/errors.hpp"

namespace populace::motion {

namespace {

constexpr std::array<const char*, kJointCount> kJointNames = {"pelvis",     "spine3",     "right_wrist",
                                                               "left_wrist", "right_foot", "left_foot"};

constexpr std::array<int, kGroupCount> kGroupWidths = {3 * kJointCount, 3 * kJointCount, 6, 6, 2, 2, 2, 1};

constexpr std::array<int, kGroupCount> group_offsets() {
  std::array<int, kGroupCount> out{};
  int acc = 0;
  for (int g = 0; g < kGroupCount; ++g) {
    out[g] = acc;
    acc += kGroupWidths[g];
  }
  return out;
}
constexpr auto kGroupOffsets = group_offsets();

constexpr int offset(FeatureGroup g) { return kGroupOffsets[static_cast<int>(g)]; }

Vec2 turn_toward(Vec2 current, Vec2 goal, double max_angle) {
  const double delta = std::atan2(cross(current, goal), dot(current, goal));
  const double step = std::clamp(delta, -max_angle, max_angle);
  const Vec2 out = rotate(current, step);
  return out / norm(out);
}

}  // namespace

const char* joint_name(int joint) { return kJointNames.at(static_cast<std::size_t>(joint)); }

Vec3 world_joint(const Pose& pose, int joint) {
  const Vec3& local = pose.keyjoints[static_cast<std::size_t>(joint)];
  const Vec2 xy = pose.root_pos + from_local({local.x, local.y}, pose.heading);
  return {xy.x, xy.y, local.z};
}

std::pair<int, int> group_span(FeatureGroup group) {
  return {offset(group), kGroupWidths[static_cast<int>(group)]};
}

FeatureGroup group_of_dim(int dim) {
  for (int g = kGroupCount - 1; g >= 0; --g) {
    if (dim >= kGroupOffsets[g]) return static_cast<FeatureGroup>(g);
  }
  return FeatureGroup::KeyjointPositions;
}

FeatureMask group_mask(std::initializer_list<FeatureGroup> groups) {
  FeatureMask mask;
  for (auto g : groups) {
    const auto [start, width] = group_span(g);
    for (int d = start; d < start + width; ++d) mask.set(static_cast<std::size_t>(d));
  }
  return mask;
}

FeatureMask joint_mask(std::initializer_list<int> joints) {
  FeatureMask mask;
  for (int j : joints) {
    for (auto g : {FeatureGroup::KeyjointPositions, FeatureGroup::KeyjointVelocities}) {
      for (int k = 0; k < 3; ++k) mask.set(static_cast<std::size_t>(offset(g) + 3 * j + k));
    }
  }
  return mask;
}

FeatureMask mode_mask(MatchMode mode, bool sitting) {
  switch (mode) {
    case MatchMode::Locomotion:
      return joint_mask({Pelvis, Spine3, RightFoot, LeftFoot}) |
             group_mask({FeatureGroup::FuturePositions, FeatureGroup::FutureDirections});
    case MatchMode::Interaction: {
      auto mask = group_mask(
          {FeatureGroup::RelativePosition, FeatureGroup::RelativeVelocity, FeatureGroup::RelativeDirection});
      if (sitting) mask |= group_mask({FeatureGroup::TargetRootHeight});
      return mask;
    }
    case MatchMode::InPlace:
      return joint_mask({Pelvis, Spine3, RightWrist, LeftWrist, RightFoot, LeftFoot});
  }
  return {};
}

FeatureVector extract_features(std::span<const Pose> history, const std::optional<FutureTrajectory>& future,
                               const std::optional<MotionTarget>& target) {
  FeatureVector fv;
  if (history.empty()) return fv;
  const Pose& cur = history.back();
  const Pose* prev = history.size() >= 2 ? &history[history.size() - 2] : nullptr;

  for (int j = 0; j < kJointCount; ++j) {
    const Vec3& kj = cur.keyjoints[static_cast<std::size_t>(j)];
    const int base = offset(FeatureGroup::KeyjointPositions) + 3 * j;
    fv.values[base] = kj.x;
    fv.values[base + 1] = kj.y;
    fv.values[base + 2] = kj.z;
  }
  fv.active |= group_mask({FeatureGroup::KeyjointPositions});

  Vec2 root_velocity{};
  if (prev) {
    for (int j = 0; j < kJointCount; ++j) {
      const Vec3 a = world_joint(*prev, j);
      const Vec3 b = world_joint(cur, j);
      const Vec2 v = to_local(Vec2{b.x - a.x, b.y - a.y} * kFps, cur.heading);
      const int base = offset(FeatureGroup::KeyjointVelocities) + 3 * j;
      fv.values[base] = v.x;
      fv.values[base + 1] = v.y;
      fv.values[base + 2] = (b.z - a.z) * kFps;
    }
    root_velocity = (cur.root_pos - prev->root_pos) * kFps;
    fv.active |= group_mask({FeatureGroup::KeyjointVelocities});
  }

  if (future) {
    for (std::size_t k = 0; k < future->size(); ++k) {
      const Vec2 p = to_local((*future)[k].position - cur.root_pos, cur.heading);
      const Vec2 d = to_local((*future)[k].direction, cur.heading);
      fv.values[offset(FeatureGroup::FuturePositions) + 2 * k] = p.x;
      fv.values[offset(FeatureGroup::FuturePositions) + 2 * k + 1] = p.y;
      fv.values[offset(FeatureGroup::FutureDirections) + 2 * k] = d.x;
      fv.values[offset(FeatureGroup::FutureDirections) + 2 * k + 1] = d.y;
    }
    fv.active |= group_mask({FeatureGroup::FuturePositions, FeatureGroup::FutureDirections});
  }

  if (target) {
    const Vec2 rel = to_local(target->position - cur.root_pos, cur.heading);
    const Vec2 vel = to_local(root_velocity, cur.heading);
    const Vec2 dir = to_local(target->direction, cur.heading);
    const int rp = offset(FeatureGroup::RelativePosition), rv = offset(FeatureGroup::RelativeVelocity),
              rd = offset(FeatureGroup::RelativeDirection);
    fv.values[rp] = rel.x;
    fv.values[rp + 1] = rel.y;
    fv.values[rv] = vel.x;
    fv.values[rv + 1] = vel.y;
    fv.values[rd] = dir.x;
    fv.values[rd + 1] = dir.y;
    fv.values[offset(FeatureGroup::TargetRootHeight)] = target->root_height;
    fv.active |= group_mask({FeatureGroup::RelativePosition, FeatureGroup::RelativeDirection,
                             FeatureGroup::TargetRootHeight});
    if (prev) fv.active |= group_mask({FeatureGroup::RelativeVelocity});
  }
  return fv;
}

std::vector<FeatureVector> clip_features(const Clip& clip) {
  const std::size_t n = clip.frames.size();
  std::vector<FeatureVector> out;
  if (n == 0) return out;
  out.reserve(n);

  // Looping clips continue past their end by repeating with the per-cycle root displacement, so
  // velocities and the future trajectory stay smooth across the seam.
  const Vec2 step = n >= 2 ? clip.frames[1].root_pos - clip.frames[0].root_pos : Vec2{};
  const Vec2 cycle = clip.frames[n - 1].root_pos - clip.frames[0].root_pos + step;
  auto frame_at = [&](long long i) {
    if (clip.loop) {
      const long long nn = static_cast<long long>(n);
      const long long wraps = i >= 0 ? i / nn : -((-i + nn - 1) / nn);
      Pose p = clip.frames[static_cast<std::size_t>(i - wraps * nn)];
      p.root_pos = p.root_pos + cycle * static_cast<double>(wraps);
      return p;
    }
    if (i < 0) i = 0;
    if (i < static_cast<long long>(n)) return clip.frames[static_cast<std::size_t>(i)];
    Pose p = clip.frames[n - 1];
    const Vec2 last_step = n >= 2 ? clip.frames[n - 1].root_pos - clip.frames[n - 2].root_pos : Vec2{};
    p.root_pos = p.root_pos + last_step * static_cast<double>(i - static_cast<long long>(n) + 1);
    return p;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const long long ii = static_cast<long long>(i);
    std::array<Pose, 2> hist{};
    if (clip.loop || i > 0) {
      hist = {frame_at(ii - 1), frame_at(ii)};
    } else if (n >= 2) {
      // Forward difference on the first frame of a one-shot clip.
      Pose back = clip.frames[0];
      back.root_pos = clip.frames[0].root_pos - step;
      for (int j = 0; j < kJointCount; ++j) {
        const auto& k0 = clip.frames[0].keyjoints[static_cast<std::size_t>(j)];
        const auto& k1 = clip.frames[1].keyjoints[static_cast<std::size_t>(j)];
        back.keyjoints[static_cast<std::size_t>(j)] = k0 * 2.0 - k1;
      }
      hist = {back, clip.frames[0]};
    } else {
      hist = {clip.frames[0], clip.frames[0]};
    }
    FutureTrajectory fut{};
    for (std::size_t k = 0; k < kFutureOffsets.size(); ++k) {
      const Pose p = frame_at(ii + kFutureOffsets[k]);
      fut[k] = {p.root_pos, p.heading};
    }
    out.push_back(extract_features(hist, fut, clip.target));
  }
  return out;
}

MotionDatabase::MotionDatabase(std::string action, std::vector<Clip> clips, GroupWeights weights)
    : action_(std::move(action)), clips_(std::move(clips)), weights_(weights) {
  for (const auto& clip : clips_) {
    clip_offsets_.push_back(features_.size());
    auto f = clip_features(clip);
    features_.insert(features_.end(), f.begin(), f.end());
  }
  const double count = static_cast<double>(features_.size());
  if (features_.empty()) {
    std_.fill(1.0);
    return;
  }
  for (const auto& f : features_) {
    for (int d = 0; d < kFeatureDims; ++d) mean_[d] += f.values[d] / count;
  }
  for (const auto& f : features_) {
    for (int d = 0; d < kFeatureDims; ++d) std_[d] += (f.values[d] - mean_[d]) * (f.values[d] - mean_[d]) / count;
  }
  for (auto& s : std_) s = s > 1e-18 ? std::sqrt(s) : 1.0;
  normalized_.reserve(features_.size());
  for (const auto& f : features_) {
    std::array<double, kFeatureDims> z{};
    for (int d = 0; d < kFeatureDims; ++d) z[d] = (f.values[d] - mean_[d]) / std_[d];
    normalized_.push_back(z);
  }
}

const FeatureVector& MotionDatabase::features(std::size_t clip, std::size_t frame) const {
  return features_.at(clip_offsets_.at(clip) + frame);
}

std::pair<std::size_t, std::size_t> MotionDatabase::locate(std::size_t flat) const {
  const auto it = std::upper_bound(clip_offsets_.begin(), clip_offsets_.end(), flat);
  const std::size_t clip = static_cast<std::size_t>(it - clip_offsets_.begin()) - 1;
  return {clip, flat - clip_offsets_[clip]};
}

double MotionDatabase::cost(const FeatureVector& query, std::size_t clip, std::size_t frame) const {
  const auto& f = features(clip, frame);
  double total = 0.0;
  for (int d = 0; d < kFeatureDims; ++d) {
    if (!query.active.test(static_cast<std::size_t>(d))) continue;
    const double diff = (query.values[d] - f.values[d]) / std_[d];
    total += weights_.weight[static_cast<int>(group_of_dim(d))] * diff * diff;
  }
  return total;
}

MotionDatabase::Match MotionDatabase::match(const FeatureVector& query) const {
  if (features_.empty()) throw EmptyDatabase("motion database '" + action_ + "' has no frames");
  if (query.active.none()) throw EmptyQuery("query has no active feature dimension");

  std::vector<int> dims;
  std::vector<double> w;
  std::vector<double> q;
  for (int d = 0; d < kFeatureDims; ++d) {
    if (!query.active.test(static_cast<std::size_t>(d))) continue;
    dims.push_back(d);
    w.push_back(weights_.weight[static_cast<int>(group_of_dim(d))]);
    q.push_back((query.values[d] - mean_[d]) / std_[d]);
  }

  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < normalized_.size(); ++i) {
    const auto& z = normalized_[i];
    double c = 0.0;
    std::size_t k = 0;
    for (; k < dims.size(); ++k) {
      const double diff = q[k] - z[dims[k]];
      c += w[k] * diff * diff;
      if (c > best_cost) break;  // cannot win; partial sums only grow
    }
    if (k == dims.size() && c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  const auto [clip, frame] = locate(best);
  // Report the cost in the same form as cost() so callers can compare candidates exactly.
  return {clip, frame, cost(query, clip, frame)};
}

// ---------------------------------------------------------------- synthetic clips

namespace {

Pose standing_pose(double height = kStandingHeight) {
  Pose p;
  p.root_height = height;
  const double drop = kStandingHeight - height;
  p.keyjoints[Pelvis] = {0.0, 0.0, height};
  p.keyjoints[Spine3] = {0.0, 0.0, height + 0.4};
  p.keyjoints[RightWrist] = {0.05, -0.25, height - 0.05 + 0.2 * (drop > 0 ? 1.0 : 0.0)};
  p.keyjoints[LeftWrist] = {0.05, 0.25, height - 0.05 + 0.2 * (drop > 0 ? 1.0 : 0.0)};
  p.keyjoints[RightFoot] = {0.45 * drop / (kStandingHeight - kSeatedHeight), -0.1, 0.05};
  p.keyjoints[LeftFoot] = {0.45 * drop / (kStandingHeight - kSeatedHeight), 0.1, 0.05};
  return p;
}

Clip walk_clip(double speed, double phase, int cycles) {
  Clip clip;
  clip.loop = true;
  const double stride = 0.35 + 0.25 * speed;  // meters per step
  const double step_freq = speed / stride;     // steps per second
  const int period = std::max(8, static_cast<int>(std::lround(2.0 * kFps / step_freq)));
  const double per_frame = speed / kFps;
  clip.name = "walk_" + std::to_string(static_cast<int>(std::lround(speed * 100)));
  for (int i = 0; i < period * cycles; ++i) {
    const double t = 2.0 * kPi * i / period + phase;
    Pose p = standing_pose();
    p.root_pos = {per_frame * i, 0.0};
    p.keyjoints[Pelvis].z = kStandingHeight + 0.02 * std::cos(2 * t);
    p.keyjoints[Spine3].z = kStandingHeight + 0.4 + 0.02 * std::cos(2 * t);
    p.keyjoints[RightFoot] = {0.5 * stride * std::sin(t), -0.1, 0.05 + 0.08 * std::max(0.0, std::cos(t))};
    p.keyjoints[LeftFoot] = {0.5 * stride * std::sin(t + kPi), 0.1, 0.05 + 0.08 * std::max(0.0, std::cos(t + kPi))};
    p.keyjoints[RightWrist].x = 0.05 - 0.2 * stride * std::sin(t);
    p.keyjoints[LeftWrist].x = 0.05 - 0.2 * stride * std::sin(t + kPi);
    clip.frames.push_back(p);
  }
  return clip;
}

Clip idle_clip(double sway, int period, double height, const std::string& name) {
  Clip clip;
  clip.name = name;
  clip.loop = true;
  for (int i = 0; i < period; ++i) {
    const double t = 2.0 * kPi * i / period;
    Pose p = standing_pose(height);
    p.keyjoints[Pelvis].y = sway * std::sin(t);
    p.keyjoints[Spine3].y = 1.5 * sway * std::sin(t);
    p.keyjoints[RightWrist].y -= 0.5 * sway * std::sin(t);
    p.keyjoints[LeftWrist].y -= 0.5 * sway * std::sin(t);
    clip.frames.push_back(p);
  }
  return clip;
}

Clip height_ramp(double from, double to, int frames, const std::string& name) {
  Clip clip;
  clip.name = name;
  for (int i = 0; i < frames; ++i) {
    const double s = frames > 1 ? static_cast<double>(i) / (frames - 1) : 1.0;
    const double eased = s * s * (3 - 2 * s);  // smoothstep keeps the ramp monotone
    clip.frames.push_back(standing_pose(from + (to - from) * eased));
  }
  clip.target = MotionTarget{{0.0, 0.0}, {1.0, 0.0}, to};
  return clip;
}

Clip gesture_clip(const std::string& name, double height, double freq, double amp, double phase, bool two_handed) {
  Clip clip;
  clip.name = name;
  clip.loop = true;
  const int period = std::max(10, static_cast<int>(std::lround(kFps / freq)));
  for (int i = 0; i < period; ++i) {
    const double t = 2.0 * kPi * i / period + phase;
    Pose p = standing_pose(height);
    p.keyjoints[RightWrist].x += 0.15 + amp * std::sin(t);
    p.keyjoints[RightWrist].z += 0.3 + amp * std::cos(t);
    if (two_handed) {
      p.keyjoints[LeftWrist].x += 0.15 + amp * std::sin(t + 0.5);
      p.keyjoints[LeftWrist].z += 0.3 + amp * std::cos(t + 0.5);
    }
    p.keyjoints[Spine3].x = 0.03 * std::sin(t);
    clip.frames.push_back(p);
  }
  return clip;
}

}  // namespace

std::map<std::string, std::vector<Clip>> generate_synthetic_clips(const std::vector<std::string>& action_labels,
                                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::map<std::string, std::vector<Clip>> out;

  auto& walk = out[kWalk];
  for (double speed : {0.8, 1.2, 1.6}) walk.push_back(walk_clip(speed, 2.0 * kPi * unit(rng), 2));

  auto& idle = out[kIdle];
  idle.push_back(idle_clip(0.01 + 0.01 * unit(rng), 90, kStandingHeight, "idle_standing"));
  idle.push_back(idle_clip(0.005 + 0.005 * unit(rng), 120, kSeatedHeight, "idle_seated"));

  out[kSitDown].push_back(height_ramp(kStandingHeight, kSeatedHeight, 30, "sit_down"));
  out[kStandUp].push_back(height_ramp(kSeatedHeight, kStandingHeight, 30, "stand_up"));

  for (const auto& label : action_labels) {
    if (out.contains(label)) continue;
    const double freq = 0.3 + 0.9 * unit(rng);
    const double amp = 0.05 + 0.2 * unit(rng);
    const double phase = 2.0 * kPi * unit(rng);
    const bool two_handed = unit(rng) < 0.5;
    auto& clips = out[label];
    clips.push_back(gesture_clip(label + "_standing", kStandingHeight, freq, amp, phase, two_handed));
    clips.push_back(gesture_clip(label + "_seated", kSeatedHeight, freq, amp * 0.8, phase, two_handed));
  }
  return out;
}

MotionLibrary build_library(const std::map<std::string, std::vector<Clip>>& clips, GroupWeights weights) {
  MotionLibrary lib;
  for (const auto& [label, set] : clips) lib.emplace(label, MotionDatabase(label, set, weights));
  return lib;
}

// ---------------------------------------------------------------- serialization

namespace {
constexpr int kDbVersion = 1;
constexpr const char* kDbFormat = "populace-motion-db";

nlohmann::json target_json(const MotionTarget& t) {
  return {{"position", {t.position.x, t.position.y}},
          {"direction", {t.direction.x, t.direction.y}},
          {"root_height", t.root_height}};
}
}  // namespace

std::string database_to_json(const MotionDatabase& db) {
  nlohmann::json clips = nlohmann::json::array();
  for (const auto& clip : db.clips()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& p : clip.frames) {
      nlohmann::json row = {p.root_pos.x, p.root_pos.y, p.root_height, p.heading.x, p.heading.y};
      for (const auto& kj : p.keyjoints) {
        row.push_back(kj.x);
        row.push_back(kj.y);
        row.push_back(kj.z);
      }
      rows.push_back(std::move(row));
    }
    nlohmann::json c = {{"name", clip.name}, {"loop", clip.loop}, {"frames", std::move(rows)}};
    if (clip.target) c["target"] = target_json(*clip.target);
    clips.push_back(std::move(c));
  }
  return nlohmann::json{{"format", kDbFormat},
                        {"version", kDbVersion},
                        {"action", db.action()},
                        {"weights", db.weights().weight},
                        {"clips", std::move(clips)}}
      .dump();
}

MotionDatabase database_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.value("format", "") != kDbFormat) throw SchemaError("not a motion database document");
    if (doc.at("version").get<int>() != kDbVersion) {
      throw SchemaError("unsupported motion database version " + doc.at("version").dump());
    }
    GroupWeights weights;
    if (doc.contains("weights")) weights.weight = doc.at("weights").get<std::array<double, kGroupCount>>();
    std::vector<Clip> clips;
    for (const auto& c : doc.at("clips")) {
      Clip clip;
      clip.name = c.at("name").get<std::string>();
      clip.loop = c.value("loop", false);
      if (c.contains("target")) {
        const auto& t = c.at("target");
        clip.target = MotionTarget{{t.at("position")[0], t.at("position")[1]},
                                   {t.at("direction")[0], t.at("direction")[1]},
                                   t.at("root_height").get<double>()};
      }
      for (const auto& row : c.at("frames")) {
        if (row.size() != 5 + 3 * kJointCount) throw SchemaError("pose row has " + std::to_string(row.size()) + " values");
        Pose p;
        p.root_pos = {row[0], row[1]};
        p.root_height = row[2];
        p.heading = {row[3], row[4]};
        for (int j = 0; j < kJointCount; ++j) {
          p.keyjoints[static_cast<std::size_t>(j)] = {row[5 + 3 * j], row[6 + 3 * j], row[7 + 3 * j]};
        }
        clip.frames.push_back(p);
      }
      clips.push_back(std::move(clip));
    }
    return MotionDatabase(doc.at("action").get<std::string>(), std::move(clips), weights);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("motion database: ") + e.what());
  }
}

// ---------------------------------------------------------------- playback

MotionController::MotionController(Pose initial, MotionParams params)
    : params_(params), pose_(initial), history_{initial}, blend_from_(initial) {}

const Pose& MotionController::advance(const MotionLibrary& library, const MotionInput& input) {
  auto it = library.find(input.action);
  if (it == library.end()) it = library.find(kIdle);
  if (it == library.end() || it->second.empty()) {
    throw EmptyDatabase("no motion database for action '" + input.action + "'");
  }
  const MotionDatabase& db = it->second;
  const bool switched = frame_ == 0 || input.action != action_ || input.mode != mode_;

  std::size_t next = clip_frame_;
  if (!switched) {
    const Clip& clip = db.clips()[clip_];
    next = clip_frame_ + 1;
    if (next >= clip.frames.size()) next = clip.loop ? 0 : clip.frames.size() - 1;
  }

  ++since_search_;
  if (switched || since_search_ >= params_.search_interval) {
    FeatureVector query = extract_features(history_, input.future, input.target);
    FeatureMask wanted = mode_mask(input.mode, input.sitting) & query.active;
    if (wanted.none()) wanted = mode_mask(MatchMode::InPlace) & query.active;
    query.active = wanted;
    auto best = db.match(query);
    // Keep playing on ties so that equal-cost frames do not restart the clip.
    if (!switched && db.cost(query, clip_, next) <= best.cost + 1e-12) {
      best = {clip_, next, 0.0};
    }
    if (switched || best.clip != clip_ || best.frame != next) {
      blend_from_ = pose_;
      blend_left_ = params_.blend_frames;
    }
    if (input.action != action_ || frame_ == 0) last_switch_ = frame_;
    clip_ = best.clip;
    clip_frame_ = best.frame;
    since_search_ = 0;
    ++searches_;
  } else {
    clip_frame_ = next;
  }
  action_ = input.action;
  mode_ = input.mode;

  const Pose& src = db.clips()[clip_].frames[clip_frame_];
  Pose out = pose_;
  out.keyjoints = src.keyjoints;
  out.root_height = src.root_height;
  if (blend_left_ > 0) {
    const double w = static_cast<double>(blend_left_) / (params_.blend_frames + 1);
    for (std::size_t j = 0; j < out.keyjoints.size(); ++j) {
      out.keyjoints[j] = out.keyjoints[j] * (1.0 - w) + blend_from_.keyjoints[j] * w;
    }
    out.root_height = out.root_height * (1.0 - w) + blend_from_.root_height * w;
    --blend_left_;
  }

  Vec2 delta = input.desired_root - pose_.root_pos;
  const double max_step = params_.max_speed * kFrameDt;
  if (norm(delta) > max_step) delta = delta * (max_step / norm(delta));
  out.root_pos = pose_.root_pos + delta;

  std::optional<Vec2> goal = input.desired_heading;
  if (!goal && norm(delta) > 1e-6) goal = delta / norm(delta);
  if (goal) {
    if (auto unit = normalized(*goal)) out.heading = turn_toward(pose_.heading, *unit, params_.max_turn_rate * kFrameDt);
  }

  pose_ = out;
  history_.push_back(out);
  if (history_.size() > std::max<std::size_t>(2, params_.history_length)) history_.erase(history_.begin());
  ++frame_;
  return pose_;
}

}  // namespace populace::motion
