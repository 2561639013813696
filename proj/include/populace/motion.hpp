#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "populace/geometry.hpp"

namespace populace::motion {

inline constexpr double kFps = 30.0;
inline constexpr double kFrameDt = 1.0 / kFps;

enum Joint : int { Pelvis, Spine3, RightWrist, LeftWrist, RightFoot, LeftFoot, kJointCount };

const char* joint_name(int joint);

/// Simplified body state: a ground-projected root plus local keyjoint offsets.
struct Pose {
  Vec2 root_pos{};
  double root_height = 0.95;
  Vec2 heading{1.0, 0.0};
  /// x forward, y left, z up; x/y relative to the root, z above the floor.
  std::array<Vec3, kJointCount> keyjoints{};

  bool operator==(const Pose&) const = default;
};

/// World position of a keyjoint.
Vec3 world_joint(const Pose& pose, int joint);

enum class FeatureGroup : int {
  KeyjointPositions,
  KeyjointVelocities,
  FuturePositions,
  FutureDirections,
  RelativePosition,
  RelativeVelocity,
  RelativeDirection,
  TargetRootHeight,
  kCount
};

inline constexpr int kGroupCount = static_cast<int>(FeatureGroup::kCount);
inline constexpr int kFeatureDims = 3 * kJointCount * 2 + 6 + 6 + 2 + 2 + 2 + 1;
inline constexpr std::array<int, 3> kFutureOffsets = {10, 20, 30};

using FeatureMask = std::bitset<kFeatureDims>;

/// First dimension and width of a group within the feature vector.
std::pair<int, int> group_span(FeatureGroup group);
FeatureGroup group_of_dim(int dim);

struct FeatureVector {
  std::array<double, kFeatureDims> values{};
  /// Dimensions that carry information for this state; the rest are excluded from distances.
  FeatureMask active;
};

/// Keyjoint group dimensions restricted to a joint subset.
FeatureMask joint_mask(std::initializer_list<int> joints);
FeatureMask group_mask(std::initializer_list<FeatureGroup> groups);

enum class MatchMode { Locomotion, Interaction, InPlace };

/// Feature selection per activity type. Interaction with `sitting` adds target root height.
FeatureMask mode_mask(MatchMode mode, bool sitting = false);

struct TrajectorySample {
  Vec2 position{};
  Vec2 direction{1.0, 0.0};

  bool operator==(const TrajectorySample&) const = default;
};
using FutureTrajectory = std::array<TrajectorySample, 3>;

struct MotionTarget {
  Vec2 position{};
  Vec2 direction{1.0, 0.0};
  double root_height = 0.95;

  bool operator==(const MotionTarget&) const = default;
};

/// `history` ends with the current pose; at least two poses are needed for velocities, and the
/// velocity group is masked out otherwise.
FeatureVector extract_features(std::span<const Pose> history, const std::optional<FutureTrajectory>& future,
                               const std::optional<MotionTarget>& target);

struct Clip {
  std::string name;
  std::vector<Pose> frames;
  bool loop = false;
  /// Interaction clips carry the target they were recorded against, in the clip's own frame.
  std::optional<MotionTarget> target;

  bool operator==(const Clip&) const = default;
};

struct GroupWeights {
  std::array<double, kGroupCount> weight;
  GroupWeights() { weight.fill(1.0); }
};

class MotionDatabase {
 public:
  MotionDatabase() = default;
  MotionDatabase(std::string action, std::vector<Clip> clips, GroupWeights weights = {});

  const std::string& action() const { return action_; }
  const std::vector<Clip>& clips() const { return clips_; }
  const GroupWeights& weights() const { return weights_; }
  std::size_t frame_count() const { return features_.size(); }
  bool empty() const { return features_.empty(); }

  /// Raw (unnormalized) features of a stored frame.
  const FeatureVector& features(std::size_t clip, std::size_t frame) const;
  const std::array<double, kFeatureDims>& mean() const { return mean_; }
  const std::array<double, kFeatureDims>& stddev() const { return std_; }
  /// (clip, frame) of a flat frame index.
  std::pair<std::size_t, std::size_t> locate(std::size_t flat) const;

  struct Match {
    std::size_t clip = 0;
    std::size_t frame = 0;
    double cost = 0.0;
  };

  /// Weighted normalized squared distance to a stored frame over the query's active dimensions.
  double cost(const FeatureVector& query, std::size_t clip, std::size_t frame) const;

  /// Lowest-cost frame; ties go to the lowest clip, then the lowest frame.
  /// Throws EmptyDatabase, or EmptyQuery when no dimension is active.
  Match match(const FeatureVector& query) const;

 private:
  std::string action_;
  std::vector<Clip> clips_;
  GroupWeights weights_;
  std::vector<std::size_t> clip_offsets_;
  std::vector<FeatureVector> features_;
  std::vector<std::array<double, kFeatureDims>> normalized_;
  std::array<double, kFeatureDims> mean_{};
  std::array<double, kFeatureDims> std_{};
};

/// Features of every frame of a clip as the database stores them.
std::vector<FeatureVector> clip_features(const Clip& clip);

using MotionLibrary = std::map<std::string, MotionDatabase>;

/// Built-in library labels besides the scene's interaction actions.
inline constexpr const char* kWalk = "walk";
inline constexpr const char* kIdle = "idle";
inline constexpr const char* kSitDown = "sit_down";
inline constexpr const char* kStandUp = "stand_up";

inline constexpr double kStandingHeight = 0.95;
inline constexpr double kSeatedHeight = 0.5;

/// Procedural stand-ins for captured motion: sinusoidal gait, idle sway, sit and stand height
/// ramps, and standing and seated gesture loops for every extra label. Deterministic per seed.
std::map<std::string, std::vector<Clip>> generate_synthetic_clips(const std::vector<std::string>& action_labels,
                                                                  std::uint64_t seed);

MotionLibrary build_library(const std::map<std::string, std::vector<Clip>>& clips, GroupWeights weights = {});

std::string database_to_json(const MotionDatabase& db);
/// Throws SchemaError.
MotionDatabase database_from_json(std::string_view text);

struct MotionInput {
  std::string action;
  MatchMode mode = MatchMode::InPlace;
  /// Where the root should be at the end of this frame.
  Vec2 desired_root{};
  std::optional<Vec2> desired_heading;
  std::optional<FutureTrajectory> future;
  std::optional<MotionTarget> target;
  bool sitting = false;
};

struct MotionParams {
  int search_interval = 10;
  int blend_frames = 5;
  double max_speed = 2.0;        // m/s
  double max_turn_rate = 2 * kPi;  // rad/s
  std::size_t history_length = 2;
};

/// Per-character playback state.
class MotionController {
 public:
  MotionController() = default;
  MotionController(Pose initial, MotionParams params = {});

  /// Plays one frame at 30 fps and returns the new pose. Searches the database of
  /// `input.action` every `search_interval` frames and whenever the action or mode changes.
  const Pose& advance(const MotionLibrary& library, const MotionInput& input);

  const Pose& pose() const { return pose_; }
  std::uint64_t frame() const { return frame_; }
  const std::string& action() const { return action_; }
  std::size_t clip() const { return clip_; }
  std::size_t clip_frame() const { return clip_frame_; }
  /// Frame number of the most recent database switch.
  std::optional<std::uint64_t> last_switch_frame() const { return last_switch_; }
  int searches() const { return searches_; }

 private:
  MotionParams params_;
  Pose pose_;
  std::vector<Pose> history_;
  std::string action_;
  MatchMode mode_ = MatchMode::InPlace;
  std::size_t clip_ = 0;
  std::size_t clip_frame_ = 0;
  int since_search_ = 0;
  std::uint64_t frame_ = 0;
  std::optional<std::uint64_t> last_switch_;
  int blend_left_ = 0;
  Pose blend_from_;
  int searches_ = 0;
};

}  // namespace populace::motion
