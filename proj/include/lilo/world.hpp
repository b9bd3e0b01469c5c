#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "lilo/errors.hpp"
#include "lilo/geometry.hpp"
#include "lilo/random.hpp"

namespace lilo {

enum class SkillCategory { pick, place, stack, hang, open_drawer, close_drawer, turn_on };
enum class ObjectKind { rigid, receptacle, surface, articulated_drawer, articulated_switch };
enum class GripperState { open, closed };
enum class FailureMode { no_op, object_dropped, object_displaced };

const char* toString(SkillCategory c);
const char* toString(ObjectKind k);
const char* toString(FailureMode m);
SkillCategory skillCategoryFromString(const std::string& s);
ObjectKind objectKindFromString(const std::string& s);
FailureMode failureModeFromString(const std::string& s);

inline bool isArticulated(ObjectKind k) {
  return k == ObjectKind::articulated_drawer || k == ObjectKind::articulated_switch;
}

/// Static description of one scene object: an axis-aligned box of the given
/// half extents in its own frame.
struct ObjectSpec {
  std::string id;
  ObjectKind kind = ObjectKind::rigid;
  Eigen::Vector3d half_extents = Eigen::Vector3d::Zero();
  bool is_distractor = false;
  Posed initial_pose;
  double initial_articulation = 0.0;

  void validate() const;
};

struct SceneSpec {
  std::string name;
  Eigen::AlignedBox3d workspace;
  Posed ee_start;
  std::vector<ObjectSpec> objects;

  void validate() const;
};

/// Parameterized skill predicate: category, reference object, and optional
/// parameters (target id for transport skills, lateral placement offset in
/// the target frame).
struct SymbolicAction {
  SkillCategory skill = SkillCategory::pick;
  std::string reference;
  std::string target;                       // empty when the skill takes none
  Eigen::Vector2d place_offset{0.0, 0.0};   // meters, in the target frame

  bool hasOffset() const { return place_offset.squaredNorm() > 0.0; }
};

bool involvesHolding(const SymbolicAction& action);
bool involvesHolding(SkillCategory c);

/// Object id whose frame anchors reaching and interaction: the transport
/// target for holding skills, the reference object otherwise.
const std::string& frameObjectId(const SymbolicAction& action);

struct Attachment {
  std::string object_id;
  Posed grasp;  // held pose in the end-effector frame
};

struct ObjectState {
  ObjectSpec spec;
  Posed pose;
  double articulation = 0.0;
};

/// Kinematic world snapshot. Immutable: every mutator returns a new state,
/// so concurrent trials can each own their own copy. The invariant that an
/// attached object rides rigidly on the end-effector is maintained by
/// construction.
class WorldState {
 public:
  WorldState() = default;
  static WorldState fromScene(const SceneSpec& scene);

  bool has(const std::string& id) const { return objects_.count(id) > 0; }
  const ObjectState& object(const std::string& id) const;
  const std::map<std::string, ObjectState>& objects() const { return objects_; }

  const Posed& eePose() const { return ee_pose_; }
  GripperState gripper() const { return gripper_; }
  const std::optional<Attachment>& attachment() const { return attachment_; }
  bool isAttached(const std::string& id) const {
    return attachment_ && attachment_->object_id == id;
  }
  const Eigen::AlignedBox3d& workspace() const { return workspace_; }

  /// World-frame axis-aligned bounding box of the object's (possibly rotated)
  /// body box. Exact for yaw-free poses, conservative otherwise.
  Eigen::AlignedBox3d worldBox(const std::string& id) const;
  static Eigen::AlignedBox3d boxAt(const Posed& pose, const Eigen::Vector3d& half_extents);

  [[nodiscard]] WorldState withEePose(const Posed& pose) const;
  [[nodiscard]] WorldState withGripper(GripperState g) const;
  [[nodiscard]] WorldState withObjectPose(const std::string& id, const Posed& pose) const;
  [[nodiscard]] WorldState withArticulation(const std::string& id, double value) const;
  [[nodiscard]] WorldState withAttachment(const std::string& id, const Posed& grasp) const;
  [[nodiscard]] WorldState withoutAttachment() const;
  [[nodiscard]] WorldState withObjectAdded(const ObjectSpec& spec) const;

 private:
  std::map<std::string, ObjectState> objects_;
  Posed ee_pose_;
  GripperState gripper_ = GripperState::open;
  std::optional<Attachment> attachment_;
  Eigen::AlignedBox3d workspace_;
};

/// Geometric predicate tolerances and failure-displacement magnitudes.
struct WorldConfig {
  double lateral_tolerance = 0.01;    // containment box inflation, m
  double vertical_tolerance = 0.015;  // resting-gap tolerance, m
  double stack_lateral_tolerance = 0.03;
  double place_zone_tolerance = 0.06;  // offset-placement proximity, m
  double clutter_radius = 0.25;
  int clutter_saturation = 5;
  double drop_lateral_sigma = 0.03;
  double displace_sigma = 0.03;
  double displace_yaw_sigma = 0.1;
};

/// Ground-truth pose of the action's frame object, right-perturbed by a
/// sample from `noise`. Zero sigma gives the oracle estimator.
Posed estimateObjectPose(const WorldState& state, const SymbolicAction& action,
                         const PerturbationSpec& noise, Rng& rng);

/// Geometric skill verification comparing pre/post interaction states.
/// Returns false (never throws) on unverifiable geometry.
bool verifyCondition(const WorldState& before, const WorldState& after,
                     const SymbolicAction& action, const WorldConfig& cfg = {});

bool isInside(const WorldState& state, const std::string& obj, const std::string& receptacle,
              const WorldConfig& cfg = {});
bool isOn(const WorldState& state, const std::string& obj, const std::string& support,
          const WorldConfig& cfg = {});

/// Fraction in [0,1]: distractor count within clutter_radius of the reference
/// object's centroid, over the saturation count.
double clutterLevel(const WorldState& state, const SymbolicAction& action,
                    const WorldConfig& cfg = {});

/// Top z of the highest body whose footprint contains (x, y), excluding
/// `excluded`; the table plane z=0 otherwise.
double supportHeight(const WorldState& state, double x, double y,
                     const std::string& excluded = {});

/// Detach the held object (if any) and rest it under the end-effector with
/// lateral noise `sigma`. Deterministic for sigma = 0.
WorldState releaseHeldObject(const WorldState& state, double sigma, Rng& rng);

WorldState applyDisplacementOnFailure(const WorldState& state, const SymbolicAction& action,
                                      FailureMode mode, const WorldConfig& cfg, Rng& rng);

}  // namespace lilo
