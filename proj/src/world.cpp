#include "lilo/world.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lilo {

const char* toString(SkillCategory c) {
  switch (c) {
    case SkillCategory::pick: return "Pick";
    case SkillCategory::place: return "Place";
    case SkillCategory::stack: return "Stack";
    case SkillCategory::hang: return "Hang";
    case SkillCategory::open_drawer: return "OpenDrawer";
    case SkillCategory::close_drawer: return "CloseDrawer";
    case SkillCategory::turn_on: return "TurnOn";
  }
  return "?";
}

const char* toString(ObjectKind k) {
  switch (k) {
    case ObjectKind::rigid: return "rigid";
    case ObjectKind::receptacle: return "receptacle";
    case ObjectKind::surface: return "surface";
    case ObjectKind::articulated_drawer: return "articulated-drawer";
    case ObjectKind::articulated_switch: return "articulated-switch";
  }
  return "?";
}

const char* toString(FailureMode m) {
  switch (m) {
    case FailureMode::no_op: return "no_op";
    case FailureMode::object_dropped: return "object_dropped";
    case FailureMode::object_displaced: return "object_displaced";
  }
  return "?";
}

SkillCategory skillCategoryFromString(const std::string& s) {
  for (SkillCategory c : {SkillCategory::pick, SkillCategory::place, SkillCategory::stack,
                          SkillCategory::hang, SkillCategory::open_drawer,
                          SkillCategory::close_drawer, SkillCategory::turn_on}) {
    if (s == toString(c)) return c;
  }
  throw ConfigError("unknown skill category: " + s);
}

ObjectKind objectKindFromString(const std::string& s) {
  for (ObjectKind k : {ObjectKind::rigid, ObjectKind::receptacle, ObjectKind::surface,
                       ObjectKind::articulated_drawer, ObjectKind::articulated_switch}) {
    if (s == toString(k)) return k;
  }
  throw ConfigError("unknown object kind: " + s);
}

FailureMode failureModeFromString(const std::string& s) {
  for (FailureMode m :
       {FailureMode::no_op, FailureMode::object_dropped, FailureMode::object_displaced}) {
    if (s == toString(m)) return m;
  }
  throw ConfigError("unknown failure mode: " + s);
}

void ObjectSpec::validate() const {
  if (id.empty()) throw ConfigError("object id must be non-empty");
  if ((half_extents.array() <= 0.0).any()) {
    throw ConfigError("object '" + id + "': half_extents must be strictly positive");
  }
  if (initial_articulation < 0.0 || initial_articulation > 1.0) {
    throw ConfigError("object '" + id + "': articulation must be in [0,1]");
  }
}

void SceneSpec::validate() const {
  if (workspace.isEmpty()) throw ConfigError("scene '" + name + "': empty workspace box");
  std::set<std::string> seen;
  for (const auto& o : objects) {
    o.validate();
    if (!seen.insert(o.id).second) {
      throw ConfigError("scene '" + name + "': duplicate object id '" + o.id + "'");
    }
  }
}

bool involvesHolding(SkillCategory c) {
  return c == SkillCategory::place || c == SkillCategory::stack || c == SkillCategory::hang;
}

bool involvesHolding(const SymbolicAction& action) { return involvesHolding(action.skill); }

const std::string& frameObjectId(const SymbolicAction& action) {
  return involvesHolding(action) && !action.target.empty() ? action.target : action.reference;
}

WorldState WorldState::fromScene(const SceneSpec& scene) {
  scene.validate();
  WorldState s;
  s.workspace_ = scene.workspace;
  s.ee_pose_ = scene.ee_start;
  for (const auto& spec : scene.objects) {
    ObjectState os;
    os.spec = spec;
    os.pose = spec.initial_pose;
    os.articulation = isArticulated(spec.kind) ? spec.initial_articulation : 0.0;
    s.objects_.emplace(spec.id, std::move(os));
  }
  return s;
}

const ObjectState& WorldState::object(const std::string& id) const {
  auto it = objects_.find(id);
  if (it == objects_.end()) throw UnknownObject(id);
  return it->second;
}

Eigen::AlignedBox3d WorldState::boxAt(const Posed& pose, const Eigen::Vector3d& half) {
  Eigen::AlignedBox3d box;
  for (int i = 0; i < 8; ++i) {
    const Eigen::Vector3d corner((i & 1) ? half.x() : -half.x(),
                                 (i & 2) ? half.y() : -half.y(),
                                 (i & 4) ? half.z() : -half.z());
    box.extend(pose * corner);
  }
  return box;
}

Eigen::AlignedBox3d WorldState::worldBox(const std::string& id) const {
  const ObjectState& os = object(id);
  return boxAt(os.pose, os.spec.half_extents);
}

WorldState WorldState::withEePose(const Posed& pose) const {
  WorldState out = *this;
  out.ee_pose_ = pose;
  if (out.attachment_) {
    out.objects_.at(out.attachment_->object_id).pose = compose(pose, out.attachment_->grasp);
  }
  return out;
}

WorldState WorldState::withGripper(GripperState g) const {
  WorldState out = *this;
  out.gripper_ = g;
  return out;
}

WorldState WorldState::withObjectPose(const std::string& id, const Posed& pose) const {
  if (isAttached(id)) {
    throw InvariantViolation("cannot move attached object '" + id + "' directly");
  }
  WorldState out = *this;
  auto it = out.objects_.find(id);
  if (it == out.objects_.end()) throw UnknownObject(id);
  it->second.pose = pose;
  return out;
}

WorldState WorldState::withArticulation(const std::string& id, double value) const {
  WorldState out = *this;
  auto it = out.objects_.find(id);
  if (it == out.objects_.end()) throw UnknownObject(id);
  if (!isArticulated(it->second.spec.kind)) {
    throw InvariantViolation("object '" + id + "' is not articulated");
  }
  it->second.articulation = std::clamp(value, 0.0, 1.0);
  return out;
}

WorldState WorldState::withAttachment(const std::string& id, const Posed& grasp) const {
  WorldState out = *this;
  auto it = out.objects_.find(id);
  if (it == out.objects_.end()) throw UnknownObject(id);
  out.attachment_ = Attachment{id, grasp};
  it->second.pose = compose(out.ee_pose_, grasp);
  return out;
}

WorldState WorldState::withoutAttachment() const {
  WorldState out = *this;
  out.attachment_.reset();
  return out;
}

WorldState WorldState::withObjectAdded(const ObjectSpec& spec) const {
  spec.validate();
  if (has(spec.id)) throw ConfigError("object id '" + spec.id + "' already present");
  WorldState out = *this;
  ObjectState os;
  os.spec = spec;
  os.pose = spec.initial_pose;
  os.articulation = isArticulated(spec.kind) ? spec.initial_articulation : 0.0;
  out.objects_.emplace(spec.id, std::move(os));
  return out;
}

Posed estimateObjectPose(const WorldState& state, const SymbolicAction& action,
                         const PerturbationSpec& noise, Rng& rng) {
  const Posed& truth = state.object(frameObjectId(action)).pose;
  return samplePerturbedInit(truth, noise, rng);
}

bool isInside(const WorldState& state, const std::string& obj, const std::string& receptacle,
              const WorldConfig& cfg) {
  const Eigen::Vector3d centroid = state.object(obj).pose.translation;
  const ObjectState& rec = state.object(receptacle);
  // A closed drawer cannot receive anything.
  if (rec.spec.kind == ObjectKind::articulated_drawer && rec.articulation < 0.5) return false;
  Eigen::AlignedBox3d box = state.worldBox(receptacle);
  box.min() -= Eigen::Vector3d(cfg.lateral_tolerance, cfg.lateral_tolerance, cfg.vertical_tolerance);
  box.max() += Eigen::Vector3d(cfg.lateral_tolerance, cfg.lateral_tolerance, cfg.vertical_tolerance);
  return box.contains(centroid);
}

bool isOn(const WorldState& state, const std::string& obj, const std::string& support,
          const WorldConfig& cfg) {
  const Eigen::AlignedBox3d top = state.worldBox(obj);
  const Eigen::AlignedBox3d base = state.worldBox(support);
  const bool overlap_x = top.min().x() < base.max().x() && base.min().x() < top.max().x();
  const bool overlap_y = top.min().y() < base.max().y() && base.min().y() < top.max().y();
  if (!overlap_x || !overlap_y) return false;
  return std::abs(top.min().z() - base.max().z()) < cfg.vertical_tolerance;
}

double clutterLevel(const WorldState& state, const SymbolicAction& action,
                    const WorldConfig& cfg) {
  const Eigen::Vector3d ref = state.object(action.reference).pose.translation;
  int count = 0;
  for (const auto& [id, os] : state.objects()) {
    if (!os.spec.is_distractor || id == action.reference) continue;
    if ((os.pose.translation - ref).norm() <= cfg.clutter_radius) ++count;
  }
  return std::min(1.0, static_cast<double>(count) / std::max(1, cfg.clutter_saturation));
}

double supportHeight(const WorldState& state, double x, double y, const std::string& excluded) {
  double top = 0.0;
  for (const auto& [id, os] : state.objects()) {
    if (id == excluded) continue;
    const Eigen::AlignedBox3d box = state.worldBox(id);
    if (x >= box.min().x() && x <= box.max().x() && y >= box.min().y() && y <= box.max().y()) {
      top = std::max(top, box.max().z());
    }
  }
  return top;
}

WorldState releaseHeldObject(const WorldState& state, double sigma, Rng& rng) {
  if (!state.attachment()) return state;
  const std::string id = state.attachment()->object_id;
  const ObjectState held = state.object(id);

  double x = state.eePose().translation.x() + rng.normal(sigma);
  double y = state.eePose().translation.y() + rng.normal(sigma);
  const Eigen::AlignedBox3d& ws = state.workspace();
  x = std::clamp(x, ws.min().x() + held.spec.half_extents.x(), ws.max().x() - held.spec.half_extents.x());
  y = std::clamp(y, ws.min().y() + held.spec.half_extents.y(), ws.max().y() - held.spec.half_extents.y());

  WorldState out = state.withoutAttachment().withGripper(GripperState::open);
  const double z = supportHeight(out, x, y, id) + held.spec.half_extents.z();
  return out.withObjectPose(id, Posed(held.pose.rotation, Eigen::Vector3d(x, y, z)));
}

WorldState applyDisplacementOnFailure(const WorldState& state, const SymbolicAction& action,
                                      FailureMode mode, const WorldConfig& cfg, Rng& rng) {
  switch (mode) {
    case FailureMode::no_op:
      return state;
    case FailureMode::object_dropped:
      return releaseHeldObject(state, cfg.drop_lateral_sigma, rng);
    case FailureMode::object_displaced: {
      // Displacing the held reference would break attachment rigidity; bump
      // the frame (target) object instead.
      std::string id = action.reference;
      if (state.isAttached(id)) id = frameObjectId(action);
      if (id.empty() || !state.has(id) || state.isAttached(id)) return state;
      const double dx = rng.normal(cfg.displace_sigma);
      const double dy = rng.normal(cfg.displace_sigma);
      const double dyaw = rng.normal(cfg.displace_yaw_sigma);
      if (dx == 0.0 && dy == 0.0 && dyaw == 0.0) return state;
      const ObjectState& os = state.object(id);
      Posed pose = os.pose;
      pose.translation.x() += dx;
      pose.translation.y() += dy;
      pose.rotation = (Eigen::Quaterniond(Eigen::AngleAxisd(dyaw, Eigen::Vector3d::UnitZ())) *
                       pose.rotation)
                          .normalized();
      return state.withObjectPose(id, pose);
    }
  }
  return state;
}

namespace {

bool placeVerified(const WorldState& after, const SymbolicAction& action, const WorldConfig& cfg) {
  const ObjectState& target = after.object(action.target);
  const Eigen::Vector3d obj_pos = after.object(action.reference).pose.translation;
  const Eigen::Vector3d dest =
      target.pose * Eigen::Vector3d(action.place_offset.x(), action.place_offset.y(), 0.0);
  const double xy_dist = (obj_pos.head<2>() - dest.head<2>()).norm();

  const Eigen::AlignedBox3d target_box = after.worldBox(action.target);
  const bool dest_over_target = dest.x() >= target_box.min().x() - cfg.lateral_tolerance &&
                                dest.x() <= target_box.max().x() + cfg.lateral_tolerance &&
                                dest.y() >= target_box.min().y() - cfg.lateral_tolerance &&
                                dest.y() <= target_box.max().y() + cfg.lateral_tolerance;

  const bool contained = target.spec.kind == ObjectKind::receptacle ||
                         target.spec.kind == ObjectKind::articulated_drawer;
  if (dest_over_target) {
    const bool geometric = contained ? isInside(after, action.reference, action.target, cfg)
                                     : isOn(after, action.reference, action.target, cfg);
    if (!geometric) return false;
    return !action.hasOffset() || xy_dist <= cfg.place_zone_tolerance;
  }
  // Offset points beside the target ("right of plate"): a zone on whatever
  // supports that spot.
  if (xy_dist > cfg.place_zone_tolerance) return false;
  const Eigen::AlignedBox3d obj_box = after.worldBox(action.reference);
  const double support =
      supportHeight(after, obj_pos.x(), obj_pos.y(), action.reference);
  return std::abs(obj_box.min().z() - support) < cfg.vertical_tolerance;
}

}  // namespace

bool verifyCondition(const WorldState& before, const WorldState& after,
                     const SymbolicAction& action, const WorldConfig& cfg) {
  try {
    switch (action.skill) {
      case SkillCategory::pick: {
        if (!after.isAttached(action.reference)) return false;
        const double dz = after.object(action.reference).pose.translation.z() -
                          before.object(action.reference).pose.translation.z();
        return dz >= 0.03;
      }
      case SkillCategory::place: {
        if (after.attachment()) return false;
        return placeVerified(after, action, cfg);
      }
      case SkillCategory::stack: {
        if (after.attachment()) return false;
        if (!isOn(after, action.reference, action.target, cfg)) return false;
        const Eigen::Vector3d a = after.object(action.reference).pose.translation;
        const Eigen::Vector3d b = after.object(action.target).pose.translation;
        return (a.head<2>() - b.head<2>()).norm() < cfg.stack_lateral_tolerance;
      }
      case SkillCategory::hang: {
        if (after.attachment()) return false;
        return isOn(after, action.reference, action.target, cfg);
      }
      case SkillCategory::open_drawer: {
        const double b = before.object(action.reference).articulation;
        const double a = after.object(action.reference).articulation;
        return b < 0.9 && a >= 0.9;
      }
      case SkillCategory::close_drawer: {
        const double b = before.object(action.reference).articulation;
        const double a = after.object(action.reference).articulation;
        return b > 0.1 && a <= 0.1;
      }
      case SkillCategory::turn_on:
        return after.object(action.reference).articulation >= 0.9;
    }
  } catch (const Error&) {
    return false;
  }
  return false;
}

}  // namespace lilo
