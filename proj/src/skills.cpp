#include "lilo/skills.hpp"

#include <algorithm>
#include <cmath>

namespace lilo {

void SkillModel::validate(SkillCategory category) const {
  if (base_success < 0.0 || base_success > 1.0) {
    throw ConfigError("base_success must be in [0,1]");
  }
  if ((pose_error_scale.array() <= 0.0).any() || (training_radius.array() <= 0.0).any()) {
    throw ConfigError("pose_error_scale and training_radius must be strictly positive");
  }
  if (clutter_penalty < 0.0 || clutter_penalty > 1.0) {
    throw ConfigError("clutter_penalty must be in [0,1]");
  }
  if (logistic_slope <= 0.0) throw ConfigError("logistic_slope must be positive");
  double sum = 0.0;
  for (const auto& [mode, w] : failure_mode_weights) {
    if (w < 0.0) throw ConfigError("failure mode weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("failure mode weights must sum to 1");
  if (!involvesHolding(category)) {
    auto it = failure_mode_weights.find(FailureMode::object_dropped);
    if (it != failure_mode_weights.end() && it->second != 0.0) {
      throw ConfigError(std::string("object_dropped weight must be 0 for non-holding skill ") +
                        toString(category));
    }
  }
}

SkillModelSet SkillModelSet::defaults() {
  SkillModelSet set;
  SkillModel pick;
  pick.base_success = 0.93;
  pick.failure_mode_weights = {{FailureMode::no_op, 0.7},
                               {FailureMode::object_dropped, 0.0},
                               {FailureMode::object_displaced, 0.3}};
  set.models[SkillCategory::pick] = pick;

  SkillModel transport;
  transport.base_success = 0.93;
  transport.failure_mode_weights = {{FailureMode::no_op, 0.15},
                                    {FailureMode::object_dropped, 0.7},
                                    {FailureMode::object_displaced, 0.15}};
  set.models[SkillCategory::place] = transport;
  SkillModel stack = transport;
  stack.base_success = 0.90;
  set.models[SkillCategory::stack] = stack;
  set.models[SkillCategory::hang] = stack;

  SkillModel articulated;
  articulated.base_success = 0.97;
  articulated.failure_mode_weights = {{FailureMode::no_op, 1.0},
                                      {FailureMode::object_dropped, 0.0},
                                      {FailureMode::object_displaced, 0.0}};
  set.models[SkillCategory::open_drawer] = articulated;
  set.models[SkillCategory::close_drawer] = articulated;
  set.models[SkillCategory::turn_on] = articulated;
  set.validate();
  return set;
}

const SkillModel& SkillModelSet::lookup(SkillCategory c) const {
  auto it = models.find(c);
  if (it == models.end()) {
    throw ConfigError(std::string("no skill model for category ") + toString(c));
  }
  return it->second;
}

void SkillModelSet::validate() const {
  for (const auto& [category, model] : models) model.validate(category);
}

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double channelFactor(double err, double scale, double radius, double slope) {
  const double eff = std::max(scale, radius);
  return logistic(slope * (1.0 - err / eff)) / logistic(slope);
}

int nominalSteps(SkillCategory c) {
  switch (c) {
    case SkillCategory::pick: return 60;
    case SkillCategory::place: return 80;
    case SkillCategory::stack: return 90;
    case SkillCategory::hang: return 90;
    default: return 40;
  }
}

}  // namespace

double successProbability(const SkillModel& model, double err_trans, double err_rot,
                          double clutter, bool masking_on) {
  const double f_trans = channelFactor(err_trans, model.pose_error_scale.x(),
                                       model.training_radius.x(), model.logistic_slope);
  const double f_rot = channelFactor(err_rot, model.pose_error_scale.y(),
                                     model.training_radius.y(), model.logistic_slope);
  const double f_clutter = masking_on ? 1.0 : 1.0 - model.clutter_penalty * clutter;
  return std::clamp(model.base_success * f_trans * f_rot * f_clutter, 0.0, 1.0);
}

std::pair<double, double> measurePoseError(const WorldState& state, const SymbolicAction& action,
                                           const InteractionConfig& cfg) {
  const Posed& truth = state.object(frameObjectId(action)).pose;
  const Posed canonical = approachPose(truth, action.skill, cfg.offsets);
  return {translationDistance(state.eePose(), canonical),
          rotationAngle(state.eePose(), canonical)};
}

namespace {

WorldState applyPick(const WorldState& state, const SymbolicAction& action,
                     const InteractionConfig& cfg) {
  WorldState out = state;
  if (out.attachment()) {
    Rng none(0);  // deterministic release straight down
    out = releaseHeldObject(out, 0.0, none);
  }
  const ObjectState& obj = out.object(action.reference);
  Posed grasp_pose(faceDownRotation(),
                   obj.pose.translation + Eigen::Vector3d(0, 0, obj.spec.half_extents.z()));
  out = out.withEePose(grasp_pose);
  out = out.withAttachment(action.reference, relativePose(grasp_pose, obj.pose));
  out = out.withGripper(GripperState::closed);
  Posed lifted = grasp_pose;
  lifted.translation.z() += cfg.lift_height;
  return out.withEePose(lifted);
}

WorldState applyTransport(const WorldState& state, const SymbolicAction& action,
                          const InteractionConfig& cfg) {
  WorldState out = state;
  const ObjectState& obj = out.object(action.reference);
  const ObjectState& target = out.object(action.target);
  const Eigen::AlignedBox3d target_box = out.worldBox(action.target);
  const Eigen::Vector3d dest_xy =
      target.pose * Eigen::Vector3d(action.place_offset.x(), action.place_offset.y(), 0.0);

  double z;
  if (action.skill == SkillCategory::place &&
      (target.spec.kind == ObjectKind::receptacle ||
       target.spec.kind == ObjectKind::articulated_drawer)) {
    z = target_box.min().z() + obj.spec.half_extents.z() + cfg.place_gap;
  } else {
    // Stack/hang/surface placement: rest on the target's top face.
    z = target_box.max().z() + obj.spec.half_extents.z() + cfg.place_gap;
  }
  Eigen::Vector3d dest(dest_xy.x(), dest_xy.y(), z);
  if (action.hasOffset() && action.skill == SkillCategory::place) {
    // Offsets may point beside the target; rest on whatever supports the spot.
    const Eigen::AlignedBox3d tb = target_box;
    const bool over_target = dest.x() >= tb.min().x() && dest.x() <= tb.max().x() &&
                             dest.y() >= tb.min().y() && dest.y() <= tb.max().y();
    if (!over_target) {
      WorldState without = out.withoutAttachment();
      dest.z() = supportHeight(without, dest.x(), dest.y(), action.reference) +
                 obj.spec.half_extents.z() + cfg.place_gap;
    }
  }
  out = out.withoutAttachment().withGripper(GripperState::open);
  return out.withObjectPose(action.reference, Posed(Posed::Quat::Identity(), dest));
}

WorldState applyArticulated(const WorldState& state, const SymbolicAction& action) {
  const double value = action.skill == SkillCategory::close_drawer ? 0.0 : 1.0;
  return state.withArticulation(action.reference, value);
}

}  // namespace

WorldState applySkillEffect(const WorldState& state, const SymbolicAction& action,
                            const InteractionConfig& cfg) {
  switch (action.skill) {
    case SkillCategory::pick:
      return applyPick(state, action, cfg);
    case SkillCategory::place:
    case SkillCategory::stack:
    case SkillCategory::hang:
      return applyTransport(state, action, cfg);
    case SkillCategory::open_drawer:
    case SkillCategory::close_drawer:
    case SkillCategory::turn_on:
      return applyArticulated(state, action);
  }
  return state;
}

namespace {

FailureMode drawFailureMode(const SkillModel& model, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& [mode, w] : model.failure_mode_weights) {
    acc += w;
    if (u < acc) return mode;
  }
  return FailureMode::no_op;
}

}  // namespace

std::pair<WorldState, SkillOutcome> executeInteraction(const WorldState& state,
                                                       const SymbolicAction& action,
                                                       const SkillModel& model, bool masking_on,
                                                       const InteractionConfig& cfg, Rng& rng) {
  SkillOutcome outcome;
  std::tie(outcome.pose_error_trans, outcome.pose_error_rot) =
      measurePoseError(state, action, cfg);
  const double clutter = clutterLevel(state, action, cfg.world);
  const double p = successProbability(model, outcome.pose_error_trans, outcome.pose_error_rot,
                                      clutter, masking_on);
  outcome.success = rng.uniform() < p;
  outcome.steps_consumed = nominalSteps(action.skill);
  if (outcome.success) {
    return {applySkillEffect(state, action, cfg), outcome};
  }
  outcome.failure_mode = drawFailureMode(model, rng);
  return {applyDisplacementOnFailure(state, action, outcome.failure_mode, cfg.world, rng),
          outcome};
}

std::pair<WorldState, SkillOutcome> ScriptedPolicy::execute(const WorldState& state,
                                                            const SymbolicAction& action,
                                                            bool /*masking_on*/, Rng& rng) {
  std::pair<bool, FailureMode> step{true, FailureMode::no_op};
  if (cursor_ < script_.size()) step = script_[cursor_++];

  SkillOutcome outcome;
  std::tie(outcome.pose_error_trans, outcome.pose_error_rot) =
      measurePoseError(state, action, cfg_);
  outcome.success = step.first;
  outcome.steps_consumed = nominalSteps(action.skill);
  if (outcome.success) {
    return {applySkillEffect(state, action, cfg_), outcome};
  }
  outcome.failure_mode = step.second;
  return {applyDisplacementOnFailure(state, action, outcome.failure_mode, cfg_.world, rng),
          outcome};
}

}  // namespace lilo
