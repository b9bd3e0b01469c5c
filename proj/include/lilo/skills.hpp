#pragma once

#include <map>
#include <utility>
#include <vector>

#include "lilo/planner.hpp"
#include "lilo/world.hpp"

namespace lilo {

/// Parametric stand-in for a learned interaction policy. Success probability
/// decays logistically with the start-pose error relative to the larger of
/// pose_error_scale and training_radius (per translation/rotation channel),
/// and linearly with clutter when masking is off.
struct SkillModel {
  double base_success = 0.93;
  Eigen::Vector2d pose_error_scale{0.01, 0.05};  // (m, rad) decay floors
  Eigen::Vector2d training_radius{0.10, 0.50};   // (m, rad) perturbation radius trained under
  double clutter_penalty = 0.9;                  // mass removed at clutter 1, masking off
  double logistic_slope = 4.0;
  std::map<FailureMode, double> failure_mode_weights = {
      {FailureMode::no_op, 1.0},
      {FailureMode::object_dropped, 0.0},
      {FailureMode::object_displaced, 0.0}};

  void validate(SkillCategory category) const;
};

struct SkillModelSet {
  std::map<SkillCategory, SkillModel> models;

  static SkillModelSet defaults();
  const SkillModel& lookup(SkillCategory c) const;
  void validate() const;
};

struct SkillOutcome {
  bool success = false;
  FailureMode failure_mode = FailureMode::no_op;
  double pose_error_trans = 0.0;  // m, at interaction start
  double pose_error_rot = 0.0;    // rad
  int steps_consumed = 0;
};

/// p = base * f_pose(err) * f_clutter(clutter, masking). f_pose is the
/// product over channels of sigma(slope*(1 - err/eff)) / sigma(slope) with
/// eff = max(scale, training_radius), so f_pose(0) = 1 and p(0,0) is exactly
/// base_success. With masking on, clutter has no effect.
double successProbability(const SkillModel& model, double err_trans, double err_rot,
                          double clutter, bool masking_on);

/// Kinematic effect constants shared by the surrogate and scripted policies.
struct InteractionConfig {
  OffsetTable offsets = OffsetTable::defaults();
  WorldConfig world;
  double lift_height = 0.08;  // successful pick raise, m
  double place_gap = 0.002;   // resting clearance inside receptacles, m
};

/// Translation/rotation distance between the current end-effector pose and
/// the canonical approach pose of the action's frame object.
std::pair<double, double> measurePoseError(const WorldState& state, const SymbolicAction& action,
                                           const InteractionConfig& cfg);

/// Apply the skill's kinematic effect for a successful attempt: pick grasps
/// and lifts, transport skills teleport the payload onto/into the target,
/// articulated skills set their scalar.
WorldState applySkillEffect(const WorldState& state, const SymbolicAction& action,
                            const InteractionConfig& cfg);

/// Draw success from the model's law, then apply either the skill effect or
/// the sampled failure displacement. Failures are outcomes, not errors.
std::pair<WorldState, SkillOutcome> executeInteraction(const WorldState& state,
                                                       const SymbolicAction& action,
                                                       const SkillModel& model, bool masking_on,
                                                       const InteractionConfig& cfg, Rng& rng);

/// Seam between the executive and whatever executes skills.
class InteractionPolicy {
 public:
  virtual ~InteractionPolicy() = default;
  virtual std::pair<WorldState, SkillOutcome> execute(const WorldState& state,
                                                      const SymbolicAction& action,
                                                      bool masking_on, Rng& rng) = 0;
};

class SurrogatePolicy final : public InteractionPolicy {
 public:
  SurrogatePolicy(SkillModelSet models, InteractionConfig cfg)
      : models_(std::move(models)), cfg_(std::move(cfg)) {}

  std::pair<WorldState, SkillOutcome> execute(const WorldState& state,
                                              const SymbolicAction& action, bool masking_on,
                                              Rng& rng) override {
    return executeInteraction(state, action, models_.lookup(action.skill), masking_on, cfg_, rng);
  }

  const SkillModelSet& models() const { return models_; }
  const InteractionConfig& config() const { return cfg_; }

 private:
  SkillModelSet models_;
  InteractionConfig cfg_;
};

/// Test double: consumes a fixed script of (success, failure_mode) outcomes
/// while applying the same kinematic effects as the surrogate. Once the
/// script is exhausted every further call succeeds.
class ScriptedPolicy final : public InteractionPolicy {
 public:
  ScriptedPolicy(std::vector<std::pair<bool, FailureMode>> script, InteractionConfig cfg = {})
      : script_(std::move(script)), cfg_(std::move(cfg)) {}

  std::pair<WorldState, SkillOutcome> execute(const WorldState& state,
                                              const SymbolicAction& action, bool masking_on,
                                              Rng& rng) override;

 private:
  std::vector<std::pair<bool, FailureMode>> script_;
  std::size_t cursor_ = 0;
  InteractionConfig cfg_;
};

}  // namespace lilo
