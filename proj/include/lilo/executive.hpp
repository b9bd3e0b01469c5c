#pragma once

#include <string>
#include <vector>

#include "lilo/skills.hpp"

namespace lilo {

/// Ordered symbolic action sequence. Indices are 1-based throughout the
/// executive, matching trace events.
struct Plan {
  std::vector<SymbolicAction> actions;

  int size() const { return static_cast<int>(actions.size()); }
  const SymbolicAction& at(int index) const { return actions.at(index - 1); }

  /// Non-empty; ids resolve in the world; every holding skill has an earlier
  /// Pick of the object it transports.
  void validate(const WorldState& world) const;
};

/// Largest j < i such that actions[j] picks the object that actions[i]
/// transports. Throws NoPriorPick when the plan has none.
int lastPickIndex(const Plan& plan, int i);

struct ExecConfig {
  int retry_budget_per_skill = 5;
  int global_step_budget = 500;  // trace-event budget; exhausting it aborts
  bool recovery_enabled = true;
  bool reaching_enabled = true;
  bool masking_enabled = true;
  PerturbationSpec pose_noise = PerturbationSpec::zero();
  PerturbationSpec init_perturbation = PerturbationSpec::defaults();
  bool capture_states = false;  // snapshot the world after each event (tests)

  void validate() const;
};

struct TraceEvent {
  enum class Kind { reach, interact, verify, retry, backtrack, abort };
  Kind kind = Kind::reach;
  int skill_index = 0;  // 1-based plan index

  PlanStatus plan_status = PlanStatus::ok;  // reach
  PlannerStats planner_stats;               // reach
  SkillOutcome outcome;                     // interact
  bool verified = false;                    // verify
  int backtrack_to = 0;                     // backtrack
  std::string abort_reason;                 // abort
};

const char* toString(TraceEvent::Kind k);

struct TrialResult {
  bool success = false;
  int completed_prefix = 0;  // in-order verified skills standing at termination
  int attempts = 0;          // interaction attempts
  std::vector<TraceEvent> trace;
  std::vector<WorldState> states;  // filled only when capture_states
};

/// Everything a trial needs besides the world and the plan.
struct ExecutionContext {
  ExecConfig exec;
  PlannerConfig planner;
  WorldConfig world;
  OffsetTable offsets = OffsetTable::defaults();
};

/// The sequential inference loop with verification-driven closed-loop
/// recovery: estimate the frame object's pose, reach the approach pose,
/// run the interaction, verify; on failure retry in place (non-holding
/// skills) or backtrack to the latest relevant Pick (holding skills).
TrialResult runPlan(const WorldState& initial, const Plan& plan, const ExecutionContext& ctx,
                    InteractionPolicy& policy, Rng& rng);

TrialResult runPlan(const SceneSpec& scene, const Plan& plan, const ExecutionContext& ctx,
                    InteractionPolicy& policy, Rng& rng);

}  // namespace lilo
