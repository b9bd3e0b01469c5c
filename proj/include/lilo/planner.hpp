#pragma once

#include <map>
#include <vector>

#include "lilo/world.hpp"

namespace lilo {

/// Face-down grasp orientation: 180 degrees about the world x axis.
inline Posed::Quat faceDownRotation() { return Posed::Quat(0.0, 1.0, 0.0, 0.0); }

/// Per-skill approach offsets in the frame object's frame. Every entry
/// carries the canonical face-down rotation; only the translation varies.
struct OffsetTable {
  std::map<SkillCategory, Posed> offsets;

  static OffsetTable defaults();
  const Posed& lookup(SkillCategory skill) const;
  void set(SkillCategory skill, const Eigen::Vector3d& translation);
  void validate() const;  // all categories present, all rotations face-down
};

struct PlannerConfig {
  double step_size = 0.02;          // collision sampling resolution, m
  double clearance_margin = 0.005;  // required clearance beyond contact, m
  int max_iterations = 5000;
  double goal_tolerance_trans = 1e-3;  // m
  double goal_tolerance_rot = 1e-2;    // rad
  double ee_radius = 0.03;             // end-effector collision sphere, m

  void validate() const;
};

struct PlannerStats {
  int iterations = 0;
  int nodes = 0;
  double wall_ms = 0.0;
};

enum class PlanStatus { ok, start_in_collision, goal_in_collision, timeout };
const char* toString(PlanStatus s);

struct PathPlan {
  PlanStatus status = PlanStatus::timeout;
  std::vector<Posed> waypoints;
  PlannerStats stats;

  bool ok() const { return status == PlanStatus::ok; }
};

/// T_frame * offset(skill): face-down pose with skill-specific clearance,
/// expressed relative to the frame object's pose.
Posed approachPose(const Posed& object_pose, SkillCategory skill, const OffsetTable& offsets);

/// True when the end-effector sphere (and the attached object's box, if any)
/// stays at least clearance_margin away from every non-attached object along
/// the straight translation segment a -> b, sampled at step_size.
bool segmentCollisionFree(const Posed& a, const Posed& b, const WorldState& state,
                          const PlannerConfig& cfg);

/// Single-pose variant of the segment check.
bool poseCollisionFree(const Posed& p, const WorldState& state, const PlannerConfig& cfg);

/// Straight-line fast path, then bidirectional RRT over the end-effector
/// translation with orientations interpolated along arc length. Deterministic
/// for a given (state, start, goal, config, seed).
PathPlan planPath(const WorldState& state, const Posed& start, const Posed& goal,
                  const PlannerConfig& cfg, Rng& rng);

/// Walk the waypoints, carrying any attached object rigidly; ends with the
/// end-effector at the final waypoint.
WorldState executePath(const WorldState& state, const PathPlan& plan);

/// Distance from a sphere center to an axis-aligned box surface (0 inside).
double pointBoxDistance(const Eigen::Vector3d& p, const Eigen::AlignedBox3d& box);

}  // namespace lilo
