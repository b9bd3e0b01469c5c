#include "lilo/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace lilo {

const char* toString(PlanStatus s) {
  switch (s) {
    case PlanStatus::ok: return "ok";
    case PlanStatus::start_in_collision: return "start_in_collision";
    case PlanStatus::goal_in_collision: return "goal_in_collision";
    case PlanStatus::timeout: return "timeout";
  }
  return "?";
}

OffsetTable OffsetTable::defaults() {
  OffsetTable t;
  t.set(SkillCategory::pick, {0.0, 0.0, 0.10});
  t.set(SkillCategory::place, {0.0, 0.0, 0.12});
  t.set(SkillCategory::stack, {0.0, 0.0, 0.12});
  t.set(SkillCategory::hang, {0.0, 0.0, 0.12});
  t.set(SkillCategory::open_drawer, {0.0, 0.0, 0.18});
  t.set(SkillCategory::close_drawer, {0.0, 0.0, 0.18});
  t.set(SkillCategory::turn_on, {0.0, 0.0, 0.18});
  return t;
}

void OffsetTable::set(SkillCategory skill, const Eigen::Vector3d& translation) {
  offsets[skill] = Posed(faceDownRotation(), translation);
}

const Posed& OffsetTable::lookup(SkillCategory skill) const {
  auto it = offsets.find(skill);
  if (it == offsets.end()) {
    throw MissingOffset(std::string("no approach offset for skill ") + toString(skill));
  }
  return it->second;
}

void OffsetTable::validate() const {
  for (SkillCategory c : {SkillCategory::pick, SkillCategory::place, SkillCategory::stack,
                          SkillCategory::hang, SkillCategory::open_drawer,
                          SkillCategory::close_drawer, SkillCategory::turn_on}) {
    const Posed& p = lookup(c);
    if (std::min((p.rotation.coeffs() - Posed(faceDownRotation(), {}).rotation.coeffs()).norm(),
                 (p.rotation.coeffs() + Posed(faceDownRotation(), {}).rotation.coeffs()).norm()) >
        1e-9) {
      throw ConfigError("offset table rotation must be the canonical face-down orientation");
    }
  }
}

void PlannerConfig::validate() const {
  if (step_size <= 0 || clearance_margin <= 0 || max_iterations <= 0 || ee_radius <= 0 ||
      goal_tolerance_trans <= 0 || goal_tolerance_rot <= 0) {
    throw ConfigError("planner config entries must be strictly positive");
  }
}

Posed approachPose(const Posed& object_pose, SkillCategory skill, const OffsetTable& offsets) {
  return compose(object_pose, offsets.lookup(skill));
}

double pointBoxDistance(const Eigen::Vector3d& p, const Eigen::AlignedBox3d& box) {
  const Eigen::Vector3d d =
      (box.min() - p).cwiseMax(p - box.max()).cwiseMax(Eigen::Vector3d::Zero());
  return d.norm();
}

namespace {

bool boxesOverlap(const Eigen::AlignedBox3d& a, const Eigen::AlignedBox3d& b, double margin) {
  for (int i = 0; i < 3; ++i) {
    if (a.min()[i] > b.max()[i] + margin || b.min()[i] > a.max()[i] + margin) return false;
  }
  return true;
}

// One sampled configuration of the end-effector (plus attached payload).
bool sampleFree(const Posed& ee, const WorldState& state, const PlannerConfig& cfg,
                double box_margin) {
  const std::string held = state.attachment() ? state.attachment()->object_id : std::string();
  Eigen::AlignedBox3d held_box;
  if (!held.empty()) {
    const ObjectState& os = state.object(held);
    held_box = WorldState::boxAt(compose(ee, state.attachment()->grasp), os.spec.half_extents);
  }
  for (const auto& [id, os] : state.objects()) {
    if (id == held) continue;
    const Eigen::AlignedBox3d obstacle = WorldState::boxAt(os.pose, os.spec.half_extents);
    if (pointBoxDistance(ee.translation, obstacle) < cfg.ee_radius + cfg.clearance_margin) {
      return false;
    }
    if (!held.empty() && boxesOverlap(held_box, obstacle, box_margin)) return false;
  }
  return true;
}

}  // namespace

bool poseCollisionFree(const Posed& p, const WorldState& state, const PlannerConfig& cfg) {
  return sampleFree(p, state, cfg, cfg.clearance_margin);
}

bool segmentCollisionFree(const Posed& a, const Posed& b, const WorldState& state,
                          const PlannerConfig& cfg) {
  const double length = (b.translation - a.translation).norm();
  const int samples = std::max(1, static_cast<int>(std::ceil(length / cfg.step_size)));
  // Box checks are swept at step resolution; inflate by half a step so the
  // motion between samples cannot tunnel past an obstacle.
  const double box_margin = cfg.clearance_margin + 0.5 * cfg.step_size;
  for (int i = 0; i <= samples; ++i) {
    const double t = static_cast<double>(i) / samples;
    Posed p;
    p.translation = (1.0 - t) * a.translation + t * b.translation;
    p.rotation = a.rotation.slerp(t, b.rotation);
    if (!sampleFree(p, state, cfg, box_margin)) return false;
  }
  return true;
}

namespace {

struct Tree {
  std::vector<Eigen::Vector3d> points;
  std::vector<int> parents;

  int nearest(const Eigen::Vector3d& q) const {
    int best = 0;
    double best_d = (points[0] - q).squaredNorm();
    for (int i = 1; i < static_cast<int>(points.size()); ++i) {
      const double d = (points[i] - q).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  std::vector<Eigen::Vector3d> pathToRoot(int index) const {
    std::vector<Eigen::Vector3d> out;
    for (int i = index; i >= 0; i = parents[i]) out.push_back(points[i]);
    return out;
  }
};

bool translationSegmentFree(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                            const Eigen::Quaterniond& rot, const WorldState& state,
                            const PlannerConfig& cfg) {
  Posed pa(rot, a), pb(rot, b);
  return segmentCollisionFree(pa, pb, state, cfg);
}

}  // namespace

PathPlan planPath(const WorldState& state, const Posed& start, const Posed& goal,
                  const PlannerConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  PathPlan plan;
  auto finish = [&](PlanStatus status) {
    plan.status = status;
    plan.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return plan;
  };

  if (!poseCollisionFree(start, state, cfg)) return finish(PlanStatus::start_in_collision);
  if (!poseCollisionFree(goal, state, cfg)) return finish(PlanStatus::goal_in_collision);

  if (translationDistance(start, goal) < 1e-12 && rotationAngle(start, goal) < 1e-12) {
    plan.waypoints = {start};
    plan.stats.nodes = 1;
    return finish(PlanStatus::ok);
  }

  auto emit = [&](std::vector<Eigen::Vector3d> points) {
    // Shortcut pass, then orientation interpolation by arc length.
    for (int attempt = 0; attempt < 40 && points.size() > 2; ++attempt) {
      const int i = rng.uniformInt(0, static_cast<int>(points.size()) - 3);
      const int j = rng.uniformInt(i + 2, static_cast<int>(points.size()) - 1);
      if (translationSegmentFree(points[i], points[j], start.rotation, state, cfg) &&
          translationSegmentFree(points[i], points[j], goal.rotation, state, cfg)) {
        points.erase(points.begin() + i + 1, points.begin() + j);
      }
    }
    double total = 0.0;
    std::vector<double> arc(points.size(), 0.0);
    for (size_t k = 1; k < points.size(); ++k) {
      total += (points[k] - points[k - 1]).norm();
      arc[k] = total;
    }
    plan.waypoints.clear();
    for (size_t k = 0; k < points.size(); ++k) {
      const double f = total > 0.0 ? arc[k] / total : 1.0;
      plan.waypoints.emplace_back(start.rotation.slerp(f, goal.rotation), points[k]);
    }
    plan.waypoints.front() = start;
    plan.waypoints.back() = goal;
    return finish(PlanStatus::ok);
  };

  if (segmentCollisionFree(start, goal, state, cfg)) {
    plan.stats.nodes = 2;
    return emit({start.translation, goal.translation});
  }

  // RRT-Connect over the translation component.
  Tree from_start, from_goal;
  from_start.points = {start.translation};
  from_start.parents = {-1};
  from_goal.points = {goal.translation};
  from_goal.parents = {-1};
  Tree* a = &from_start;
  Tree* b = &from_goal;
  bool a_is_start = true;

  const Eigen::AlignedBox3d& ws = state.workspace();
  const double step = cfg.step_size;
  const Eigen::Quaterniond probe_rot = start.rotation;  // conservative: both checked on emit

  auto extend = [&](Tree& tree, const Eigen::Vector3d& target, int from) -> int {
    const Eigen::Vector3d& base = tree.points[from];
    Eigen::Vector3d dir = target - base;
    const double dist = dir.norm();
    if (dist < 1e-12) return from;
    const Eigen::Vector3d next = dist <= step ? target : base + dir * (step / dist);
    if (!translationSegmentFree(base, next, probe_rot, state, cfg)) return -1;
    tree.points.push_back(next);
    tree.parents.push_back(from);
    return static_cast<int>(tree.points.size()) - 1;
  };

  for (int it = 0; it < cfg.max_iterations; ++it) {
    plan.stats.iterations = it + 1;
    const Eigen::Vector3d sample(rng.uniform(ws.min().x(), ws.max().x()),
                                 rng.uniform(ws.min().y(), ws.max().y()),
                                 rng.uniform(ws.min().z(), ws.max().z()));
    int a_new = extend(*a, sample, a->nearest(sample));
    if (a_new < 0) {
      std::swap(a, b);
      a_is_start = !a_is_start;
      continue;
    }
    // Greedily connect the other tree toward the new node.
    int b_cur = b->nearest(a->points[a_new]);
    while (true) {
      const int nxt = extend(*b, a->points[a_new], b_cur);
      if (nxt < 0) break;
      b_cur = nxt;
      if ((b->points[b_cur] - a->points[a_new]).norm() < 1e-9) {
        plan.stats.nodes =
            static_cast<int>(from_start.points.size() + from_goal.points.size());
        std::vector<Eigen::Vector3d> half_a = a->pathToRoot(a_new);
        std::vector<Eigen::Vector3d> half_b = b->pathToRoot(b_cur);
        std::reverse(half_a.begin(), half_a.end());
        half_a.insert(half_a.end(), half_b.begin() + 1, half_b.end());
        if (!a_is_start) std::reverse(half_a.begin(), half_a.end());
        return emit(std::move(half_a));
      }
    }
    std::swap(a, b);
    a_is_start = !a_is_start;
  }
  plan.stats.nodes = static_cast<int>(from_start.points.size() + from_goal.points.size());
  return finish(PlanStatus::timeout);
}

WorldState executePath(const WorldState& state, const PathPlan& plan) {
  if (!plan.ok() || plan.waypoints.empty()) {
    throw InvariantViolation("executePath requires a successful plan");
  }
  WorldState out = state;
  for (const Posed& wp : plan.waypoints) out = out.withEePose(wp);
  return out;
}

}  // namespace lilo
