#pragma once

#include <algorithm>
#include <vector>

#include "fcog/agent/planner.hpp"

namespace fcog::agent {

struct ApproachConfig {
    double ring_min_m = 0.40;
    double ring_max_m = 0.75;
    double ring_step_m = 0.05;
    int ring_angles = 32;
    /// Stand-off from static geometry beyond the robot radius.
    double clearance_slack_m = 0.03;
    std::vector<double> place_offsets_m{0.30, 0.35, 0.40, 0.50};
    int place_side_samples = 5;
};

namespace detail {

inline Pose facing(Vec2 from, Vec2 at) { return {from.x, from.y, std::atan2(at.y - from.y, at.x - from.x)}; }

/// Orders candidates by distance to `prefer`, keeping generation order on ties.
inline void sort_by_preference(std::vector<Pose>& poses, Vec2 prefer) {
    std::stable_sort(poses.begin(), poses.end(), [&](const Pose& a, const Pose& b) {
        return world::distance(a.position(), prefer) < world::distance(b.position(), prefer);
    });
}

inline bool standable(const Environment& env, const NavGrid& grid, Vec2 p, int component, double slack) {
    return world::static_clearance(env, p) >= env.robot.radius + slack && grid.component_at(env, p) == component;
}

}  // namespace detail

/// Outcome of grasping from `pose` without touching `env`.
inline world::GraspStatus grasp_dry_run(const Environment& env, ObjectId target, const Pose& pose) {
    Environment copy = env;
    copy.robot.pose = pose;
    return world::grasp(copy, target);
}

/// Outcome of placing `held` (already held or not) onto `dest` from `pose`.
inline world::PlaceStatus place_dry_run(const Environment& env, ObjectId held, SurfaceId dest, const Pose& pose) {
    Environment copy = env;
    copy.robot.pose = pose;
    if (copy.robot.gripper != held) {
        if (copy.robot.gripper || !copy.has(held)) return world::PlaceStatus::NotHolding;
        copy.robot.gripper = held;
        copy.object(held).support.reset();
    }
    copy.object(held).pose = world::grip_pose(copy.robot);
    return world::place(copy, dest);
}

/// Poses on rings around the object from which a grasp succeeds, reachable
/// from `from`, nearest to `prefer` first.
inline std::vector<Pose> grasp_approaches(const Environment& env, const NavGrid& grid, ObjectId target, Vec2 from,
                                          Vec2 prefer, const ApproachConfig& cfg = {}) {
    const int comp = grid.component_at(env, from);
    const Vec2 o = env.object(target).pose.position();
    std::vector<Pose> out;
    for (double r = cfg.ring_min_m; r <= cfg.ring_max_m + 1e-9; r += cfg.ring_step_m)
        for (int k = 0; k < cfg.ring_angles; ++k) {
            const Vec2 p = o + world::unit(2.0 * kPi * k / cfg.ring_angles) * r;
            if (!detail::standable(env, grid, p, comp, cfg.clearance_slack_m)) continue;
            const Pose pose = detail::facing(p, o);
            if (grasp_dry_run(env, target, pose) != world::GraspStatus::Success) continue;
            out.push_back(pose);
        }
    detail::sort_by_preference(out, prefer);
    return out;
}

/// Poses beside the surface's furniture from which `held` can be placed.
inline std::vector<Pose> place_approaches(const Environment& env, const NavGrid& grid, ObjectId held, SurfaceId dest,
                                          Vec2 from, Vec2 prefer, const ApproachConfig& cfg = {}) {
    const int comp = grid.component_at(env, from);
    const world::SupportSurface& surf = env.surface(dest);
    const world::Rect& fp = env.furniture_of(surf.owner).footprint;
    const Pose frame = fp.frame();
    const Vec2 half{fp.half_w, fp.half_h};
    std::vector<Pose> out;
    // Sides in the footprint frame: +x, +y, -x, -y.
    const Vec2 normals[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (double off : cfg.place_offsets_m)
        for (const Vec2 n : normals) {
            const Vec2 tangent{-n.y, n.x};
            const double side_half = std::abs(n.x) > 0 ? half.y : half.x;
            const double depth = std::abs(n.x) > 0 ? half.x : half.y;
            for (int s = 0; s < cfg.place_side_samples; ++s) {
                const double t =
                    cfg.place_side_samples == 1 ? 0.0 : -side_half + 2.0 * side_half * s / (cfg.place_side_samples - 1);
                const Vec2 p = world::to_world(frame, n * (depth + off) + tangent * t);
                if (!detail::standable(env, grid, p, comp, cfg.clearance_slack_m)) continue;
                const Vec2 aim = world::to_world(frame, n * depth + tangent * t);
                const Pose pose = detail::facing(p, aim);
                if (place_dry_run(env, held, dest, pose) != world::PlaceStatus::Success) continue;
                out.push_back(pose);
            }
        }
    detail::sort_by_preference(out, prefer);
    return out;
}

}  // namespace fcog::agent
