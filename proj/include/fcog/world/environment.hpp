#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fcog/core.hpp"
#include "fcog/world/geometry.hpp"

namespace fcog::world {

inline constexpr double kWallThickness = 0.1;
inline constexpr double kGripOffset = 0.15;
inline constexpr double kMinPlaceableArea = 0.04;
inline constexpr double kSpiralStep = 0.02;

/// A gap in a room wall, given as a segment lying on the room boundary.
struct Door {
    Vec2 a;
    Vec2 b;
    bool operator==(const Door&) const = default;
};

struct RoomSpec {
    RoomId id;
    std::string name;
    Box bounds;
    std::vector<Door> doors;
};

enum class HeightClass { FloorLevel, TableLevel };

struct SupportSurface {
    SurfaceId id;
    FurnitureId owner;
    Rect region;
    HeightClass height = HeightClass::TableLevel;
};

struct StaticObject {
    FurnitureId id;
    std::string category;
    Rect footprint;
    std::vector<SurfaceId> surfaces;
};

struct DynamicObject {
    ObjectId id;
    std::string category;
    std::optional<std::string> color;
    std::optional<std::string> material;
    Pose pose;
    double radius = 0.05;
    std::optional<SurfaceId> support;  // empty while held
};

struct RobotState {
    Pose pose;
    double radius = 0.25;
    double reach = 0.8;
    std::optional<ObjectId> gripper;
    double max_linear_speed = 1.0;
    double max_angular_speed = kPi;
};

struct CameraPose {
    Pose pose;
    double fov = kPi / 2.0;  // full angle
    double range = 3.5;
};

enum class EntityKind { Dynamic, Surface };

/// Reference to either a dynamic object or a support surface.
struct EntityRef {
    EntityKind kind = EntityKind::Dynamic;
    std::uint32_t id = 0;

    static EntityRef object(ObjectId o) { return {EntityKind::Dynamic, o.value}; }
    static EntityRef surface(SurfaceId s) { return {EntityKind::Surface, s.value}; }
    ObjectId object_id() const { return ObjectId{id}; }
    SurfaceId surface_id() const { return SurfaceId{id}; }

    auto operator<=>(const EntityRef&) const = default;
};

struct Snapshot {
    EntityRef entity;
    std::string category;
    std::optional<std::string> color;
    std::optional<std::string> material;
    double bearing = 0.0;  // radians, camera frame, positive to the left
    double range = 0.0;
    std::optional<SurfaceId> support;
};

/// One virtual-camera observation.
struct Capture {
    CameraPose camera;
    std::vector<Snapshot> snapshots;
    std::optional<EntityRef> subject;
};

struct Command {
    double v = 0.0;
    double w = 0.0;
};

struct StepResult {
    bool collided = false;
    double displacement = 0.0;
};

enum class GraspStatus { Success, GripperOccupied, OutOfReach, Occluded, NoSuchObject };
enum class PlaceStatus { Success, NotHolding, SurfaceOutOfReach, NoFreePose, NoSuchSurface };

inline std::string_view to_string(GraspStatus s) {
    switch (s) {
        case GraspStatus::Success: return "Success";
        case GraspStatus::GripperOccupied: return "GripperOccupied";
        case GraspStatus::OutOfReach: return "OutOfReach";
        case GraspStatus::Occluded: return "Occluded";
        case GraspStatus::NoSuchObject: return "NoSuchObject";
    }
    return "?";
}

inline std::string_view to_string(PlaceStatus s) {
    switch (s) {
        case PlaceStatus::Success: return "Success";
        case PlaceStatus::NotHolding: return "NotHolding";
        case PlaceStatus::SurfaceOutOfReach: return "SurfaceOutOfReach";
        case PlaceStatus::NoFreePose: return "NoFreePose";
        case PlaceStatus::NoSuchSurface: return "NoSuchSurface";
    }
    return "?";
}

inline std::string_view to_string(HeightClass h) {
    return h == HeightClass::TableLevel ? "table-level" : "floor-level";
}

/// Objects and furniture exempt from occlusion tests.
struct IgnoreSet {
    std::vector<ObjectId> objects;
    std::vector<FurnitureId> furniture;

    bool has(ObjectId o) const { return std::find(objects.begin(), objects.end(), o) != objects.end(); }
    bool has(FurnitureId f) const { return std::find(furniture.begin(), furniture.end(), f) != furniture.end(); }
};

/// Wall rectangles for the given rooms: each room edge minus its doors,
/// thickened symmetrically about the boundary line.
inline std::vector<Rect> compute_walls(const std::vector<RoomSpec>& rooms) {
    std::vector<Rect> walls;
    constexpr double eps = 1e-9;
    const double half_t = kWallThickness / 2.0;
    for (const RoomSpec& room : rooms) {
        const Box& b = room.bounds;
        struct Edge {
            bool horizontal;
            double fixed, lo, hi;
        };
        const std::array<Edge, 4> edges{Edge{true, b.min.y, b.min.x, b.max.x}, Edge{true, b.max.y, b.min.x, b.max.x},
                                        Edge{false, b.min.x, b.min.y, b.max.y}, Edge{false, b.max.x, b.min.y, b.max.y}};
        for (const Edge& e : edges) {
            std::vector<std::pair<double, double>> gaps;
            for (const Door& d : room.doors) {
                if (e.horizontal && std::abs(d.a.y - e.fixed) < eps && std::abs(d.b.y - e.fixed) < eps) {
                    gaps.emplace_back(std::min(d.a.x, d.b.x), std::max(d.a.x, d.b.x));
                } else if (!e.horizontal && std::abs(d.a.x - e.fixed) < eps && std::abs(d.b.x - e.fixed) < eps) {
                    gaps.emplace_back(std::min(d.a.y, d.b.y), std::max(d.a.y, d.b.y));
                }
            }
            std::sort(gaps.begin(), gaps.end());
            double cursor = e.lo;
            auto emit = [&](double s0, double s1) {
                if (s1 - s0 <= eps) return;
                // Extend to close room corners, but not into door gaps.
                if (std::abs(s0 - e.lo) < eps) s0 -= half_t;
                if (std::abs(s1 - e.hi) < eps) s1 += half_t;
                const double mid = (s0 + s1) / 2.0, half_len = (s1 - s0) / 2.0;
                Rect r = e.horizontal ? Rect{{mid, e.fixed}, half_len, half_t, 0.0}
                                      : Rect{{e.fixed, mid}, half_t, half_len, 0.0};
                if (std::find(walls.begin(), walls.end(), r) == walls.end()) walls.push_back(r);
            };
            for (auto [g0, g1] : gaps) {
                emit(cursor, std::max(cursor, g0));
                cursor = std::max(cursor, g1);
            }
            emit(cursor, e.hi);
        }
    }
    return walls;
}

/// Ground-truth world. Containers are indexed by id value.
class Environment {
public:
    std::string layout;
    std::vector<RoomSpec> rooms;
    std::vector<StaticObject> furniture;
    std::vector<SupportSurface> surfaces;
    std::vector<DynamicObject> objects;
    RobotState robot;
    double clock_s = 0.0;

    /// Recomputes derived static geometry. Call after editing rooms.
    void finalize() { walls_ = compute_walls(rooms); }

    const std::vector<Rect>& walls() const { return walls_; }

    const RoomSpec& room(RoomId id) const { return rooms.at(id.value); }
    const StaticObject& furniture_of(FurnitureId id) const { return furniture.at(id.value); }
    const SupportSurface& surface(SurfaceId id) const { return surfaces.at(id.value); }
    const DynamicObject& object(ObjectId id) const { return objects.at(id.value); }
    DynamicObject& object(ObjectId id) { return objects.at(id.value); }

    bool has(ObjectId id) const { return id.value < objects.size(); }
    bool has(SurfaceId id) const { return id.value < surfaces.size(); }

    std::optional<RoomId> find_room(std::string_view name) const {
        for (const RoomSpec& r : rooms)
            if (r.name == name) return r.id;
        return std::nullopt;
    }

private:
    std::vector<Rect> walls_;
};

inline std::optional<RoomId> point_in_room(Vec2 p, const Environment& env) {
    for (const RoomSpec& r : env.rooms)
        if (r.bounds.contains(p)) return r.id;
    return std::nullopt;
}

/// Distance from p to the nearest wall or furniture footprint.
inline double static_clearance(const Environment& env, Vec2 p) {
    double best = std::numeric_limits<double>::infinity();
    for (const Rect& w : env.walls()) best = std::min(best, distance(w, p));
    for (const StaticObject& f : env.furniture) best = std::min(best, distance(f.footprint, p));
    return best;
}

/// Distance from segment [a, b] to the nearest wall or furniture footprint.
inline double segment_static_clearance(const Environment& env, Vec2 a, Vec2 b) {
    double best = std::numeric_limits<double>::infinity();
    for (const Rect& w : env.walls()) best = std::min(best, segment_distance(w, a, b));
    for (const StaticObject& f : env.furniture) best = std::min(best, segment_distance(f.footprint, a, b));
    return best;
}

inline bool robot_collides(const Environment& env, Vec2 p) { return static_clearance(env, p) < env.robot.radius; }

inline bool is_held(const Environment& env, ObjectId id) { return env.robot.gripper == id; }

/// True iff [a, b] crosses no wall, no furniture footprint and no unheld object
/// disk outside `ignore`.
inline bool line_of_sight(Vec2 a, Vec2 b, const Environment& env, const IgnoreSet& ignore = {}) {
    if (a == b) return true;
    for (const Rect& w : env.walls())
        if (segment_intersects(w, a, b)) return false;
    for (const StaticObject& f : env.furniture)
        if (!ignore.has(f.id) && segment_intersects(f.footprint, a, b)) return false;
    for (const DynamicObject& o : env.objects) {
        if (ignore.has(o.id) || is_held(env, o.id)) continue;
        if (segment_intersects_disk(a, b, o.pose.position(), o.radius)) return false;
    }
    return true;
}

/// What a sight line to `e` may pass through: an object does not hide itself
/// or the furniture it rests on, and a surface is not hidden by its own
/// furniture or the objects resting on it.
inline IgnoreSet occlusion_exemptions(const Environment& env, EntityRef e) {
    IgnoreSet s;
    if (e.kind == EntityKind::Dynamic) {
        const DynamicObject& o = env.object(e.object_id());
        s.objects.push_back(o.id);
        if (o.support) s.furniture.push_back(env.surface(*o.support).owner);
    } else {
        const SupportSurface& surf = env.surface(e.surface_id());
        s.furniture.push_back(surf.owner);
        for (const DynamicObject& o : env.objects)
            if (o.support == surf.id) s.objects.push_back(o.id);
    }
    return s;
}

inline Vec2 reference_point(const Environment& env, EntityRef e) {
    return e.kind == EntityKind::Dynamic ? env.object(e.object_id()).pose.position()
                                         : env.surface(e.surface_id()).region.center;
}

inline Snapshot make_snapshot(const Environment& env, const CameraPose& cam, EntityRef e) {
    Snapshot s;
    s.entity = e;
    const Vec2 local = to_local(cam.pose, reference_point(env, e));
    s.range = norm(local);
    s.bearing = s.range == 0.0 ? 0.0 : std::atan2(local.y, local.x);
    if (e.kind == EntityKind::Dynamic) {
        const DynamicObject& o = env.object(e.object_id());
        s.category = o.category;
        s.color = o.color;
        s.material = o.material;
        s.support = o.support;
    } else {
        s.category = env.furniture_of(env.surface(e.surface_id()).owner).category;
    }
    return s;
}

/// Objects and surfaces whose reference point is inside the view cone, within
/// range and in line of sight. Ordered by ascending range, then entity.
inline std::vector<Snapshot> visible_objects(const CameraPose& cam, const Environment& env) {
    std::vector<Snapshot> out;
    auto consider = [&](EntityRef e) {
        Snapshot s = make_snapshot(env, cam, e);
        if (s.range > cam.range || std::abs(s.bearing) > cam.fov / 2.0) return;
        if (!line_of_sight(cam.pose.position(), reference_point(env, e), env, occlusion_exemptions(env, e))) return;
        out.push_back(std::move(s));
    };
    for (const DynamicObject& o : env.objects)
        if (!is_held(env, o.id)) consider(EntityRef::object(o.id));
    for (const SupportSurface& s : env.surfaces) consider(EntityRef::surface(s.id));
    std::sort(out.begin(), out.end(), [](const Snapshot& a, const Snapshot& b) {
        if (a.range != b.range) return a.range < b.range;
        return a.entity < b.entity;
    });
    return out;
}

inline Capture capture(const Environment& env, const CameraPose& cam, std::optional<EntityRef> subject = {}) {
    return {cam, visible_objects(cam, env), subject};
}

inline Pose grip_pose(const RobotState& robot) {
    const Vec2 p = to_world(robot.pose, {kGripOffset, 0.0});
    return {p.x, p.y, robot.pose.theta};
}

/// Unicycle integration with reject-move collision handling.
inline StepResult step(Environment& env, Command cmd, double dt) {
    RobotState& r = env.robot;
    const double v = std::clamp(cmd.v, -r.max_linear_speed, r.max_linear_speed);
    const double w = std::clamp(cmd.w, -r.max_angular_speed, r.max_angular_speed);
    Pose next{r.pose.x + v * std::cos(r.pose.theta) * dt, r.pose.y + v * std::sin(r.pose.theta) * dt,
              normalize_angle(r.pose.theta + w * dt)};
    env.clock_s += dt;
    StepResult res;
    if (robot_collides(env, next.position())) {
        res.collided = true;
    } else {
        res.displacement = distance(r.pose.position(), next.position());
        r.pose = next;
    }
    if (r.gripper) env.object(*r.gripper).pose = grip_pose(r);
    return res;
}

inline GraspStatus grasp(Environment& env, ObjectId target) {
    if (!env.has(target)) return GraspStatus::NoSuchObject;
    if (env.robot.gripper) return GraspStatus::GripperOccupied;
    DynamicObject& o = env.object(target);
    const Vec2 rp = env.robot.pose.position();
    if (distance(rp, o.pose.position()) > env.robot.reach) return GraspStatus::OutOfReach;
    if (!line_of_sight(rp, o.pose.position(), env, occlusion_exemptions(env, EntityRef::object(target))))
        return GraspStatus::Occluded;
    o.support.reset();
    env.robot.gripper = target;
    o.pose = grip_pose(env.robot);
    return GraspStatus::Success;
}

/// Candidate placement points in the surface frame, in search order.
inline std::vector<Vec2> placement_spiral(const Rect& region) {
    constexpr double golden = 2.39996322972865332;
    const double limit = std::hypot(region.half_w, region.half_h) + kSpiralStep;
    std::vector<Vec2> pts;
    for (int i = 0;; ++i) {
        const double r = kSpiralStep * std::sqrt(static_cast<double>(i));
        if (r > limit) break;
        pts.push_back(to_world(region.frame(), unit(i * golden) * r));
    }
    return pts;
}

inline bool placement_free(const Environment& env, ObjectId placed, Vec2 p, double radius) {
    for (const DynamicObject& o : env.objects) {
        if (o.id == placed || is_held(env, o.id)) continue;
        if (distance(o.pose.position(), p) < o.radius + radius) return false;
    }
    return true;
}

inline PlaceStatus place(Environment& env, SurfaceId dest) {
    if (!env.robot.gripper) return PlaceStatus::NotHolding;
    if (!env.has(dest)) return PlaceStatus::NoSuchSurface;
    const SupportSurface& surf = env.surface(dest);
    const Vec2 rp = env.robot.pose.position();
    if (distance(surf.region, rp) > env.robot.reach) return PlaceStatus::SurfaceOutOfReach;
    DynamicObject& held = env.object(*env.robot.gripper);
    for (Vec2 p : placement_spiral(surf.region)) {
        if (!disk_inside(surf.region, p, held.radius)) continue;
        if (distance(rp, p) > env.robot.reach) continue;
        if (!placement_free(env, held.id, p, held.radius)) continue;
        held.pose = {p.x, p.y, held.pose.theta};
        held.support = dest;
        env.robot.gripper.reset();
        return PlaceStatus::Success;
    }
    return PlaceStatus::NoFreePose;
}

namespace detail {

inline bool on_segment(Vec2 p, Vec2 a, Vec2 b) { return distance_to_segment(a, b, p) < 1e-9; }

inline bool door_on_boundary(const Door& d, const Box& b) {
    const std::array<std::pair<Vec2, Vec2>, 4> edges{
        std::pair{b.min, Vec2{b.max.x, b.min.y}}, std::pair{Vec2{b.max.x, b.min.y}, b.max},
        std::pair{b.max, Vec2{b.min.x, b.max.y}}, std::pair{Vec2{b.min.x, b.max.y}, b.min}};
    for (auto [e0, e1] : edges)
        if (on_segment(d.a, e0, e1) && on_segment(d.b, e0, e1)) return true;
    return false;
}

inline bool box_contains_closed(const Box& b, Vec2 p, double tol = 1e-9) {
    return p.x >= b.min.x - tol && p.x <= b.max.x + tol && p.y >= b.min.y - tol && p.y <= b.max.y + tol;
}

}  // namespace detail

/// Checks every environment invariant; returns one message per violation.
inline std::vector<std::string> validate(const Environment& env) {
    std::vector<std::string> problems;
    auto fail = [&](auto&&... parts) {
        std::ostringstream os;
        (os << ... << parts);
        problems.push_back(os.str());
    };
    auto pose_ok = [](const Pose& p) {
        return std::isfinite(p.x) && std::isfinite(p.y) && p.theta >= -kPi && p.theta < kPi;
    };

    for (std::size_t i = 0; i < env.rooms.size(); ++i) {
        const RoomSpec& a = env.rooms[i];
        if (a.id.value != i) fail("room ", a.name, " has id ", a.id.value, " at index ", i);
        for (std::size_t j = i + 1; j < env.rooms.size(); ++j) {
            const Box& p = a.bounds;
            const Box& q = env.rooms[j].bounds;
            const double ox = std::min(p.max.x, q.max.x) - std::max(p.min.x, q.min.x);
            const double oy = std::min(p.max.y, q.max.y) - std::max(p.min.y, q.min.y);
            if (ox > 1e-9 && oy > 1e-9) fail("rooms ", a.name, " and ", env.rooms[j].name, " overlap");
        }
        for (const Door& d : a.doors) {
            if (!detail::door_on_boundary(d, a.bounds)) {
                fail("door of ", a.name, " is not on its boundary");
                continue;
            }
            for (const RoomSpec& other : env.rooms) {
                if (other.id == a.id || !detail::door_on_boundary(d, other.bounds)) continue;
                if (std::find(other.doors.begin(), other.doors.end(), d) == other.doors.end())
                    fail("door of ", a.name, " opens into a wall of ", other.name);
            }
        }
    }
    // Room connectivity through shared doors.
    if (!env.rooms.empty()) {
        std::vector<bool> seen(env.rooms.size(), false);
        std::queue<std::size_t> q;
        q.push(0);
        seen[0] = true;
        while (!q.empty()) {
            const RoomSpec& r = env.rooms[q.front()];
            q.pop();
            for (const Door& d : r.doors)
                for (const RoomSpec& o : env.rooms)
                    if (!seen[o.id.value] && std::find(o.doors.begin(), o.doors.end(), d) != o.doors.end()) {
                        seen[o.id.value] = true;
                        q.push(o.id.value);
                    }
        }
        for (const RoomSpec& r : env.rooms)
            if (!seen[r.id.value]) fail("room ", r.name, " is unreachable");
    }
    if (env.walls() != compute_walls(env.rooms)) fail("walls are stale; call finalize()");

    for (std::size_t i = 0; i < env.furniture.size(); ++i) {
        const StaticObject& f = env.furniture[i];
        if (f.id.value != i) fail("furniture ", f.category, " has id ", f.id.value, " at index ", i);
        int owners = 0;
        for (const RoomSpec& r : env.rooms) {
            const auto cs = f.footprint.corners();
            if (std::all_of(cs.begin(), cs.end(), [&](Vec2 c) { return detail::box_contains_closed(r.bounds, c); }))
                ++owners;
        }
        if (owners != 1) fail("furniture ", f.id.value, " is inside ", owners, " rooms");
        for (SurfaceId s : f.surfaces)
            if (!env.has(s) || env.surface(s).owner != f.id)
                fail("furniture ", f.id.value, " lists foreign surface ", s.value);
    }
    for (std::size_t i = 0; i < env.surfaces.size(); ++i) {
        const SupportSurface& s = env.surfaces[i];
        if (s.id.value != i) fail("surface id ", s.id.value, " at index ", i);
        if (s.owner.value >= env.furniture.size()) {
            fail("surface ", s.id.value, " has no owner");
            continue;
        }
        const Rect& fp = env.furniture_of(s.owner).footprint;
        for (Vec2 c : s.region.corners())
            if (distance(fp, c) > 1e-9) fail("surface ", s.id.value, " leaves its footprint");
        if (s.region.area() < kMinPlaceableArea) fail("surface ", s.id.value, " is too small");
    }
    for (std::size_t i = 0; i < env.objects.size(); ++i) {
        const DynamicObject& o = env.objects[i];
        if (o.id.value != i) fail("object id ", o.id.value, " at index ", i);
        if (!pose_ok(o.pose)) fail("object ", o.id.value, " has an invalid pose");
        if (o.support) {
            if (!env.has(*o.support)) {
                fail("object ", o.id.value, " rests on missing surface ", o.support->value);
            } else if (!disk_inside(env.surface(*o.support).region, o.pose.position(), o.radius)) {
                fail("object ", o.id.value, " overhangs its surface");
            }
            if (is_held(env, o.id)) fail("object ", o.id.value, " is both held and supported");
        } else if (!is_held(env, o.id)) {
            fail("object ", o.id.value, " has no support and is not held");
        } else {
            const Pose g = grip_pose(env.robot);
            if (distance(g.position(), o.pose.position()) > 1e-9) fail("held object ", o.id.value, " is detached");
        }
        for (std::size_t j = i + 1; j < env.objects.size(); ++j) {
            const DynamicObject& p = env.objects[j];
            if (is_held(env, o.id) || is_held(env, p.id)) continue;
            if (distance(o.pose.position(), p.pose.position()) < o.radius + p.radius)
                fail("objects ", o.id.value, " and ", p.id.value, " overlap");
        }
    }
    if (!pose_ok(env.robot.pose)) fail("robot pose invalid");
    if (robot_collides(env, env.robot.pose.position())) fail("robot collides with static geometry");
    if (env.robot.gripper && !env.has(*env.robot.gripper)) fail("robot holds a missing object");
    return problems;
}

}  // namespace fcog::world
