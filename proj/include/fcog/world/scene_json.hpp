#pragma once

#include <json.hpp>

#include "fcog/world/environment.hpp"

// Scene record encoding. Every length is in meters, every angle in radians,
// and field names carry the unit suffix.

namespace fcog::world {

using Json = nlohmann::ordered_json;

inline Json vec_json(Vec2 v) { return {{"x_m", v.x}, {"y_m", v.y}}; }
inline Json pose_json(const Pose& p) { return {{"x_m", p.x}, {"y_m", p.y}, {"theta_rad", p.theta}}; }
inline Json rect_json(const Rect& r) {
    return {{"cx_m", r.center.x}, {"cy_m", r.center.y}, {"half_w_m", r.half_w}, {"half_h_m", r.half_h},
            {"theta_rad", r.theta}};
}

inline Vec2 vec_from(const Json& j) { return {j.at("x_m").get<double>(), j.at("y_m").get<double>()}; }
inline Pose pose_from(const Json& j) {
    return {j.at("x_m").get<double>(), j.at("y_m").get<double>(), j.at("theta_rad").get<double>()};
}
inline Rect rect_from(const Json& j) {
    return {{j.at("cx_m").get<double>(), j.at("cy_m").get<double>()}, j.at("half_w_m").get<double>(),
            j.at("half_h_m").get<double>(), j.at("theta_rad").get<double>()};
}

inline Json optional_json(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }
inline std::optional<std::string> optional_from(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<std::string>();
}

inline Json entity_json(EntityRef e) {
    return {{"kind", e.kind == EntityKind::Dynamic ? "object" : "surface"}, {"id", e.id}};
}
inline EntityRef entity_from(const Json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind != "object" && kind != "surface") throw Error("bad entity kind '" + kind + "'");
    return {kind == "object" ? EntityKind::Dynamic : EntityKind::Surface, j.at("id").get<std::uint32_t>()};
}

inline Json camera_json(const CameraPose& c) {
    return {{"pose", pose_json(c.pose)}, {"fov_rad", c.fov}, {"range_m", c.range}};
}
inline CameraPose camera_from(const Json& j) {
    return {pose_from(j.at("pose")), j.at("fov_rad").get<double>(), j.at("range_m").get<double>()};
}

inline Json snapshot_json(const Snapshot& s) {
    return {{"entity", entity_json(s.entity)},
            {"category", s.category},
            {"color", optional_json(s.color)},
            {"material", optional_json(s.material)},
            {"bearing_rad", s.bearing},
            {"range_m", s.range},
            {"support", s.support ? Json(s.support->value) : Json(nullptr)}};
}

inline Json capture_json(const Capture& c) {
    Json snaps = Json::array();
    for (const Snapshot& s : c.snapshots) snaps.push_back(snapshot_json(s));
    return {{"camera", camera_json(c.camera)},
            {"subject", c.subject ? entity_json(*c.subject) : Json(nullptr)},
            {"snapshots", std::move(snaps)}};
}

inline Snapshot snapshot_from(const Json& j) {
    Snapshot s;
    s.entity = entity_from(j.at("entity"));
    s.category = j.at("category").get<std::string>();
    s.color = optional_from(j.at("color"));
    s.material = optional_from(j.at("material"));
    s.bearing = j.at("bearing_rad").get<double>();
    s.range = j.at("range_m").get<double>();
    if (!j.at("support").is_null()) s.support = SurfaceId{j.at("support").get<std::uint32_t>()};
    return s;
}

inline Capture capture_from(const Json& j) {
    Capture c;
    c.camera = camera_from(j.at("camera"));
    if (!j.at("subject").is_null()) c.subject = entity_from(j.at("subject"));
    for (const Json& s : j.at("snapshots")) c.snapshots.push_back(snapshot_from(s));
    return c;
}

inline Json to_json(const Environment& env) {
    Json rooms = Json::array();
    for (const RoomSpec& r : env.rooms) {
        Json doors = Json::array();
        for (const Door& d : r.doors) doors.push_back({{"a", vec_json(d.a)}, {"b", vec_json(d.b)}});
        rooms.push_back({{"id", r.id.value},
                         {"name", r.name},
                         {"bounds", {{"min", vec_json(r.bounds.min)}, {"max", vec_json(r.bounds.max)}}},
                         {"doors", std::move(doors)}});
    }
    Json furniture = Json::array();
    for (const StaticObject& f : env.furniture) {
        Json surfaces = Json::array();
        for (SurfaceId s : f.surfaces) surfaces.push_back(s.value);
        furniture.push_back({{"id", f.id.value},
                             {"category", f.category},
                             {"footprint", rect_json(f.footprint)},
                             {"surfaces", std::move(surfaces)}});
    }
    Json surfaces = Json::array();
    for (const SupportSurface& s : env.surfaces)
        surfaces.push_back({{"id", s.id.value},
                            {"owner", s.owner.value},
                            {"region", rect_json(s.region)},
                            {"height_class", to_string(s.height)}});
    Json objects = Json::array();
    for (const DynamicObject& o : env.objects)
        objects.push_back({{"id", o.id.value},
                           {"category", o.category},
                           {"color", optional_json(o.color)},
                           {"material", optional_json(o.material)},
                           {"pose", pose_json(o.pose)},
                           {"radius_m", o.radius},
                           {"support", o.support ? Json(o.support->value) : Json(nullptr)}});
    const RobotState& r = env.robot;
    return {{"layout", env.layout},
            {"rooms", std::move(rooms)},
            {"furniture", std::move(furniture)},
            {"surfaces", std::move(surfaces)},
            {"objects", std::move(objects)},
            {"robot",
             {{"pose", pose_json(r.pose)},
              {"radius_m", r.radius},
              {"reach_m", r.reach},
              {"gripper", r.gripper ? Json(r.gripper->value) : Json(nullptr)},
              {"max_linear_speed_mps", r.max_linear_speed},
              {"max_angular_speed_radps", r.max_angular_speed}}},
            {"clock_s", env.clock_s}};
}

/// Inverse of to_json. Throws nlohmann::json exceptions or Error on bad input.
inline Environment environment_from_json(const Json& j) {
    Environment env;
    env.layout = j.at("layout").get<std::string>();
    for (const Json& r : j.at("rooms")) {
        RoomSpec room{RoomId{r.at("id").get<std::uint32_t>()}, r.at("name").get<std::string>(),
                      {vec_from(r.at("bounds").at("min")), vec_from(r.at("bounds").at("max"))}, {}};
        for (const Json& d : r.at("doors")) room.doors.push_back({vec_from(d.at("a")), vec_from(d.at("b"))});
        env.rooms.push_back(std::move(room));
    }
    for (const Json& f : j.at("furniture")) {
        StaticObject s{FurnitureId{f.at("id").get<std::uint32_t>()}, f.at("category").get<std::string>(),
                       rect_from(f.at("footprint")), {}};
        for (const Json& id : f.at("surfaces")) s.surfaces.emplace_back(id.get<std::uint32_t>());
        env.furniture.push_back(std::move(s));
    }
    for (const Json& s : j.at("surfaces")) {
        const auto h = s.at("height_class").get<std::string>();
        if (h != "table-level" && h != "floor-level") throw Error("bad height class '" + h + "'");
        env.surfaces.push_back({SurfaceId{s.at("id").get<std::uint32_t>()}, FurnitureId{s.at("owner").get<std::uint32_t>()},
                                rect_from(s.at("region")), h == "table-level" ? HeightClass::TableLevel : HeightClass::FloorLevel});
    }
    for (const Json& o : j.at("objects")) {
        DynamicObject d;
        d.id = ObjectId{o.at("id").get<std::uint32_t>()};
        d.category = o.at("category").get<std::string>();
        d.color = optional_from(o.at("color"));
        d.material = optional_from(o.at("material"));
        d.pose = pose_from(o.at("pose"));
        d.radius = o.at("radius_m").get<double>();
        if (!o.at("support").is_null()) d.support = SurfaceId{o.at("support").get<std::uint32_t>()};
        env.objects.push_back(std::move(d));
    }
    const Json& r = j.at("robot");
    env.robot.pose = pose_from(r.at("pose"));
    env.robot.radius = r.at("radius_m").get<double>();
    env.robot.reach = r.at("reach_m").get<double>();
    if (!r.at("gripper").is_null()) env.robot.gripper = ObjectId{r.at("gripper").get<std::uint32_t>()};
    env.robot.max_linear_speed = r.at("max_linear_speed_mps").get<double>();
    env.robot.max_angular_speed = r.at("max_angular_speed_radps").get<double>();
    env.clock_s = j.at("clock_s").get<double>();
    env.finalize();
    return env;
}

}  // namespace fcog::world
