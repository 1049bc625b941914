#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fcog/world/environment.hpp"

namespace fcog::world {

/// Incremental construction of static layouts.
class LayoutBuilder {
public:
    explicit LayoutBuilder(std::string layout_id) { env_.layout = std::move(layout_id); }

    RoomId room(std::string name, Box bounds) {
        const RoomId id{static_cast<std::uint32_t>(env_.rooms.size())};
        env_.rooms.push_back({id, std::move(name), bounds, {}});
        return id;
    }

    /// Adds the same door gap to both rooms.
    void door(RoomId a, RoomId b, Vec2 p0, Vec2 p1) {
        env_.rooms.at(a.value).doors.push_back({p0, p1});
        env_.rooms.at(b.value).doors.push_back({p0, p1});
    }

    /// Furniture with a single support surface inset from its footprint.
    FurnitureId furniture(std::string category, Rect footprint, Rect region, HeightClass height) {
        const FurnitureId fid{static_cast<std::uint32_t>(env_.furniture.size())};
        const SurfaceId sid{static_cast<std::uint32_t>(env_.surfaces.size())};
        env_.furniture.push_back({fid, std::move(category), footprint, {sid}});
        env_.surfaces.push_back({sid, fid, region, height});
        return fid;
    }

    void start(Pose p) { env_.robot.pose = p; }

    Environment build() {
        env_.finalize();
        return env_;
    }

private:
    Environment env_;
};

/// Four-room house used by default: living room, kitchen, bedroom, study.
inline Environment house_layout() {
    using H = HeightClass;
    LayoutBuilder b("house");
    const RoomId living = b.room("living room", {{0.0, 0.0}, {5.0, 4.0}});
    const RoomId kitchen = b.room("kitchen", {{5.0, 0.0}, {10.0, 4.0}});
    const RoomId bedroom = b.room("bedroom", {{0.0, 4.0}, {5.0, 8.0}});
    const RoomId study = b.room("study", {{5.0, 4.0}, {10.0, 8.0}});
    b.door(living, kitchen, {5.0, 1.4}, {5.0, 2.6});
    b.door(living, bedroom, {1.9, 4.0}, {3.1, 4.0});
    b.door(kitchen, study, {6.9, 4.0}, {8.1, 4.0});
    b.door(bedroom, study, {5.0, 5.4}, {5.0, 6.6});

    b.furniture("sofa", {{2.5, 0.45}, 0.9, 0.35, 0.0}, {{2.5, 0.575}, 0.85, 0.175, 0.0}, H::FloorLevel);
    b.furniture("table", {{2.5, 2.0}, 0.5, 0.35, 0.0}, {{2.5, 2.0}, 0.45, 0.3, 0.0}, H::TableLevel);
    b.furniture("shelf", {{0.25, 3.0}, 0.2, 0.6, 0.0}, {{0.25, 3.0}, 0.18, 0.55, 0.0}, H::TableLevel);
    b.furniture("cabinet", {{4.5, 0.35}, 0.4, 0.3, 0.0}, {{4.5, 0.35}, 0.35, 0.25, 0.0}, H::TableLevel);

    b.furniture("table", {{7.5, 2.0}, 0.6, 0.4, 0.0}, {{7.5, 2.0}, 0.55, 0.35, 0.0}, H::TableLevel);
    b.furniture("cabinet", {{7.5, 0.35}, 1.2, 0.3, 0.0}, {{7.5, 0.35}, 1.15, 0.25, 0.0}, H::TableLevel);
    b.furniture("shelf", {{9.75, 2.5}, 0.2, 0.7, 0.0}, {{9.75, 2.5}, 0.18, 0.65, 0.0}, H::TableLevel);

    b.furniture("bed", {{1.1, 7.0}, 1.0, 0.9, 0.0}, {{1.1, 6.375}, 0.95, 0.225, 0.0}, H::FloorLevel);
    b.furniture("desk", {{3.8, 7.6}, 0.6, 0.35, 0.0}, {{3.8, 7.6}, 0.55, 0.3, 0.0}, H::TableLevel);
    b.furniture("shelf", {{0.25, 4.9}, 0.2, 0.6, 0.0}, {{0.25, 4.9}, 0.18, 0.55, 0.0}, H::TableLevel);
    b.furniture("cabinet", {{4.3, 4.35}, 0.5, 0.3, 0.0}, {{4.3, 4.35}, 0.45, 0.25, 0.0}, H::TableLevel);

    b.furniture("desk", {{9.6, 6.0}, 0.35, 0.7, 0.0}, {{9.6, 6.0}, 0.3, 0.65, 0.0}, H::TableLevel);
    b.furniture("shelf", {{7.0, 7.75}, 0.7, 0.2, 0.0}, {{7.0, 7.75}, 0.65, 0.18, 0.0}, H::TableLevel);
    b.furniture("sofa", {{5.9, 4.4}, 0.8, 0.35, 0.0}, {{5.9, 4.55}, 0.75, 0.15, 0.0}, H::FloorLevel);
    b.furniture("table", {{7.5, 6.2}, 0.45, 0.45, 0.0}, {{7.5, 6.2}, 0.4, 0.4, 0.0}, H::TableLevel);

    b.start({1.2, 1.5, 0.0});
    return b.build();
}

/// Single open room with two pieces of furniture; every point is reachable.
inline Environment open_plan_layout() {
    using H = HeightClass;
    LayoutBuilder b("open_plan");
    b.room("living room", {{0.0, 0.0}, {6.0, 5.0}});
    b.furniture("table", {{3.0, 2.5}, 0.5, 0.4, 0.0}, {{3.0, 2.5}, 0.45, 0.35, 0.0}, H::TableLevel);
    b.furniture("shelf", {{0.25, 2.5}, 0.2, 0.6, 0.0}, {{0.25, 2.5}, 0.18, 0.55, 0.0}, H::TableLevel);
    b.start({1.0, 1.0, 0.0});
    return b.build();
}

inline std::vector<std::string> layout_ids() { return {"house", "open_plan"}; }

inline Environment make_layout(std::string_view id) {
    if (id == "house") return house_layout();
    if (id == "open_plan") return open_plan_layout();
    throw Error("unknown layout '" + std::string(id) + "'");
}

}  // namespace fcog::world
