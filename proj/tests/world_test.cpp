#include <gtest/gtest.h>

#include <map>

#include "fcog/world/scene_json.hpp"
#include "test_support.hpp"

using namespace fcog;
using namespace fcog::world;
using fcog::testing::bare_room;
using fcog::testing::make_object;

namespace {

std::optional<RoomId> half_open_oracle(const Environment& env, Vec2 p) {
    for (const RoomSpec& r : env.rooms)
        if (p.x >= r.bounds.min.x && p.x < r.bounds.max.x && p.y >= r.bounds.min.y && p.y < r.bounds.max.y)
            return r.id;
    return std::nullopt;
}

// Room with a table (one surface) and the robot near it.
Environment table_room() {
    LayoutBuilder b("table_room");
    b.room("kitchen", {{0, 0}, {6, 4}});
    b.furniture("table", {{3.0, 2.0}, 0.5, 0.3, 0.0}, {{3.0, 2.0}, 0.45, 0.25, 0.0}, HeightClass::TableLevel);
    b.start({3.0, 1.2, kPi / 2});
    return b.build();
}

}  // namespace

TEST(PointInRoom, CenterAndOutside) {
    const Environment env = house_layout();
    const RoomId bedroom = *env.find_room("bedroom");
    EXPECT_EQ(point_in_room(env.room(bedroom).bounds.center(), env), bedroom);
    EXPECT_EQ(point_in_room({-1.0, 2.0}, env), std::nullopt);
    EXPECT_EQ(point_in_room({10.0, 2.0}, env), std::nullopt);
}

TEST(PointInRoom, SharedWallBelongsToLowEdgeOwner) {
    const Environment env = house_layout();
    // x = 5 is the living room's high edge and the kitchen's low edge.
    EXPECT_EQ(point_in_room({5.0, 2.0}, env), env.find_room("kitchen"));
    EXPECT_EQ(point_in_room({2.0, 4.0}, env), env.find_room("bedroom"));
    EXPECT_EQ(point_in_room({5.0, 4.0}, env), env.find_room("study"));
    Rng rng(9);
    for (int i = 0; i < 2000; ++i) {
        // Snap to a 0.5 m lattice so boundary points are common.
        const Vec2 p{std::round(rng.uniform(-1, 11) * 2) / 2, std::round(rng.uniform(-1, 9) * 2) / 2};
        EXPECT_EQ(point_in_room(p, env), half_open_oracle(env, p));
    }
}

TEST(LineOfSight, Basics) {
    Environment env = table_room();
    EXPECT_TRUE(line_of_sight({1, 1}, {1, 1}, env));
    // Crosses the table footprint.
    EXPECT_FALSE(line_of_sight({1.0, 2.0}, {5.0, 2.0}, env));
    EXPECT_TRUE(line_of_sight({1.0, 3.0}, {5.0, 3.0}, env));
    // Through the outer wall.
    EXPECT_FALSE(line_of_sight({1.0, 3.0}, {1.0, 5.0}, env));
    // Grazing an object disk: blocked unless that object is ignored.
    env.objects.push_back(make_object(0, "mug", {2.0, 3.02}, 0.05));
    EXPECT_FALSE(line_of_sight({1.0, 3.0}, {5.0, 3.0}, env));
    IgnoreSet ig;
    ig.objects.push_back(ObjectId{0});
    EXPECT_TRUE(line_of_sight({1.0, 3.0}, {5.0, 3.0}, env, ig));
    EXPECT_TRUE(fcog::testing::sampled_line_of_sight(env, {1.0, 3.0}, {5.0, 3.0}, ig));
    // Ignoring furniture lets the sight line through the table.
    IgnoreSet table;
    table.furniture.push_back(FurnitureId{0});
    EXPECT_TRUE(line_of_sight({1.0, 2.0}, {5.0, 2.0}, env, table));
}

TEST(Walls, DoorsLeaveGaps) {
    const Environment env = house_layout();
    // Sight line through the living room / kitchen door.
    EXPECT_TRUE(line_of_sight({4.5, 2.0}, {5.5, 2.0}, env));
    EXPECT_FALSE(line_of_sight({4.5, 1.0}, {5.5, 1.0}, env));
    EXPECT_TRUE(validate(env).empty());
}

TEST(Visibility, EmptyRoomSeesNothing) {
    const Environment env = bare_room();
    EXPECT_TRUE(visible_objects({{1.0, 2.0, 0.0}}, env).empty());
}

TEST(Visibility, ConeRangeAndOcclusion) {
    Environment env = bare_room();
    LayoutBuilder b("occluder");
    env.furniture.push_back({FurnitureId{0}, "cabinet", {{3.5, 2.0}, 0.3, 0.5, 0.0}, {}});
    env.objects.push_back(make_object(0, "mug", {2.5, 2.0}));                                   // A: 2.0 m ahead
    env.objects.push_back(make_object(1, "mug", {4.5, 2.0}));                                   // B: behind cabinet
    env.objects.push_back(make_object(2, "mug", {0.5 + 5 * std::cos(0.3), 2 + 5 * std::sin(0.3)}));  // C: 5 m
    const CameraPose cam{{0.5, 2.0, 0.0}};
    const auto snaps = visible_objects(cam, env);
    ASSERT_EQ(snaps.size(), 1u);
    EXPECT_EQ(snaps[0].entity, EntityRef::object(ObjectId{0}));
    EXPECT_NEAR(snaps[0].range, 2.0, 1e-12);
    EXPECT_NEAR(snaps[0].bearing, 0.0, 1e-12);
    EXPECT_EQ(fcog::testing::oracle_visible(cam, env), std::vector<EntityRef>{EntityRef::object(ObjectId{0})});

    // Out of the 90 degree cone.
    const auto behind = visible_objects({{0.5, 2.0, kPi}}, env);
    EXPECT_TRUE(behind.empty());
}

TEST(Visibility, ObjectsOnFurnitureAreVisible) {
    Environment env = table_room();
    env.objects.push_back(make_object(0, "mug", {3.2, 2.0}, 0.05, SurfaceId{0}));
    env.objects.push_back(make_object(1, "mug", {3.0, 2.0}, 0.05, SurfaceId{0}));  // sits on the surface center
    const auto snaps = visible_objects({{3.0, 0.3, kPi / 2}}, env);
    ASSERT_EQ(snaps.size(), 3u);
    EXPECT_EQ(snaps[0].entity, EntityRef::object(ObjectId{1}));
    EXPECT_EQ(snaps[1].entity, EntityRef::surface(SurfaceId{0}));
    EXPECT_EQ(snaps[1].category, "table");
    EXPECT_EQ(snaps[2].entity, EntityRef::object(ObjectId{0}));
    EXPECT_EQ(snaps[2].support, SurfaceId{0});
}

TEST(Visibility, MatchesBruteForceOracle) {
    Rng rng(2024);
    for (int i = 0; i < 30; ++i) {
        const auto scene = fcog::testing::random_scene(rng, 10);
        std::vector<EntityRef> got;
        for (const Snapshot& s : visible_objects(scene.camera, scene.env)) got.push_back(s.entity);
        EXPECT_EQ(got, fcog::testing::oracle_visible(scene.camera, scene.env)) << "scene " << i;
        for (const Snapshot& s : visible_objects(scene.camera, scene.env)) {
            EXPECT_LE(std::abs(s.bearing), scene.camera.fov / 2);
            EXPECT_LE(s.range, scene.camera.range);
        }
    }
}

TEST(Step, ZeroCommandAdvancesClockOnly) {
    Environment env = table_room();
    const Pose before = env.robot.pose;
    const auto r = step(env, {0, 0}, 0.05);
    EXPECT_FALSE(r.collided);
    EXPECT_EQ(env.robot.pose, before);
    EXPECT_DOUBLE_EQ(env.clock_s, 0.05);
}

TEST(Step, ClosedFormUnicycle) {
    Environment env = table_room();
    env.robot.pose = {1.0, 1.0, 0.0};
    step(env, {1.0, 0.0}, 0.05);
    EXPECT_NEAR(env.robot.pose.x, 1.05, 1e-12);
    EXPECT_NEAR(env.robot.pose.y, 1.0, 1e-12);

    env.robot.pose = {1.0, 1.0, 0.0};
    step(env, {0.0, kPi}, 0.5);
    EXPECT_NEAR(env.robot.pose.theta, kPi / 2, 1e-12);
    step(env, {0.0, kPi}, 0.5);
    EXPECT_NEAR(env.robot.pose.theta, -kPi, 1e-12);  // renormalized from +pi

    // Commands beyond the limits are clamped.
    env.robot.pose = {1.0, 1.0, 0.0};
    step(env, {5.0, 0.0}, 0.05);
    EXPECT_NEAR(env.robot.pose.x, 1.05, 1e-12);
}

TEST(Step, CollisionFreezesPose) {
    Environment env = table_room();
    env.robot.pose = {3.0, 1.43, kPi / 2};  // table edge at y = 1.7, radius 0.25
    const Pose before = env.robot.pose;
    const auto r = step(env, {1.0, 0.0}, 0.05);
    EXPECT_TRUE(r.collided);
    EXPECT_EQ(env.robot.pose, before);
    EXPECT_DOUBLE_EQ(env.clock_s, 0.05);
}

TEST(Step, HeldObjectMovesRigidlyAndNoTunneling) {
    Environment env = table_room();
    env.objects.push_back(make_object(0, "mug", {3.0, 1.82}, 0.05, SurfaceId{0}));
    ASSERT_EQ(grasp(env, ObjectId{0}), GraspStatus::Success);
    Rng rng(1);
    for (int i = 0; i < 2000; ++i) {
        const auto r = step(env, {rng.uniform(-1.0, 1.0), rng.uniform(-kPi, kPi)}, 0.05);
        EXPECT_LE(r.displacement, 0.05 + 1e-12);
        EXPECT_LT(0.05, env.robot.radius);
        const Pose g = grip_pose(env.robot);
        EXPECT_NEAR(env.object(ObjectId{0}).pose.x, g.x, 1e-12);
        EXPECT_NEAR(env.object(ObjectId{0}).pose.y, g.y, 1e-12);
        EXPECT_FALSE(robot_collides(env, env.robot.pose.position()));
    }
    EXPECT_EQ(env.objects.size(), 1u);
}

TEST(Grasp, Outcomes) {
    Environment env = table_room();
    env.robot.pose = {3.0, 1.3, kPi / 2};
    env.objects.push_back(make_object(0, "mug", {3.0, 1.8}, 0.05, SurfaceId{0}));  // 0.5 m
    env.objects.push_back(make_object(1, "cup", {3.0, 2.2}, 0.05, SurfaceId{0}));  // 0.9 m
    env.objects.push_back(make_object(2, "can", {3.4, 2.0}, 0.05, SurfaceId{0}));
    EXPECT_EQ(grasp(env, ObjectId{7}), GraspStatus::NoSuchObject);
    EXPECT_EQ(grasp(env, ObjectId{1}), GraspStatus::OutOfReach);
    ASSERT_EQ(grasp(env, ObjectId{0}), GraspStatus::Success);
    EXPECT_EQ(env.robot.gripper, ObjectId{0});
    EXPECT_FALSE(env.object(ObjectId{0}).support.has_value());
    EXPECT_TRUE(validate(env).empty());
    EXPECT_EQ(grasp(env, ObjectId{2}), GraspStatus::GripperOccupied);
}

TEST(Grasp, OutOfReachAtOnePointTwoMeters) {
    Environment env = table_room();
    env.robot.pose = {3.0, 0.6, kPi / 2};
    env.objects.push_back(make_object(0, "mug", {3.0, 1.8}, 0.05, SurfaceId{0}));
    EXPECT_EQ(grasp(env, ObjectId{0}), GraspStatus::OutOfReach);
}

TEST(Grasp, OccludedByAnotherObject) {
    Environment env = table_room();
    env.robot.pose = {3.0, 1.3, kPi / 2};
    env.objects.push_back(make_object(0, "mug", {3.0, 2.0}, 0.05, SurfaceId{0}));
    env.objects.push_back(make_object(1, "box", {3.0, 1.8}, 0.07, SurfaceId{0}));
    EXPECT_EQ(grasp(env, ObjectId{0}), GraspStatus::Occluded);
}

TEST(Place, Outcomes) {
    Environment env = table_room();
    EXPECT_EQ(place(env, SurfaceId{0}), PlaceStatus::NotHolding);

    env.robot.pose = {3.0, 1.3, kPi / 2};
    env.objects.push_back(make_object(0, "mug", {3.0, 1.8}, 0.05, SurfaceId{0}));
    ASSERT_EQ(grasp(env, ObjectId{0}), GraspStatus::Success);
    ASSERT_EQ(place(env, SurfaceId{0}), PlaceStatus::Success);
    const DynamicObject& o = env.object(ObjectId{0});
    EXPECT_EQ(o.support, SurfaceId{0});
    EXPECT_TRUE(disk_inside(env.surface(SurfaceId{0}).region, o.pose.position(), o.radius));
    EXPECT_LE(distance(o.pose.position(), env.robot.pose.position()), env.robot.reach);
    EXPECT_FALSE(env.robot.gripper.has_value());
    EXPECT_TRUE(validate(env).empty());
}

TEST(Place, SurfaceOutOfReach) {
    Environment env = table_room();
    env.robot.pose = {3.0, 1.3, kPi / 2};
    env.objects.push_back(make_object(0, "mug", {3.0, 1.8}, 0.05, SurfaceId{0}));
    ASSERT_EQ(grasp(env, ObjectId{0}), GraspStatus::Success);
    env.robot.pose = {1.0, 1.0, 0.0};
    EXPECT_EQ(place(env, SurfaceId{0}), PlaceStatus::SurfaceOutOfReach);
}

TEST(Place, PackedSurfaceHasNoFreePose) {
    LayoutBuilder b("tiny");
    b.room("kitchen", {{0, 0}, {4, 4}});
    b.furniture("cabinet", {{2.0, 2.0}, 0.15, 0.15, 0.0}, {{2.0, 2.0}, 0.1, 0.1, 0.0}, HeightClass::TableLevel);
    b.start({2.0, 1.4, kPi / 2});
    Environment env = b.build();
    // Four disks of radius 0.05 tile the 0.2 m x 0.2 m surface.
    std::uint32_t id = 0;
    for (double x : {1.95, 2.05})
        for (double y : {1.95, 2.05}) env.objects.push_back(make_object(id++, "ball", {x, y}, 0.05, SurfaceId{0}));
    env.objects.push_back(make_object(id, "mug", {2.0, 1.5}, 0.04, std::nullopt));
    env.robot.gripper = ObjectId{id};
    env.object(ObjectId{id}).pose = grip_pose(env.robot);
    EXPECT_EQ(place(env, SurfaceId{0}), PlaceStatus::NoFreePose);

    // Packing oracle: no spiral candidate is both inside and free.
    for (Vec2 p : placement_spiral(env.surface(SurfaceId{0}).region)) {
        if (!disk_inside(env.surface(SurfaceId{0}).region, p, 0.04)) continue;
        bool overlaps = false;
        for (std::uint32_t k = 0; k < 4; ++k)
            overlaps = overlaps || distance(env.objects[k].pose.position(), p) < 0.09;
        EXPECT_TRUE(overlaps);
    }
}

TEST(Environment, GraspPlaceSequencesConserveObjects) {
    Environment env = table_room();
    env.robot.pose = {3.0, 1.3, kPi / 2};
    for (std::uint32_t i = 0; i < 4; ++i)
        env.objects.push_back(make_object(i, "mug", {2.7 + 0.2 * i, 1.85}, 0.04, SurfaceId{0}));
    ASSERT_TRUE(validate(env).empty());
    Rng rng(4);
    std::multiset<std::uint32_t> ids;
    for (const auto& o : env.objects) ids.insert(o.id.value);
    for (int i = 0; i < 50; ++i) {
        const ObjectId pick{static_cast<std::uint32_t>(rng.below(4))};
        if (grasp(env, pick) == GraspStatus::Success) {
            EXPECT_EQ(place(env, SurfaceId{0}), PlaceStatus::Success);
        }
        EXPECT_TRUE(validate(env).empty()) << i;
        std::multiset<std::uint32_t> now;
        for (const auto& o : env.objects) now.insert(o.id.value);
        EXPECT_EQ(now, ids);
    }
}

TEST(Validate, ReportsViolations) {
    Environment env = table_room();
    env.objects.push_back(make_object(0, "mug", {3.4, 2.0}, 0.2, SurfaceId{0}));  // overhangs
    env.objects.push_back(make_object(1, "mug", {1.0, 1.0}, 0.05, std::nullopt));  // floating
    env.robot.pose = {3.0, 2.0, 0.0};                                             // inside the table
    const auto problems = validate(env);
    EXPECT_GE(problems.size(), 3u);
}

TEST(Validate, UnreachableRoomIsReported) {
    LayoutBuilder b("sealed");
    b.room("living room", {{0, 0}, {4, 4}});
    b.room("bedroom", {{4, 0}, {8, 4}});
    b.start({1, 1, 0});
    const auto problems = validate(b.build());
    ASSERT_EQ(problems.size(), 1u);
    EXPECT_NE(problems[0].find("unreachable"), std::string::npos);
}

TEST(SceneJson, RoundTrip) {
    Rng rng(77);
    for (int i = 0; i < 10; ++i) {
        const auto scene = fcog::testing::random_scene(rng, 10);
        const auto j = to_json(scene.env);
        const Environment back = environment_from_json(nlohmann::ordered_json::parse(j.dump()));
        EXPECT_EQ(to_json(back).dump(), j.dump());
    }
}
