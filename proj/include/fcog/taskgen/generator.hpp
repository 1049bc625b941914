#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fcog/agent/executor.hpp"
#include "fcog/agent/perception.hpp"
#include "fcog/instruction/grammar.hpp"
#include "fcog/world/layouts.hpp"

namespace fcog::taskgen {

using agent::GroundingWeights;
using instruction::InstructionAst;
using instruction::RelationThresholds;
using instruction::Vocabulary;
using world::Capture;
using world::CameraPose;
using world::DynamicObject;
using world::EntityRef;
using world::Environment;
using world::Vec2;

struct GenConfig {
    std::uint64_t seed = 0;
    std::string layout = "house";
    double objects_per_room = 5.0;
    int min_objects_per_room = 1;
    int max_objects_per_room = 8;
    bool distractor_guarantee = true;
    double p_color = 0.75;
    double p_material = 0.6;
    /// Describe the target by its support ("from the shelf") instead of a relation.
    bool source_phrase = false;
    RelationThresholds relations;
    GroundingWeights weights;
    int max_task_attempts = 50;
    int max_placement_rejections = 10000;
    double capture_ring_m = 1.5;
    int capture_headings = 16;

    void validate() const {
        if (!(objects_per_room >= 0.0)) throw Error("objects_per_room must be non-negative");
        if (min_objects_per_room < 0 || max_objects_per_room < min_objects_per_room)
            throw Error("object count bounds are inconsistent");
        for (double p : {p_color, p_material})
            if (!(p >= 0.0 && p <= 1.0)) throw Error("attribute probabilities must lie in [0, 1]");
        if (max_task_attempts < 1) throw Error("max_task_attempts must be at least 1");
        const auto ids = world::layout_ids();
        if (std::find(ids.begin(), ids.end(), layout) == ids.end()) throw Error("unknown layout '" + layout + "'");
    }
};

class PlacementExhausted : public Error {
public:
    using Error::Error;
};
class NoFeasibleTask : public Error {
public:
    using Error::Error;
};
class NoViewpoint : public Error {
public:
    using Error::Error;
};
class GenerationFailed : public Error {
public:
    using Error::Error;
};

/// Footprint radius for each object category.
inline double category_radius(std::string_view cat) {
    static const std::map<std::string, double, std::less<>> r{
        {"bottle", 0.04}, {"mug", 0.045}, {"toy car", 0.06}, {"apple", 0.04},  {"can", 0.04},
        {"cup", 0.04},    {"book", 0.07}, {"teddy bear", 0.07}, {"ball", 0.05}, {"bowl", 0.07},
        {"sponge", 0.05}, {"remote", 0.05}, {"box", 0.07},  {"vase", 0.055}};
    const auto it = r.find(cat);
    return it == r.end() ? 0.05 : it->second;
}

inline std::optional<RoomId> room_of_furniture(const Environment& env, FurnitureId f) {
    return world::point_in_room(env.furniture_of(f).footprint.center, env);
}

inline std::optional<RoomId> room_of(const Environment& env, EntityRef e) {
    if (e.kind == world::EntityKind::Surface) return room_of_furniture(env, env.surface(e.surface_id()).owner);
    return world::point_in_room(env.object(e.object_id()).pose.position(), env);
}

inline std::vector<SurfaceId> surfaces_in(const Environment& env, RoomId room) {
    std::vector<SurfaceId> out;
    for (const world::SupportSurface& s : env.surfaces)
        if (room_of_furniture(env, s.owner) == room) out.push_back(s.id);
    return out;
}

/// Static layout plus randomly placed objects on the surfaces of each room.
inline Environment build_environment(const GenConfig& cfg, Rng& rng, const Vocabulary& vocab = Vocabulary::builtin()) {
    Environment env = world::make_layout(cfg.layout);
    int rejections = 0;
    for (const world::RoomSpec& room : env.rooms) {
        const std::vector<SurfaceId> surfaces = surfaces_in(env, room.id);
        const int drawn = rng.poisson(cfg.objects_per_room);
        const int n = surfaces.empty() ? 0 : std::clamp(drawn, cfg.min_objects_per_room, cfg.max_objects_per_room);
        std::vector<std::string> cats;
        for (int i = 0; i < n; ++i) cats.push_back(vocab.objects[rng.below(vocab.objects.size())]);
        if (cfg.distractor_guarantee && n >= 2) {
            std::vector<std::string> sorted = cats;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) {
                const std::size_t i = rng.below(cats.size());
                std::size_t j = rng.below(cats.size() - 1);
                if (j >= i) ++j;
                cats[j] = cats[i];
            }
        }
        for (const std::string& cat : cats) {
            DynamicObject o;
            o.id = ObjectId{static_cast<std::uint32_t>(env.objects.size())};
            o.category = cat;
            o.radius = category_radius(cat);
            if (rng.bernoulli(cfg.p_color)) o.color = vocab.colors[rng.below(vocab.colors.size())];
            if (rng.bernoulli(cfg.p_material)) o.material = vocab.materials[rng.below(vocab.materials.size())];
            o.pose.theta = rng.uniform(-kPi, kPi);
            for (;;) {
                const SurfaceId sid = surfaces[rng.below(surfaces.size())];
                const world::Rect& region = env.surface(sid).region;
                const Vec2 local{rng.uniform(-region.half_w, region.half_w), rng.uniform(-region.half_h, region.half_h)};
                const Vec2 p = world::to_world(region.frame(), local);
                if (world::disk_inside(region, p, o.radius) && world::placement_free(env, o.id, p, o.radius)) {
                    o.pose.x = p.x;
                    o.pose.y = p.y;
                    o.support = sid;
                    break;
                }
                if (++rejections > cfg.max_placement_rejections)
                    throw PlacementExhausted("object placement rejected " + std::to_string(rejections) + " times");
            }
            env.objects.push_back(std::move(o));
        }
    }
    return env;
}

struct TaskChoice {
    ObjectId target;
    SurfaceId destination;
};

/// Uniform target among objects, uniform destination among the other surfaces
/// of the target's room. With `require_distractor`, only objects sharing their
/// category with another object in the same room are eligible targets.
inline TaskChoice select_task(const Environment& env, Rng& rng, bool require_distractor = false) {
    if (env.objects.empty()) throw NoFeasibleTask("environment has no objects");
    std::vector<const DynamicObject*> pool;
    for (const DynamicObject& o : env.objects) {
        bool eligible = !require_distractor;
        const auto room = world::point_in_room(o.pose.position(), env);
        for (const DynamicObject& other : env.objects)
            eligible = eligible || (other.id != o.id && other.category == o.category &&
                                    world::point_in_room(other.pose.position(), env) == room);
        if (eligible) pool.push_back(&o);
    }
    if (pool.empty()) throw NoFeasibleTask("no object has a same-category distractor in its room");
    const DynamicObject& t = *pool[rng.below(pool.size())];
    const auto room = world::point_in_room(t.pose.position(), env);
    std::vector<SurfaceId> dests;
    if (room)
        for (SurfaceId s : surfaces_in(env, *room))
            if (s != t.support) dests.push_back(s);
    if (dests.empty()) throw NoFeasibleTask("no alternative surface for the target");
    return {t.id, dests[rng.below(dests.size())]};
}

/// First pose on a ring around the subject, looking at it, that sees it.
inline Capture capture_view(const Environment& env, EntityRef subject, double ring = 1.5, int headings = 16) {
    const Vec2 c = world::reference_point(env, subject);
    const auto room = room_of(env, subject);
    for (int k = 0; k < headings; ++k) {
        const double a = 2.0 * kPi * k / headings;
        const Vec2 p = c + world::unit(a) * ring;
        if (!room || world::point_in_room(p, env) != room) continue;
        if (world::static_clearance(env, p) <= 0.0) continue;
        const CameraPose cam{{p.x, p.y, world::normalize_angle(a + kPi)}};
        Capture cap = world::capture(env, cam, subject);
        for (const world::Snapshot& s : cap.snapshots)
            if (s.entity == subject) return cap;
    }
    throw NoViewpoint("no ring viewpoint sees the subject");
}

inline std::pair<Capture, Capture> capture_views(const Environment& env, ObjectId target, SurfaceId destination,
                                                 double ring = 1.5, int headings = 16) {
    return {capture_view(env, EntityRef::object(target), ring, headings),
            capture_view(env, EntityRef::surface(destination), ring, headings)};
}

struct Instruction {
    InstructionAst ast;
    std::string text;
};

inline Instruction make_instruction(const Environment& env, TaskChoice task, const Capture& target_cap,
                                    const Capture& dest_cap, bool source_phrase = false,
                                    const RelationThresholds& t = {}) {
    using namespace instruction;
    Instruction out;
    const auto room = world::point_in_room(env.object(task.target).pose.position(), env);
    if (!room) throw Error("target is outside every room");
    out.ast.go.room = env.room(*room).name;
    const EntityRef target = EntityRef::object(task.target);
    if (source_phrase) {
        const SourceDescriptor d = source_descriptor(target, target_cap.snapshots);
        out.ast.manip.target = d.attributes;
        out.ast.manip.source = d.source;
    } else {
        const Descriptor d = distinguishing_descriptor(target, target_cap.snapshots, t);
        out.ast.manip.target = d.attributes;
        out.ast.manip.relation = d.relation;
    }
    const auto dest = minimal_attributes(EntityRef::surface(task.destination), dest_cap.snapshots);
    if (!dest) throw NoDistinguishingDescription("destination is ambiguous in its capture");
    out.ast.manip.destination = *dest;
    const bool table_level = env.surface(task.destination).height == world::HeightClass::TableLevel;
    out.ast.manip.prep = table_level && !source_phrase ? DestPreposition::Onto : DestPreposition::To;
    out.text = realize(out.ast);
    return out;
}

struct TaskSpec {
    ObjectId target;
    SurfaceId destination;
    Capture target_capture;
    Capture destination_capture;
    Instruction instruction;
    Vec2 target_position;
    Vec2 destination_position;
    int attempt = 0;
};

struct GeneratedTask {
    Environment env;
    TaskSpec task;
};

/// Where the robot stands when the crawl starts.
inline Vec2 crawl_start(const Environment& env, const agent::NavGrid& grid, RoomId room) {
    if (world::point_in_room(env.robot.pose.position(), env) == room) return env.robot.pose.position();
    return agent::room_anchor(env, grid, room);
}

/// Crawl captures the robot will take in `room`, computed without moving.
inline std::vector<Capture> planned_crawl(const Environment& env, const agent::NavGrid& grid, RoomId room,
                                          const agent::CrawlConfig& cfg = {}) {
    std::vector<Capture> out;
    for (const CameraPose& cam : agent::crawl_viewpoints(env, grid, room, crawl_start(env, grid, room), cfg))
        out.push_back(world::capture(env, cam));
    return out;
}

/// Reason the task cannot be executed reliably, or nothing when it can.
/// `grid` must be built from the same static layout as `env`.
inline std::optional<std::string> infeasibility(const Environment& env, const TaskSpec& task, const GenConfig& cfg,
                                                const agent::AgentConfig& acfg, const agent::NavGrid& grid) {
    const RoomId room = *env.find_room(task.instruction.ast.go.room);
    const int start_comp = grid.component_at(env, env.robot.pose.position());
    Vec2 anchor;
    try {
        anchor = agent::room_anchor(env, grid, room);
    } catch (const agent::NoPath&) {
        return "room has no free space";
    }
    if (start_comp < 0 || grid.component_at(env, anchor) != start_comp) return "room anchor unreachable";

    const auto captures = planned_crawl(env, grid, room, acfg.crawl);
    const auto dets = agent::perfect_detections(captures);
    const agent::GroundingResult g =
        agent::ground(task.instruction.ast, dets, agent::GrounderKind::Relational, {}, cfg.relations, cfg.weights);
    if (g.target != task.target) return "crawl grounding misses the target";
    if (g.destination != task.destination) return "crawl grounding misses the destination";
    for (const auto& c : g.target_scores)
        if (c.entity != EntityRef::object(task.target) && c.score >= g.target_threshold) return "target not unique";
    for (const auto& c : g.destination_scores)
        if (c.entity != EntityRef::surface(task.destination) && c.score >= g.destination_threshold)
            return "destination not unique";
    if (cfg.distractor_guarantee) {
        const auto b = agent::ground(task.instruction.ast, dets, agent::GrounderKind::KeywordBaseline);
        if (b.target_scores.size() < 2) return "no same-category distractor in view";
    }

    const DynamicObject& t = env.object(task.target);
    const world::SupportSurface& dest = env.surface(task.destination);
    double occupied = 0.0;
    for (const DynamicObject& o : env.objects)
        if (o.support == dest.id) occupied += kPi * o.radius * o.radius;
    if (dest.region.area() - occupied < 4.0 * kPi * t.radius * t.radius) return "destination too crowded";

    const Vec2 from = crawl_start(env, grid, room);
    if (agent::grasp_approaches(env, grid, task.target, from, from, acfg.approach).empty()) return "no grasp pose";
    if (agent::place_approaches(env, grid, task.target, task.destination, from, from, acfg.approach).empty())
        return "no place pose";
    return std::nullopt;
}

inline std::optional<std::string> infeasibility(const Environment& env, const TaskSpec& task, const GenConfig& cfg,
                                                const agent::AgentConfig& acfg = {}) {
    return infeasibility(env, task, cfg, acfg, agent::NavGrid(env, acfg.planner));
}

/// One attempt: scene, task choice, captures, instruction.
inline GeneratedTask generate_attempt(const GenConfig& cfg, int attempt) {
    Rng scene_rng(cfg.seed, "scene", static_cast<std::uint64_t>(attempt));
    Rng task_rng(cfg.seed, "task", static_cast<std::uint64_t>(attempt));
    GeneratedTask g{build_environment(cfg, scene_rng), {}};
    const TaskChoice choice = select_task(g.env, task_rng, cfg.distractor_guarantee);
    auto [tc, dc] = capture_views(g.env, choice.target, choice.destination, cfg.capture_ring_m, cfg.capture_headings);
    g.task.target = choice.target;
    g.task.destination = choice.destination;
    g.task.instruction = make_instruction(g.env, choice, tc, dc, cfg.source_phrase, cfg.relations);
    g.task.target_capture = std::move(tc);
    g.task.destination_capture = std::move(dc);
    g.task.target_position = g.env.object(choice.target).pose.position();
    g.task.destination_position = g.env.surface(choice.destination).region.center;
    g.task.attempt = attempt;
    return g;
}

/// Rejection-samples a feasible task, failing hard after the attempt budget.
inline GeneratedTask generate_task(const GenConfig& cfg, const agent::AgentConfig& acfg = {}) {
    cfg.validate();
    // The grid sees only walls and furniture, which every attempt shares.
    const agent::NavGrid grid(world::make_layout(cfg.layout), acfg.planner);
    std::string last = "no attempts";
    for (int a = 0; a < cfg.max_task_attempts; ++a) {
        try {
            GeneratedTask g = generate_attempt(cfg, a);
            if (auto why = infeasibility(g.env, g.task, cfg, acfg, grid)) {
                last = *why;
                continue;
            }
            return g;
        } catch (const instruction::NoDistinguishingDescription& e) {
            last = e.what();
        } catch (const NoViewpoint& e) {
            last = e.what();
        } catch (const NoFeasibleTask& e) {
            last = e.what();
        } catch (const PlacementExhausted& e) {
            last = e.what();
        }
    }
    throw GenerationFailed("seed " + std::to_string(cfg.seed) + ": no feasible task after " +
                           std::to_string(cfg.max_task_attempts) + " attempts (last: " + last + ")");
}

}  // namespace fcog::taskgen
