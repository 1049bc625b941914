#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fcog/agent/approach.hpp"
#include "fcog/agent/perception.hpp"

namespace fcog::agent {

struct AgentConfig {
    PlannerConfig planner;
    ControllerConfig controller;
    CrawlConfig crawl;
    ApproachConfig approach;
};

struct SubtaskOutcome {
    bool attempted = false;
    bool succeeded = false;
    double time_s = 0.0;
    /// The deadline cut the subtask short.
    bool timed_out = false;
    std::string detail;
    bool operator==(const SubtaskOutcome&) const = default;
};

enum class MoveStatus { Reached, NoPath, Stuck, Deadline };

inline std::string_view to_string(MoveStatus s) {
    switch (s) {
        case MoveStatus::Reached: return "reached";
        case MoveStatus::NoPath: return "no path";
        case MoveStatus::Stuck: return "stuck";
        case MoveStatus::Deadline: return "deadline";
    }
    return "?";
}

/// The robot side of a session: moves, looks and manipulates in `env`.
class Agent {
public:
    Agent(Environment& env, const AgentConfig& cfg = {}) : env_(env), cfg_(cfg), grid_(env, cfg.planner) {}

    const NavGrid& grid() const { return grid_; }
    const AgentConfig& config() const { return cfg_; }

    /// Called with every path the robot is about to execute.
    std::function<void(const Path&)> on_path;
    /// Called after each executed path with how the drive went.
    std::function<void(const FollowResult&)> on_motion;

    MoveStatus move_to(Vec2 goal, std::optional<double> heading, double deadline) {
        if (env_.clock_s >= deadline) return MoveStatus::Deadline;
        Path path;
        try {
            path = plan_path(env_, grid_, env_.robot.pose.position(), goal);
        } catch (const NoPath&) {
            return MoveStatus::NoPath;
        }
        if (on_path) on_path(path);
        const FollowResult r = follow_path(env_, path, deadline, heading, cfg_.controller);
        if (on_motion) on_motion(r);
        switch (r.status) {
            case FollowStatus::Reached: return MoveStatus::Reached;
            case FollowStatus::Deadline: return MoveStatus::Deadline;
            case FollowStatus::Stuck: return MoveStatus::Stuck;
        }
        return MoveStatus::Stuck;
    }

    SubtaskOutcome navigate_to_room(RoomId room, double deadline) {
        SubtaskOutcome out;
        out.attempted = true;
        const double t0 = env_.clock_s;
        if (world::point_in_room(env_.robot.pose.position(), env_) == room) {
            out.succeeded = true;
            return out;
        }
        MoveStatus s = MoveStatus::NoPath;
        try {
            s = move_to(room_anchor(env_, grid_, room), std::nullopt, deadline);
        } catch (const NoPath&) {
        }
        out.time_s = env_.clock_s - t0;
        out.timed_out = s == MoveStatus::Deadline;
        out.succeeded = s == MoveStatus::Reached && world::point_in_room(env_.robot.pose.position(), env_) == room;
        if (!out.succeeded) out.detail = std::string(to_string(s));
        return out;
    }

    struct CrawlResult {
        std::vector<Capture> captures;
        bool timed_out = false;
    };

    /// Visits the room's lattice viewpoints and captures at each heading. The
    /// capture is taken from the nominal viewpoint.
    CrawlResult crawl(RoomId room, double deadline) {
        CrawlResult out;
        const auto views = crawl_viewpoints(env_, grid_, room, env_.robot.pose.position(), cfg_.crawl);
        for (const CameraPose& cam : views) {
            const MoveStatus s = move_to(cam.pose.position(), cam.pose.theta, deadline);
            if (s == MoveStatus::Deadline) {
                out.timed_out = true;
                break;
            }
            if (s != MoveStatus::Reached) continue;
            out.captures.push_back(world::capture(env_, cam));
        }
        return out;
    }

    /// Moves to the capture viewpoint where the target was grounded, then to a
    /// grasp pose, and grasps the grounded object.
    SubtaskOutcome fetch(const GroundingResult& g, ObjectId truth, std::span<const Capture> captures, double deadline) {
        if (!g.target) throw Error("fetch requires a grounded target");
        SubtaskOutcome out;
        out.attempted = true;
        const double t0 = env_.clock_s;
        auto finish = [&](std::string why, MoveStatus s = MoveStatus::Reached) {
            out.time_s = env_.clock_s - t0;
            out.timed_out = s == MoveStatus::Deadline;
            out.detail = std::move(why);
            return out;
        };
        if (!env_.has(*g.target)) return finish("grounded object does not exist");
        Vec2 prefer = env_.robot.pose.position();
        if (g.target_capture && *g.target_capture < captures.size()) {
            const Pose cam = captures[*g.target_capture].camera.pose;
            prefer = cam.position();
            const MoveStatus s = move_to(cam.position(), cam.theta, deadline);
            if (s == MoveStatus::Deadline) return finish(std::string(to_string(s)), s);
        }
        const auto poses = grasp_approaches(env_, grid_, *g.target, env_.robot.pose.position(), prefer, cfg_.approach);
        if (poses.empty()) return finish("no grasp pose");
        const MoveStatus s = move_to(poses.front().position(), poses.front().theta, deadline);
        if (s != MoveStatus::Reached) return finish(std::string(to_string(s)), s);
        const world::GraspStatus gs = world::grasp(env_, *g.target);
        if (gs != world::GraspStatus::Success) return finish(std::string(world::to_string(gs)));
        out.succeeded = env_.robot.gripper == truth;
        return finish(out.succeeded ? "" : "grasped the wrong object");
    }

    /// Moves to the destination viewpoint, then beside the surface, and places
    /// the held object.
    SubtaskOutcome carry(const GroundingResult& g, const GroundTruth& truth, std::span<const Capture> captures,
                         double deadline) {
        if (env_.robot.gripper != truth.target) throw Error("carry requires the target in the gripper");
        if (!g.destination) throw Error("carry requires a grounded destination");
        SubtaskOutcome out;
        out.attempted = true;
        const double t0 = env_.clock_s;
        auto finish = [&](std::string why, MoveStatus s = MoveStatus::Reached) {
            out.time_s = env_.clock_s - t0;
            out.timed_out = s == MoveStatus::Deadline;
            out.detail = std::move(why);
            return out;
        };
        if (!env_.has(*g.destination)) return finish("grounded surface does not exist");
        Vec2 prefer = env_.robot.pose.position();
        if (g.destination_capture && *g.destination_capture < captures.size()) {
            const Pose cam = captures[*g.destination_capture].camera.pose;
            prefer = cam.position();
            const MoveStatus s = move_to(cam.position(), cam.theta, deadline);
            if (s == MoveStatus::Deadline) return finish(std::string(to_string(s)), s);
        }
        const auto poses = place_approaches(env_, grid_, truth.target, *g.destination, env_.robot.pose.position(),
                                            prefer, cfg_.approach);
        if (poses.empty()) return finish("no place pose");
        const MoveStatus s = move_to(poses.front().position(), poses.front().theta, deadline);
        if (s != MoveStatus::Reached) return finish(std::string(to_string(s)), s);
        const world::PlaceStatus ps = world::place(env_, *g.destination);
        if (ps != world::PlaceStatus::Success) return finish(std::string(world::to_string(ps)));
        const world::DynamicObject& o = env_.object(truth.target);
        out.succeeded = o.support == truth.destination &&
                        world::disk_inside(env_.surface(truth.destination).region, o.pose.position(), o.radius);
        return finish(out.succeeded ? "" : "placed on the wrong surface");
    }

private:
    Environment& env_;
    AgentConfig cfg_;
    NavGrid grid_;
};

}  // namespace fcog::agent
