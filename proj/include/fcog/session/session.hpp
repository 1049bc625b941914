#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fcog/agent/executor.hpp"
#include "fcog/session/config.hpp"

namespace fcog::session {

using agent::SubtaskOutcome;

enum class Subtask { Navigation = 0, OLR = 1, Fetching = 2, Carrying = 3 };

inline constexpr std::array<Subtask, 4> kSubtasks{Subtask::Navigation, Subtask::OLR, Subtask::Fetching,
                                                  Subtask::Carrying};

inline std::string_view to_string(Subtask s) {
    switch (s) {
        case Subtask::Navigation: return "Navigation";
        case Subtask::OLR: return "OLR";
        case Subtask::Fetching: return "Fetching";
        case Subtask::Carrying: return "Carrying";
    }
    return "?";
}

inline std::optional<Subtask> subtask_from_string(std::string_view s) {
    for (Subtask t : kSubtasks)
        if (to_string(t) == s) return t;
    return std::nullopt;
}

struct TerminationReason {
    enum class Kind { TimeElapsed, TaskCompleted, SubtaskFailed };
    Kind kind = Kind::TimeElapsed;
    std::optional<Subtask> subtask;  // set for SubtaskFailed

    bool operator==(const TerminationReason&) const = default;

    std::string str() const {
        switch (kind) {
            case Kind::TimeElapsed: return "TimeElapsed";
            case Kind::TaskCompleted: return "TaskCompleted";
            case Kind::SubtaskFailed: return "SubtaskFailed(" + std::string(to_string(*subtask)) + ")";
        }
        return "?";
    }

    static std::optional<TerminationReason> parse(std::string_view s) {
        if (s == "TimeElapsed") return TerminationReason{Kind::TimeElapsed, {}};
        if (s == "TaskCompleted") return TerminationReason{Kind::TaskCompleted, {}};
        const std::string_view pre = "SubtaskFailed(";
        if (s.starts_with(pre) && s.ends_with(")"))
            if (auto t = subtask_from_string(s.substr(pre.size(), s.size() - pre.size() - 1)))
                return TerminationReason{Kind::SubtaskFailed, t};
        return std::nullopt;
    }
};

/// What the evaluator looks at when deciding whether a session is over.
struct SessionState {
    double clock_s = 0.0;
    double budget_s = 300.0;
    /// Outcomes of the subtasks that have finished.
    std::array<std::optional<SubtaskOutcome>, 4> finished;
};

/// Highest-priority applicable reason: TaskCompleted, then SubtaskFailed, then
/// TimeElapsed. A subtask cut short by the deadline counts as TimeElapsed.
inline std::optional<TerminationReason> check_termination(const SessionState& s) {
    using K = TerminationReason::Kind;
    const auto& carry = s.finished[static_cast<int>(Subtask::Carrying)];
    if (carry && carry->succeeded) return TerminationReason{K::TaskCompleted, {}};
    bool timed_out = false;
    for (Subtask t : kSubtasks) {
        const auto& o = s.finished[static_cast<int>(t)];
        if (!o || o->succeeded) continue;
        if (o->timed_out) timed_out = true;
        else return TerminationReason{K::SubtaskFailed, t};
    }
    if (timed_out || s.clock_s >= s.budget_s) return TerminationReason{K::TimeElapsed, {}};
    return std::nullopt;
}

struct TaskSummary {
    std::uint32_t target = 0;
    std::uint32_t destination = 0;
    std::string room;
    std::string instruction;
    int attempt = 0;
    bool operator==(const TaskSummary&) const = default;
};

struct SessionRecord {
    std::uint64_t seed = 0;
    std::string label;
    Json config;
    TaskSummary task;
    std::array<SubtaskOutcome, 4> outcomes;
    /// The grounder returned no target or no destination.
    bool olr_abstained = false;
    TerminationReason termination;
    double duration_s = 0.0;
    int paths = 0;
    double min_path_clearance_m = std::numeric_limits<double>::infinity();
    /// Same, for the trajectories actually driven.
    double min_motion_clearance_m = std::numeric_limits<double>::infinity();
    std::vector<Json> events;

    const SubtaskOutcome& outcome(Subtask s) const { return outcomes[static_cast<int>(s)]; }
};

// Record encoding

inline Json outcome_json(const SubtaskOutcome& o) {
    return {{"attempted", o.attempted}, {"succeeded", o.succeeded}, {"time_s", o.time_s},
            {"timed_out", o.timed_out}, {"detail", o.detail}};
}

inline SubtaskOutcome outcome_from(const Json& j) {
    return {j.at("attempted").get<bool>(), j.at("succeeded").get<bool>(), j.at("time_s").get<double>(),
            j.at("timed_out").get<bool>(), j.at("detail").get<std::string>()};
}

/// The record without its events.
inline Json record_json(const SessionRecord& r) {
    Json outcomes = Json::object();
    for (Subtask t : kSubtasks) outcomes[std::string(to_string(t))] = outcome_json(r.outcome(t));
    return {{"seed", r.seed},
            {"label", r.label},
            {"task",
             {{"target", r.task.target},
              {"destination", r.task.destination},
              {"room", r.task.room},
              {"instruction", r.task.instruction},
              {"attempt", r.task.attempt}}},
            {"outcomes", std::move(outcomes)},
            {"olr_abstained", r.olr_abstained},
            {"termination", r.termination.str()},
            {"duration_s", r.duration_s},
            {"paths", r.paths},
            {"min_path_clearance_m", r.paths ? Json(r.min_path_clearance_m) : Json(nullptr)},
            {"min_motion_clearance_m", r.paths ? Json(r.min_motion_clearance_m) : Json(nullptr)}};
}

inline SessionRecord record_from(const Json& j) {
    SessionRecord r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.label = j.at("label").get<std::string>();
    const Json& t = j.at("task");
    r.task = {t.at("target").get<std::uint32_t>(), t.at("destination").get<std::uint32_t>(),
              t.at("room").get<std::string>(), t.at("instruction").get<std::string>(), t.at("attempt").get<int>()};
    for (Subtask s : kSubtasks) r.outcomes[static_cast<int>(s)] = outcome_from(j.at("outcomes").at(std::string(to_string(s))));
    r.olr_abstained = j.at("olr_abstained").get<bool>();
    const auto term = TerminationReason::parse(j.at("termination").get<std::string>());
    if (!term) throw Error("bad termination reason");
    r.termination = *term;
    r.duration_s = j.at("duration_s").get<double>();
    r.paths = j.at("paths").get<int>();
    if (!j.at("min_path_clearance_m").is_null()) r.min_path_clearance_m = j.at("min_path_clearance_m").get<double>();
    if (!j.at("min_motion_clearance_m").is_null())
        r.min_motion_clearance_m = j.at("min_motion_clearance_m").get<double>();
    return r;
}

namespace detail {

inline Json path_json(const agent::Path& p) {
    Json pts = Json::array();
    for (const world::Vec2& v : p.waypoints) pts.push_back(Json::array({v.x, v.y}));
    return pts;
}

inline Json detection_json(const agent::Detection& d) {
    return {{"entity", world::entity_json(d.entity)},
            {"category", d.category},
            {"color", world::optional_json(d.color)},
            {"material", world::optional_json(d.material)},
            {"bearing_rad", d.bearing},
            {"range_m", d.range}};
}

inline Json optional_id(const auto& id) { return id ? Json(id->value) : Json(nullptr); }
inline Json optional_index(const std::optional<std::size_t>& i) { return i ? Json(*i) : Json(nullptr); }

}  // namespace detail

/// Generates a task for `seed`, runs the four gated subtasks and evaluates
/// them. The environment lives only for this call.
inline SessionRecord run_session(std::uint64_t seed, const SessionConfig& cfg, const agent::AgentConfig& acfg = {}) {
    SessionRecord rec;
    rec.seed = seed;
    rec.label = cfg.method_label();
    rec.config = session_config_json(cfg);
    auto emit = [&](std::string_view kind, Json body) {
        Json e{{"event", kind}};
        for (auto& [k, v] : body.items()) e[k] = v;
        rec.events.push_back(std::move(e));
    };
    emit("session_start", {{"seed", seed}, {"config", rec.config}});

    taskgen::GenConfig gen = cfg.gen;
    gen.seed = seed;
    taskgen::GeneratedTask g = taskgen::generate_task(gen, acfg);
    world::Environment& env = g.env;
    const taskgen::TaskSpec& task = g.task;
    emit("scene_built", {{"scene", world::to_json(env)}});
    emit("task", {{"task", taskgen::task_json(task)}});
    rec.task = {task.target.value, task.destination.value, task.instruction.ast.go.room, task.instruction.text,
                task.attempt};

    const double deadline = cfg.time_budget_s;
    SessionState state{env.clock_s, cfg.time_budget_s, {}};
    agent::Agent robot(env, acfg);
    Subtask current = Subtask::Navigation;
    robot.on_path = [&](const agent::Path& p) {
        const double c = agent::sampled_clearance(env, p);
        rec.min_path_clearance_m = std::min(rec.min_path_clearance_m, c);
        ++rec.paths;
        emit("path", {{"subtask", to_string(current)},
                      {"waypoints", detail::path_json(p)},
                      {"length_m", p.length_m},
                      {"min_clearance_m", c}});
    };
    robot.on_motion = [&](const agent::FollowResult& f) {
        rec.min_motion_clearance_m = std::min(rec.min_motion_clearance_m, f.min_clearance_m);
        emit("motion", {{"subtask", to_string(current)},
                        {"status", agent::to_string(f.status)},
                        {"collisions", f.collisions},
                        {"min_clearance_m", f.min_clearance_m},
                        {"clock_s", env.clock_s}});
    };
    auto start = [&](Subtask s) {
        current = s;
        emit("subtask_start", {{"subtask", to_string(s)}, {"clock_s", env.clock_s}});
    };
    auto finish = [&](Subtask s, SubtaskOutcome o) {
        emit("subtask_end", {{"subtask", to_string(s)}, {"outcome", outcome_json(o)}, {"clock_s", env.clock_s}});
        rec.outcomes[static_cast<int>(s)] = o;
        state.finished[static_cast<int>(s)] = std::move(o);
        state.clock_s = env.clock_s;
        return check_termination(state);
    };

    std::optional<TerminationReason> term = check_termination(state);
    const auto room = *env.find_room(task.instruction.ast.go.room);
    if (!term) {
        start(Subtask::Navigation);
        term = finish(Subtask::Navigation, robot.navigate_to_room(room, deadline));
    }
    std::vector<world::Capture> captures;
    agent::GroundingResult grounding;
    if (!term) {
        start(Subtask::OLR);
        const double t0 = env.clock_s;
        auto crawl = robot.crawl(room, deadline);
        captures = std::move(crawl.captures);
        SubtaskOutcome o;
        o.attempted = true;
        if (crawl.timed_out) {
            o.timed_out = true;
            o.detail = "deadline during crawl";
        } else {
            const auto dets = agent::detect_all(captures, cfg.noise, stream_seed(seed, "perception"));
            for (std::size_t i = 0; i < dets.size(); ++i) {
                Json items = Json::array();
                for (const auto& d : dets[i]) items.push_back(detail::detection_json(d));
                emit("detections", {{"capture", i}, {"camera", world::camera_json(captures[i].camera)},
                                    {"items", std::move(items)}});
            }
            grounding = agent::ground(task.instruction.ast, dets, cfg.grounder,
                                      agent::GroundTruth{task.target, task.destination}, cfg.gen.relations,
                                      cfg.gen.weights);
            rec.olr_abstained = !grounding.target || !grounding.destination;
            o.succeeded = grounding.target == task.target && grounding.destination == task.destination;
            if (!o.succeeded) o.detail = rec.olr_abstained ? "abstained" : "wrong grounding";
            emit("grounding", {{"grounder", agent::to_string(grounding.kind)},
                               {"target", detail::optional_id(grounding.target)},
                               {"destination", detail::optional_id(grounding.destination)},
                               {"target_capture", detail::optional_index(grounding.target_capture)},
                               {"destination_capture", detail::optional_index(grounding.destination_capture)},
                               {"target_threshold", grounding.target_threshold},
                               {"destination_threshold", grounding.destination_threshold},
                               {"target_candidates", grounding.target_scores.size()},
                               {"destination_candidates", grounding.destination_scores.size()},
                               {"correct", o.succeeded}});
        }
        o.time_s = env.clock_s - t0;
        term = finish(Subtask::OLR, std::move(o));
    }
    if (!term) {
        start(Subtask::Fetching);
        term = finish(Subtask::Fetching, robot.fetch(grounding, task.target, captures, deadline));
    }
    if (!term) {
        start(Subtask::Carrying);
        term = finish(Subtask::Carrying,
                      robot.carry(grounding, {task.target, task.destination}, captures, deadline));
    }
    if (!term) throw Error("session ended without a termination reason");
    rec.termination = *term;
    rec.duration_s = env.clock_s;
    emit("termination", {{"reason", rec.termination.str()}, {"clock_s", env.clock_s}});
    emit("session_end", {{"record", record_json(rec)}});
    return rec;
}

// Episode logs

inline std::string log_file_name(std::uint64_t seed) {
    std::string s = std::to_string(seed);
    return "session-" + std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s + ".ndjson";
}

inline std::string log_text(const SessionRecord& r) {
    std::string out;
    for (const Json& e : r.events) out += e.dump() + "\n";
    return out;
}

inline void write_log(const SessionRecord& r, const std::filesystem::path& path) {
    taskgen::write_text(path, log_text(r));
}

}  // namespace fcog::session
