#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <string_view>
#include <tuple>
#include <vector>

#include "fcog/world/environment.hpp"

namespace fcog::agent {

using world::Box;
using world::Environment;
using world::Pose;
using world::Vec2;

struct PlannerConfig {
    double resolution_m = 0.05;
    /// Extra inflation beyond the robot radius for grid cells.
    double inflation_margin_m = 0.15;
    /// Clearance target for string-pulled segments; never below the robot radius.
    double segment_clearance_m = 0.35;
    /// How far an off-grid endpoint may be from its connecting free cell.
    double connect_radius_m = 1.0;
};

struct Path {
    std::vector<Vec2> waypoints;
    double length_m = 0.0;
};

class NoPath : public Error {
public:
    using Error::Error;
};

/// Occupancy grid over the layout with cells blocked where the static
/// clearance is below radius + margin, labelled by 8-connected component.
class NavGrid {
public:
    NavGrid(const Environment& env, const PlannerConfig& cfg = {}) : cfg_(cfg) {
        inflation_ = env.robot.radius + cfg.inflation_margin_m;
        Box extent = env.rooms.at(0).bounds;
        for (const world::RoomSpec& r : env.rooms) {
            extent.min.x = std::min(extent.min.x, r.bounds.min.x);
            extent.min.y = std::min(extent.min.y, r.bounds.min.y);
            extent.max.x = std::max(extent.max.x, r.bounds.max.x);
            extent.max.y = std::max(extent.max.y, r.bounds.max.y);
        }
        origin_ = extent.min;
        nx_ = static_cast<int>(std::ceil(extent.width() / cfg.resolution_m));
        ny_ = static_cast<int>(std::ceil(extent.height() / cfg.resolution_m));
        free_.assign(static_cast<std::size_t>(nx_) * ny_, 0);
        clearance_.assign(free_.size(), 0.0);
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i) {
                const int k = index(i, j);
                const Vec2 c = center(k);
                if (!world::point_in_room(c, env)) continue;
                clearance_[k] = world::static_clearance(env, c);
                free_[k] = clearance_[k] >= inflation_ ? 1 : 0;
            }
        label_components();
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int size() const { return nx_ * ny_; }
    double resolution() const { return cfg_.resolution_m; }
    double inflation() const { return inflation_; }
    const PlannerConfig& config() const { return cfg_; }

    int index(int i, int j) const { return j * nx_ + i; }
    int col(int k) const { return k % nx_; }
    int row(int k) const { return k / nx_; }

    Vec2 center(int k) const {
        return {origin_.x + (col(k) + 0.5) * cfg_.resolution_m, origin_.y + (row(k) + 0.5) * cfg_.resolution_m};
    }

    std::optional<int> cell_of(Vec2 p) const {
        const int i = static_cast<int>(std::floor((p.x - origin_.x) / cfg_.resolution_m));
        const int j = static_cast<int>(std::floor((p.y - origin_.y) / cfg_.resolution_m));
        if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return std::nullopt;
        return index(i, j);
    }

    bool free(int k) const { return free_[k] != 0; }
    int component(int k) const { return component_[k]; }

    /// Free cell that `p` connects to: its own cell when free, otherwise the
    /// nearest free cell (by distance, then index) joined to p by a segment
    /// with clearance at least the robot radius.
    std::optional<int> connect(const Environment& env, Vec2 p) const {
        if (auto k = cell_of(p); k && free(*k)) return k;
        const int reach = static_cast<int>(std::ceil(cfg_.connect_radius_m / cfg_.resolution_m));
        const auto base = cell_of(p);
        const int ci = base ? col(*base) : static_cast<int>(std::floor((p.x - origin_.x) / cfg_.resolution_m));
        const int cj = base ? row(*base) : static_cast<int>(std::floor((p.y - origin_.y) / cfg_.resolution_m));
        std::vector<std::pair<double, int>> cand;
        for (int j = std::max(0, cj - reach); j <= std::min(ny_ - 1, cj + reach); ++j)
            for (int i = std::max(0, ci - reach); i <= std::min(nx_ - 1, ci + reach); ++i) {
                const int k = index(i, j);
                const double d = world::distance(center(k), p);
                if (free(k) && d <= cfg_.connect_radius_m) cand.emplace_back(d, k);
            }
        std::sort(cand.begin(), cand.end());
        for (const auto& [d, k] : cand)
            if (world::segment_static_clearance(env, p, center(k)) >= env.robot.radius) return k;
        return std::nullopt;
    }

    /// Component reachable from p, or -1.
    int component_at(const Environment& env, Vec2 p) const {
        const auto k = connect(env, p);
        return k ? component_[*k] : -1;
    }

private:
    void label_components() {
        component_.assign(free_.size(), -1);
        int next = 0;
        std::vector<int> stack;
        for (int s = 0; s < size(); ++s) {
            if (!free(s) || component_[s] >= 0) continue;
            component_[s] = next;
            stack.push_back(s);
            while (!stack.empty()) {
                const int k = stack.back();
                stack.pop_back();
                for (int n : neighbours(k))
                    if (component_[n] < 0) {
                        component_[n] = next;
                        stack.push_back(n);
                    }
            }
            ++next;
        }
    }

public:
    /// Free 8-neighbours; diagonals only when both orthogonal cells are free.
    std::vector<int> neighbours(int k) const {
        std::vector<int> out;
        const int i = col(k), j = row(k);
        auto ok = [&](int a, int b) { return a >= 0 && b >= 0 && a < nx_ && b < ny_ && free(index(a, b)); };
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                if (di == 0 && dj == 0) continue;
                if (!ok(i + di, j + dj)) continue;
                if (di != 0 && dj != 0 && !(ok(i + di, j) && ok(i, j + dj))) continue;
                out.push_back(index(i + di, j + dj));
            }
        return out;
    }

private:
    PlannerConfig cfg_;
    double inflation_ = 0.0;
    Vec2 origin_;
    int nx_ = 0, ny_ = 0;
    std::vector<std::uint8_t> free_;
    std::vector<double> clearance_;
    std::vector<int> component_;
};

namespace detail {

inline std::vector<int> astar(const NavGrid& g, int start, int goal) {
    const double h_unit = g.resolution();
    auto octile = [&](int a, int b) {
        const double dx = std::abs(g.col(a) - g.col(b)), dy = std::abs(g.row(a) - g.row(b));
        return h_unit * (std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy));
    };
    using Key = std::tuple<double, double, int>;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> open;
    std::vector<double> cost(g.size(), std::numeric_limits<double>::infinity());
    std::vector<int> parent(g.size(), -1);
    std::vector<std::uint8_t> closed(g.size(), 0);
    cost[start] = 0.0;
    open.emplace(octile(start, goal), octile(start, goal), start);
    while (!open.empty()) {
        const auto [f, h, k] = open.top();
        open.pop();
        if (closed[k]) continue;
        closed[k] = 1;
        if (k == goal) break;
        for (int n : g.neighbours(k)) {
            if (closed[n]) continue;
            const bool diag = g.col(n) != g.col(k) && g.row(n) != g.row(k);
            const double c = cost[k] + h_unit * (diag ? std::sqrt(2.0) : 1.0);
            if (c < cost[n]) {
                cost[n] = c;
                parent[n] = k;
                const double hn = octile(n, goal);
                open.emplace(c + hn, hn, n);
            }
        }
    }
    if (!closed[goal]) return {};
    std::vector<int> cells;
    for (int k = goal; k != -1; k = parent[k]) cells.push_back(k);
    std::reverse(cells.begin(), cells.end());
    return cells;
}

}  // namespace detail

inline Path make_path(std::vector<Vec2> pts) {
    Path p;
    p.waypoints = std::move(pts);
    for (std::size_t i = 1; i < p.waypoints.size(); ++i)
        p.length_m += world::distance(p.waypoints[i - 1], p.waypoints[i]);
    return p;
}

/// Grid A* followed by greedy string-pulling. Every segment of the result
/// keeps at least the robot radius of static clearance.
inline Path plan_path(const Environment& env, const NavGrid& grid, Vec2 start, Vec2 goal) {
    if (world::distance(start, goal) < 1e-9) return make_path({start});
    const double radius = env.robot.radius;
    if (world::static_clearance(env, start) < radius) throw NoPath("start is in collision");
    if (world::static_clearance(env, goal) < radius) throw NoPath("goal is in collision");
    const auto s = grid.connect(env, start);
    const auto t = grid.connect(env, goal);
    if (!s) throw NoPath("start does not connect to free space");
    if (!t) throw NoPath("goal does not connect to free space");
    if (grid.component(*s) != grid.component(*t)) throw NoPath("goal is not reachable from start");

    const std::vector<int> cells = detail::astar(grid, *s, *t);
    if (cells.empty()) throw NoPath("search exhausted");

    std::vector<Vec2> raw{start};
    for (int k : cells) raw.push_back(grid.center(k));
    raw.push_back(goal);

    const double target = std::max(radius, grid.config().segment_clearance_m);
    auto threshold = [&](std::size_t i, std::size_t j) {
        double t = target;
        if (i == 0) t = std::min(t, world::static_clearance(env, start));
        if (j + 1 == raw.size()) t = std::min(t, world::static_clearance(env, goal));
        return std::max(t, radius);
    };

    std::vector<Vec2> out{raw.front()};
    std::size_t i = 0;
    while (i + 1 < raw.size()) {
        std::size_t next = i + 1;
        for (std::size_t j = raw.size() - 1; j > i + 1; --j)
            if (world::segment_static_clearance(env, raw[i], raw[j]) >= threshold(i, j)) {
                next = j;
                break;
            }
        if (world::distance(out.back(), raw[next]) > 1e-12) out.push_back(raw[next]);
        i = next;
    }
    return make_path(std::move(out));
}

inline Path plan_path(const Environment& env, Vec2 start, Vec2 goal) {
    const NavGrid grid(env);
    return plan_path(env, grid, start, goal);
}

/// Smallest static clearance at 1 cm samples along the path.
inline double sampled_clearance(const Environment& env, const Path& path, double step = 0.01) {
    double best = std::numeric_limits<double>::infinity();
    if (path.waypoints.size() == 1) return world::static_clearance(env, path.waypoints[0]);
    for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
        const Vec2 a = path.waypoints[i - 1], b = path.waypoints[i];
        const int n = std::max(1, static_cast<int>(std::ceil(world::distance(a, b) / step)));
        for (int k = 0; k <= n; ++k) best = std::min(best, world::static_clearance(env, a + (b - a) * (double(k) / n)));
    }
    return best;
}

/// A point well inside `room` near its first door, reachable by the robot.
inline Vec2 room_anchor(const Environment& env, const NavGrid& grid, RoomId room, double inset = 0.6) {
    const world::RoomSpec& r = env.room(room);
    auto usable = [&](Vec2 p) {
        const auto k = grid.cell_of(p);
        return k && grid.free(*k) && world::point_in_room(p, env) == room;
    };
    if (!r.doors.empty()) {
        const world::Door& d = r.doors.front();
        const Vec2 mid = (d.a + d.b) * 0.5;
        Vec2 n{0, 0};
        if (std::abs(d.a.x - d.b.x) < 1e-9) n = {std::abs(mid.x - r.bounds.min.x) < 1e-9 ? 1.0 : -1.0, 0.0};
        else n = {0.0, std::abs(mid.y - r.bounds.min.y) < 1e-9 ? 1.0 : -1.0};
        for (double t = inset; t < std::max(r.bounds.width(), r.bounds.height()); t += grid.resolution())
            if (const Vec2 p = mid + n * t; usable(p)) return p;
    }
    const Vec2 c = r.bounds.center();
    std::optional<std::pair<double, int>> best;
    for (int k = 0; k < grid.size(); ++k) {
        if (!grid.free(k) || world::point_in_room(grid.center(k), env) != room) continue;
        const std::pair<double, int> cand{world::distance(grid.center(k), c), k};
        if (!best || cand < *best) best = cand;
    }
    if (!best) throw NoPath("room " + r.name + " has no free space");
    return grid.center(best->second);
}

// Path following with a pure-pursuit unicycle controller.

struct ControllerConfig {
    double dt_s = 0.05;
    double lookahead_m = 0.3;
    /// Heading error above which the robot turns in place.
    double turn_in_place_rad = 0.2;
    int stuck_after = 40;
};

enum class FollowStatus { Reached, Deadline, Stuck };

inline std::string_view to_string(FollowStatus s) {
    switch (s) {
        case FollowStatus::Reached: return "reached";
        case FollowStatus::Deadline: return "deadline";
        case FollowStatus::Stuck: return "stuck";
    }
    return "?";
}

struct FollowResult {
    FollowStatus status = FollowStatus::Reached;
    int collisions = 0;
    /// Smallest static clearance of the driven trajectory, sampled every 1 cm.
    double min_clearance_m = std::numeric_limits<double>::infinity();
};

namespace detail {

/// Turns in place exactly to `heading`. Returns false on deadline.
inline bool rotate_to(Environment& env, double heading, double deadline, const ControllerConfig& c) {
    for (;;) {
        const double err = world::normalize_angle(heading - env.robot.pose.theta);
        if (std::abs(err) < 1e-9) return true;
        if (env.clock_s >= deadline) return false;
        world::step(env, {0.0, err / c.dt_s}, c.dt_s);
    }
}

}  // namespace detail

inline bool rotate_to(Environment& env, double heading, double deadline, const ControllerConfig& c = {}) {
    return detail::rotate_to(env, heading, deadline, c);
}

/// Drives along `path`, ending with an optional final heading. Each segment
/// starts with an in-place turn onto it; the last step lands exactly on the
/// waypoint.
inline FollowResult follow_path(Environment& env, const Path& path, double deadline,
                                std::optional<double> final_heading = {}, const ControllerConfig& c = {}) {
    FollowResult res;
    world::RobotState& robot = env.robot;
    res.min_clearance_m = world::static_clearance(env, robot.pose.position());
    auto out_of_time = [&] { return env.clock_s >= deadline; };
    auto drive = [&](world::Command cmd) {
        const Vec2 from = robot.pose.position();
        const world::StepResult sr = world::step(env, cmd, c.dt_s);
        const Vec2 to = robot.pose.position();
        const int n = static_cast<int>(std::ceil(world::distance(from, to) / 0.01));
        for (int i = 1; i <= n; ++i)
            res.min_clearance_m =
                std::min(res.min_clearance_m, world::static_clearance(env, from + (to - from) * (double(i) / n)));
        return sr;
    };
    auto stop = [&](FollowStatus st) {
        res.status = st;
        return res;
    };
    int consecutive = 0;
    for (std::size_t k = 1; k < path.waypoints.size(); ++k) {
        const Vec2 a = path.waypoints[k - 1], b = path.waypoints[k];
        const Vec2 seg = b - a;
        const double seg_len = world::norm(seg);
        if (seg_len < 1e-12) continue;
        const Vec2 dir = seg * (1.0 / seg_len);
        if (!detail::rotate_to(env, std::atan2(seg.y, seg.x), deadline, c)) return stop(FollowStatus::Deadline);
        for (;;) {
            const Vec2 p = robot.pose.position();
            const double remaining = world::distance(p, b);
            if (remaining < 1e-9) break;
            if (out_of_time()) return stop(FollowStatus::Deadline);
            world::StepResult sr;
            if (remaining <= robot.max_linear_speed * c.dt_s) {
                const double want = std::atan2(b.y - p.y, b.x - p.x);
                const double err = world::normalize_angle(want - robot.pose.theta);
                if (std::abs(err) > 1e-9) sr = drive({0.0, err / c.dt_s});
                else sr = drive({remaining / c.dt_s, 0.0});
            } else {
                const double along = std::clamp(world::dot(p - a, dir), 0.0, seg_len);
                const Vec2 look = a + dir * std::min(seg_len, along + c.lookahead_m);
                const Vec2 to_look = look - p;
                const double ld = world::norm(to_look);
                const double alpha = world::normalize_angle(std::atan2(to_look.y, to_look.x) - robot.pose.theta);
                if (std::abs(alpha) > c.turn_in_place_rad) {
                    sr = drive({0.0, alpha / c.dt_s});
                } else {
                    const double v = std::min(robot.max_linear_speed, remaining / c.dt_s);
                    const double w = ld > 1e-9 ? 2.0 * v * std::sin(alpha) / ld : 0.0;
                    sr = drive({v, w});
                }
            }
            if (sr.collided) {
                ++res.collisions;
                if (++consecutive >= c.stuck_after) return stop(FollowStatus::Stuck);
                if (out_of_time()) return stop(FollowStatus::Deadline);
                drive({0.0, robot.max_angular_speed * 0.5});
            } else {
                consecutive = 0;
            }
        }
    }
    if (final_heading && !detail::rotate_to(env, *final_heading, deadline, c)) return stop(FollowStatus::Deadline);
    return res;
}

}  // namespace fcog::agent
