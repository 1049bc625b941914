#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "fcog/core.hpp"

namespace fcog::world {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Wraps an angle into [-pi, pi).
inline double normalize_angle(double a) {
    if (a >= -kPi && a < kPi) return a;
    double r = std::fmod(a + kPi, 2.0 * kPi);
    if (r < 0.0) r += 2.0 * kPi;
    r -= kPi;
    // fmod can land exactly on +pi after the shift due to rounding.
    return r >= kPi ? -kPi : r;
}

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    constexpr Vec2 position() const { return {x, y}; }
    bool operator==(const Pose&) const = default;
};

inline Pose make_pose(Vec2 p, double theta) { return {p.x, p.y, normalize_angle(theta)}; }

/// Expresses a world point in the frame of `frame`.
inline Vec2 to_local(const Pose& frame, Vec2 p) {
    const Vec2 d = p - frame.position();
    const double c = std::cos(frame.theta), s = std::sin(frame.theta);
    return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

inline Vec2 to_world(const Pose& frame, Vec2 local) {
    const double c = std::cos(frame.theta), s = std::sin(frame.theta);
    return {frame.x + c * local.x - s * local.y, frame.y + s * local.x + c * local.y};
}

/// Axis-aligned box with half-open containment: [min.x, max.x) x [min.y, max.y).
struct Box {
    Vec2 min;
    Vec2 max;

    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    Vec2 center() const { return (min + max) * 0.5; }
    bool contains(Vec2 p) const { return p.x >= min.x && p.x < max.x && p.y >= min.y && p.y < max.y; }
    bool operator==(const Box&) const = default;
};

/// Oriented rectangle: center, half extents along its local axes, rotation.
struct Rect {
    Vec2 center;
    double half_w = 0.0;
    double half_h = 0.0;
    double theta = 0.0;

    Pose frame() const { return {center.x, center.y, theta}; }
    double area() const { return 4.0 * half_w * half_h; }
    bool operator==(const Rect&) const = default;

    std::array<Vec2, 4> corners() const {
        const Pose f = frame();
        return {to_world(f, {-half_w, -half_h}), to_world(f, {half_w, -half_h}),
                to_world(f, {half_w, half_h}), to_world(f, {-half_w, half_h})};
    }
};

inline Rect rect_from_box(const Box& b) {
    return {b.center(), b.width() / 2.0, b.height() / 2.0, 0.0};
}

/// Closed containment.
inline bool contains(const Rect& r, Vec2 p) {
    const Vec2 l = to_local(r.frame(), p);
    return std::abs(l.x) <= r.half_w && std::abs(l.y) <= r.half_h;
}

/// Euclidean distance from p to the rectangle; 0 when inside.
inline double distance(const Rect& r, Vec2 p) {
    const Vec2 l = to_local(r.frame(), p);
    const double dx = std::max(std::abs(l.x) - r.half_w, 0.0);
    const double dy = std::max(std::abs(l.y) - r.half_h, 0.0);
    return std::hypot(dx, dy);
}

inline bool disk_inside(const Rect& r, Vec2 c, double radius) {
    const Vec2 l = to_local(r.frame(), c);
    return std::abs(l.x) + radius <= r.half_w + 1e-12 && std::abs(l.y) + radius <= r.half_h + 1e-12;
}

/// Closest point on segment [a, b] to p.
inline Vec2 closest_on_segment(Vec2 a, Vec2 b, Vec2 p) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return a;
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return a + ab * t;
}

inline double distance_to_segment(Vec2 a, Vec2 b, Vec2 p) { return distance(p, closest_on_segment(a, b, p)); }

/// Liang-Barsky clip of segment [a, b] against the closed rectangle.
inline bool segment_intersects(const Rect& r, Vec2 a, Vec2 b) {
    const Pose f = r.frame();
    const Vec2 la = to_local(f, a);
    const Vec2 d = to_local(f, b) - la;
    double t0 = 0.0, t1 = 1.0;
    const std::array<double, 4> p{-d.x, d.x, -d.y, d.y};
    const std::array<double, 4> q{la.x + r.half_w, r.half_w - la.x, la.y + r.half_h, r.half_h - la.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
            continue;
        }
        const double t = q[i] / p[i];
        if (p[i] < 0.0) {
            t0 = std::max(t0, t);
        } else {
            t1 = std::min(t1, t);
        }
        if (t0 > t1) return false;
    }
    return true;
}

inline bool segment_intersects_disk(Vec2 a, Vec2 b, Vec2 c, double radius) {
    return distance_to_segment(a, b, c) <= radius;
}

/// Minimum distance between segment [a, b] and the rectangle (0 on contact).
inline double segment_distance(const Rect& r, Vec2 a, Vec2 b) {
    if (segment_intersects(r, a, b)) return 0.0;
    double best = std::min(distance(r, a), distance(r, b));
    for (const Vec2& c : r.corners()) best = std::min(best, distance_to_segment(a, b, c));
    return best;
}

}  // namespace fcog::world
