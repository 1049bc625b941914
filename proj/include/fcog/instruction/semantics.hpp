#pragma once

#include <cmath>
#include <concepts>
#include <optional>
#include <span>
#include <vector>

#include "fcog/instruction/ast.hpp"
#include "fcog/world/environment.hpp"

namespace fcog::instruction {

using world::EntityKind;
using world::EntityRef;
using world::Snapshot;

struct RelationThresholds {
    double near_m = 1.0;
    double lateral_m = 0.5;
    double bearing_rad = 0.1;
    double depth_band_m = 0.5;
};

/// Anything observed from a camera: snapshots and detections.
template <class T>
concept Observation = requires(const T& t) {
    { t.entity } -> std::convertible_to<EntityRef>;
    { t.category } -> std::convertible_to<std::string>;
    { t.color } -> std::convertible_to<std::optional<std::string>>;
    { t.material } -> std::convertible_to<std::optional<std::string>>;
    { t.bearing } -> std::convertible_to<double>;
    { t.range } -> std::convertible_to<double>;
    { t.support } -> std::convertible_to<std::optional<SurfaceId>>;
};

/// Distance between two observations from the same camera.
template <Observation A, Observation B>
double world_distance(const A& a, const B& b) {
    const double d2 = a.range * a.range + b.range * b.range - 2.0 * a.range * b.range * std::cos(a.bearing - b.bearing);
    return std::sqrt(std::max(d2, 0.0));
}

template <Observation A, Observation B>
bool relation_holds(RelationKind kind, const A& subject, const B& landmark, const RelationThresholds& t = {}) {
    switch (kind) {
        case RelationKind::On:
            return landmark.entity.kind == EntityKind::Surface && subject.support &&
                   *subject.support == landmark.entity.surface_id();
        case RelationKind::Near:
            return world_distance(subject, landmark) <= t.near_m;
        case RelationKind::InFrontOf:
            return subject.range < landmark.range &&
                   std::abs(subject.range * std::sin(subject.bearing - landmark.bearing)) <= t.lateral_m;
        case RelationKind::LeftOf:
            return subject.bearing - landmark.bearing >= t.bearing_rad &&
                   std::abs(subject.range - landmark.range) <= t.depth_band_m;
        case RelationKind::RightOf:
            return landmark.bearing - subject.bearing >= t.bearing_rad &&
                   std::abs(subject.range - landmark.range) <= t.depth_band_m;
    }
    return false;
}

template <Observation O>
bool matches(const AttributeSet& a, const O& o) {
    return a.category == o.category && (!a.color || a.color == o.color) && (!a.material || a.material == o.material);
}

/// Attribute subsets of an observation in escalation order:
/// category, +color, +material, +color+material (skipping absent attributes).
template <Observation O>
std::vector<AttributeSet> attribute_escalation(const O& o) {
    std::vector<AttributeSet> out{{o.category, std::nullopt, std::nullopt}};
    if (o.color) out.push_back({o.category, o.color, std::nullopt});
    if (o.material) out.push_back({o.category, std::nullopt, o.material});
    if (o.color && o.material) out.push_back({o.category, o.color, o.material});
    return out;
}

/// Smallest attribute set that matches `entity` and nothing else in `context`.
inline std::optional<AttributeSet> minimal_attributes(EntityRef entity, std::span<const Snapshot> context) {
    const Snapshot* self = nullptr;
    for (const Snapshot& s : context)
        if (s.entity == entity) self = &s;
    if (!self) return std::nullopt;
    for (const AttributeSet& a : attribute_escalation(*self)) {
        int n = 0;
        for (const Snapshot& s : context) n += matches(a, s) ? 1 : 0;
        if (n == 1) return a;
    }
    return std::nullopt;
}

class NoDistinguishingDescription : public Error {
public:
    using Error::Error;
};

struct Descriptor {
    AttributeSet attributes;
    std::optional<SpatialRelation> relation;
    bool operator==(const Descriptor&) const = default;
};

/// Minimal referring expression for `target` among `context`: attributes
/// alone when they suffice, otherwise the smallest attribute set combined with
/// the first relation (in kRelationOrder, landmarks by ascending range) that
/// holds for the target and for no distractor sharing those attributes.
inline Descriptor distinguishing_descriptor(EntityRef target, std::span<const Snapshot> context,
                                            const RelationThresholds& t = {}) {
    const Snapshot* self = nullptr;
    for (const Snapshot& s : context)
        if (s.entity == target) self = &s;
    if (!self) throw NoDistinguishingDescription("target is not in the capture context");

    if (auto a = minimal_attributes(target, context)) return {*a, std::nullopt};

    for (const AttributeSet& attrs : attribute_escalation(*self)) {
        std::vector<const Snapshot*> distractors;
        for (const Snapshot& s : context)
            if (s.entity != target && matches(attrs, s)) distractors.push_back(&s);
        for (RelationKind kind : kRelationOrder) {
            for (const Snapshot& landmark : context) {
                if (landmark.entity == target) continue;
                if (kind == RelationKind::On && landmark.entity.kind != EntityKind::Surface) continue;
                if (!relation_holds(kind, *self, landmark, t)) continue;
                const auto lm = minimal_attributes(landmark.entity, context);
                if (!lm) continue;
                bool unique = true;
                for (const Snapshot* d : distractors)
                    if (d->entity != landmark.entity && relation_holds(kind, *d, landmark, t)) unique = false;
                if (unique) return {attrs, SpatialRelation{kind, *lm}};
            }
        }
    }
    throw NoDistinguishingDescription("no attribute set or relation singles out the target");
}

/// Descriptor using a "from the X" source phrase naming the target's support
/// instead of a relation.
struct SourceDescriptor {
    AttributeSet attributes;
    AttributeSet source;
};

inline SourceDescriptor source_descriptor(EntityRef target, std::span<const Snapshot> context) {
    const Snapshot* self = nullptr;
    for (const Snapshot& s : context)
        if (s.entity == target) self = &s;
    if (!self || !self->support) throw NoDistinguishingDescription("target has no visible support");
    const Snapshot* surface = nullptr;
    for (const Snapshot& s : context)
        if (s.entity == EntityRef::surface(*self->support)) surface = &s;
    if (!surface) throw NoDistinguishingDescription("target support is not in view");
    const auto src = minimal_attributes(surface->entity, context);
    if (!src) throw NoDistinguishingDescription("target support is ambiguous");
    for (const AttributeSet& attrs : attribute_escalation(*self)) {
        bool unique = true;
        for (const Snapshot& s : context)
            if (s.entity != target && matches(attrs, s) && relation_holds(RelationKind::On, s, *surface)) unique = false;
        if (unique) return {attrs, *src};
    }
    throw NoDistinguishingDescription("source phrase does not single out the target");
}

}  // namespace fcog::instruction
