#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcog/agent/planner.hpp"
#include "fcog/instruction/semantics.hpp"

namespace fcog::agent {

using instruction::AttributeSet;
using instruction::InstructionAst;
using instruction::RelationKind;
using instruction::RelationThresholds;
using instruction::Vocabulary;
using world::Capture;
using world::CameraPose;
using world::EntityKind;
using world::EntityRef;
using world::Snapshot;

// Crawling

struct CrawlConfig {
    double spacing_m = 1.0;
    std::vector<double> headings{0.0, kPi / 2, -kPi, -kPi / 2};
};

/// Lattice points strictly inside the room, rows by ascending y, each row
/// walked in alternating x direction.
inline std::vector<Vec2> crawl_lattice(const world::RoomSpec& room, double spacing) {
    std::vector<double> xs, ys;
    for (double x = room.bounds.min.x + spacing; x < room.bounds.max.x - 1e-9; x += spacing) xs.push_back(x);
    for (double y = room.bounds.min.y + spacing; y < room.bounds.max.y - 1e-9; y += spacing) ys.push_back(y);
    std::vector<Vec2> pts;
    for (std::size_t j = 0; j < ys.size(); ++j)
        for (std::size_t i = 0; i < xs.size(); ++i) pts.push_back({j % 2 == 0 ? xs[i] : xs[xs.size() - 1 - i], ys[j]});
    return pts;
}

/// Lattice points the robot can stand on and reach from `from`.
inline std::vector<Vec2> crawl_points(const Environment& env, const NavGrid& grid, RoomId room, Vec2 from,
                                      const CrawlConfig& cfg = {}) {
    const int comp = grid.component_at(env, from);
    std::vector<Vec2> out;
    for (Vec2 p : crawl_lattice(env.room(room), cfg.spacing_m)) {
        const auto k = grid.cell_of(p);
        if (!k || !grid.free(*k) || grid.component(*k) != comp) continue;
        out.push_back(p);
    }
    return out;
}

/// Camera poses in visit order. With no usable lattice point the robot looks
/// around from where it stands.
inline std::vector<CameraPose> crawl_viewpoints(const Environment& env, const NavGrid& grid, RoomId room, Vec2 from,
                                                const CrawlConfig& cfg = {}) {
    std::vector<CameraPose> out;
    std::vector<Vec2> pts = crawl_points(env, grid, room, from, cfg);
    if (pts.empty()) pts.push_back(from);
    for (Vec2 p : pts)
        for (double h : cfg.headings) out.push_back({{p.x, p.y, h}});
    return out;
}

// Detection

struct NoiseConfig {
    double p_miss = 0.0;
    double p_attr = 0.0;
    double p_hallucinate = 0.0;

    void validate() const {
        for (double p : {p_miss, p_attr, p_hallucinate})
            if (!(p >= 0.0 && p <= 1.0)) throw Error("noise probabilities must lie in [0, 1]");
    }
    bool operator==(const NoiseConfig&) const = default;
};

/// Ids of hallucinated detections start here.
inline constexpr std::uint32_t kHallucinationBase = 1u << 30;

struct Detection {
    EntityRef entity;  // ground truth, for scoring only
    std::string category;
    std::optional<std::string> color;
    std::optional<std::string> material;
    double bearing = 0.0;
    double range = 0.0;
    std::optional<SurfaceId> support;
    std::size_t capture = 0;
};

namespace detail {

/// Uniform replacement among the vocabulary plus "absent", excluding `current`.
inline std::optional<std::string> corrupt(const std::optional<std::string>& current,
                                          const std::vector<std::string>& vocab, double u) {
    std::vector<std::optional<std::string>> options{std::nullopt};
    for (const std::string& v : vocab) options.emplace_back(v);
    std::erase(options, current);
    const auto k = std::min(options.size() - 1, static_cast<std::size_t>(u * static_cast<double>(options.size())));
    return options[k];
}

}  // namespace detail

/// Noisy detector over one capture. Every snapshot consumes the same five
/// draws whatever the noise levels, so runs that differ only in noise share
/// their random numbers.
inline std::vector<Detection> detect(const Capture& cap, std::size_t capture_index, const NoiseConfig& noise, Rng& rng,
                                     const Vocabulary& vocab = Vocabulary::builtin()) {
    std::vector<Detection> out;
    for (const Snapshot& s : cap.snapshots) {
        const double u_miss = rng.uniform(), u_color = rng.uniform(), pick_color = rng.uniform();
        const double u_material = rng.uniform(), pick_material = rng.uniform();
        if (u_miss < noise.p_miss) continue;
        Detection d{s.entity, s.category, s.color, s.material, s.bearing, s.range, s.support, capture_index};
        if (s.entity.kind == EntityKind::Dynamic) {
            if (u_color < noise.p_attr) d.color = detail::corrupt(d.color, vocab.colors, pick_color);
            if (u_material < noise.p_attr) d.material = detail::corrupt(d.material, vocab.materials, pick_material);
        }
        out.push_back(std::move(d));
    }
    const double u_h = rng.uniform();
    const double h_cat = rng.uniform(), h_color = rng.uniform(), h_mat = rng.uniform();
    const double h_bearing = rng.uniform(), h_range = rng.uniform();
    if (u_h < noise.p_hallucinate) {
        Detection d;
        d.entity = EntityRef::object(ObjectId{kHallucinationBase + static_cast<std::uint32_t>(capture_index)});
        d.category = vocab.objects[std::min(vocab.objects.size() - 1, static_cast<std::size_t>(h_cat * vocab.objects.size()))];
        d.color = detail::corrupt(std::nullopt, vocab.colors, h_color);
        d.material = detail::corrupt(std::nullopt, vocab.materials, h_mat);
        d.bearing = (h_bearing - 0.5) * cap.camera.fov;
        d.range = 0.3 + h_range * (cap.camera.range - 0.3);
        d.capture = capture_index;
        out.push_back(std::move(d));
    }
    return out;
}

/// Detections for a crawl; capture i draws from its own stream.
inline std::vector<std::vector<Detection>> detect_all(std::span<const Capture> captures, const NoiseConfig& noise,
                                                      std::uint64_t seed,
                                                      const Vocabulary& vocab = Vocabulary::builtin()) {
    std::vector<std::vector<Detection>> out;
    for (std::size_t i = 0; i < captures.size(); ++i) {
        Rng rng(seed, "detect", i);
        out.push_back(detect(captures[i], i, noise, rng, vocab));
    }
    return out;
}

inline std::vector<std::vector<Detection>> perfect_detections(std::span<const Capture> captures) {
    return detect_all(captures, NoiseConfig{}, 0);
}

// Grounding

enum class GrounderKind { Relational, KeywordBaseline, Oracle };

inline std::string_view to_string(GrounderKind k) {
    switch (k) {
        case GrounderKind::Relational: return "relational";
        case GrounderKind::KeywordBaseline: return "keyword-baseline";
        case GrounderKind::Oracle: return "oracle";
    }
    return "?";
}

inline std::optional<GrounderKind> grounder_from_string(std::string_view s) {
    for (GrounderKind k : {GrounderKind::Relational, GrounderKind::KeywordBaseline, GrounderKind::Oracle})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

struct GroundingWeights {
    double attribute = 1.0;
    double relation = 2.0;
    bool operator==(const GroundingWeights&) const = default;
};

struct CandidateScore {
    EntityRef entity;
    double score = 0.0;
    std::size_t capture = 0;
};

struct GroundingResult {
    GrounderKind kind = GrounderKind::Relational;
    std::optional<ObjectId> target;
    std::optional<SurfaceId> destination;
    std::optional<std::size_t> target_capture;
    std::optional<std::size_t> destination_capture;
    std::vector<CandidateScore> target_scores;
    std::vector<CandidateScore> destination_scores;
    double target_threshold = 0.0;
    double destination_threshold = 0.0;
};

struct GroundTruth {
    ObjectId target;
    SurfaceId destination;
};

using DetectionSet = std::vector<std::vector<Detection>>;

namespace detail {

inline double attribute_score(const AttributeSet& a, const Detection& d, double w) {
    double s = w;  // category, already gated
    if (a.color && a.color == d.color) s += w;
    if (a.material && a.material == d.material) s += w;
    return s;
}

/// Best score per entity over all captures; the capture of the first best
/// score is kept. Sorted by descending score, then entity.
template <class Score>
std::vector<CandidateScore> best_per_entity(const DetectionSet& dets, Score&& score) {
    std::map<EntityRef, CandidateScore> best;
    for (const auto& cap : dets)
        for (const Detection& d : cap) {
            const auto s = score(d, cap);
            if (!s) continue;
            auto it = best.find(d.entity);
            if (it == best.end()) best.emplace(d.entity, CandidateScore{d.entity, *s, d.capture});
            else if (*s > it->second.score) it->second = {d.entity, *s, d.capture};
        }
    std::vector<CandidateScore> out;
    for (auto& [e, c] : best) out.push_back(c);
    std::stable_sort(out.begin(), out.end(), [](const CandidateScore& a, const CandidateScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.entity < b.entity;
    });
    return out;
}

inline std::optional<std::size_t> first_capture_with(const DetectionSet& dets, EntityRef e) {
    for (const auto& cap : dets)
        for (const Detection& d : cap)
            if (d.entity == e) return d.capture;
    return std::nullopt;
}

}  // namespace detail

/// Score threshold a target candidate must reach under the relational grounder.
inline double target_threshold(const instruction::ManipClause& m, const GroundingWeights& w) {
    return w.attribute * m.target.size() + (m.relation ? 1.0 : 0.0) + (m.source ? 1.0 : 0.0);
}

inline std::vector<CandidateScore> score_targets(const instruction::ManipClause& m, const DetectionSet& dets,
                                                 const RelationThresholds& t, const GroundingWeights& w) {
    return detail::best_per_entity(dets, [&](const Detection& d, const std::vector<Detection>& cap)
                                             -> std::optional<double> {
        if (d.entity.kind != EntityKind::Dynamic || d.category != m.target.category) return std::nullopt;
        double s = detail::attribute_score(m.target, d, w.attribute);
        auto related = [&](RelationKind kind, const AttributeSet& landmark) {
            for (const Detection& l : cap)
                if (l.entity != d.entity && instruction::matches(landmark, l) &&
                    instruction::relation_holds(kind, d, l, t))
                    return true;
            return false;
        };
        if (m.relation && related(m.relation->kind, m.relation->landmark)) s += w.relation;
        if (m.source && related(RelationKind::On, *m.source)) s += w.relation;
        return s;
    });
}

inline std::vector<CandidateScore> score_destinations(const instruction::ManipClause& m, const DetectionSet& dets,
                                                      const GroundingWeights& w) {
    return detail::best_per_entity(dets, [&](const Detection& d, const std::vector<Detection>&)
                                             -> std::optional<double> {
        if (d.entity.kind != EntityKind::Surface || d.category != m.destination.category) return std::nullopt;
        return detail::attribute_score(m.destination, d, w.attribute);
    });
}

/// Resolves the instruction against crawl detections. Missing ids mean the
/// grounder abstained.
inline GroundingResult ground(const InstructionAst& instr, const DetectionSet& dets, GrounderKind kind,
                              const std::optional<GroundTruth>& truth = {}, const RelationThresholds& t = {},
                              const GroundingWeights& w = {}) {
    GroundingResult r;
    r.kind = kind;
    const instruction::ManipClause& m = instr.manip;
    switch (kind) {
        case GrounderKind::Oracle: {
            if (!truth) throw Error("oracle grounding needs ground truth");
            r.target = truth->target;
            r.destination = truth->destination;
            r.target_capture = detail::first_capture_with(dets, EntityRef::object(truth->target));
            r.destination_capture = detail::first_capture_with(dets, EntityRef::surface(truth->destination));
            break;
        }
        case GrounderKind::KeywordBaseline: {
            auto keyword = [&](EntityKind k, const std::string& cat) {
                return detail::best_per_entity(dets, [&](const Detection& d, const std::vector<Detection>&)
                                                         -> std::optional<double> {
                    if (d.entity.kind != k || d.category != cat) return std::nullopt;
                    return 1.0;
                });
            };
            r.target_scores = keyword(EntityKind::Dynamic, m.target.category);
            r.destination_scores = keyword(EntityKind::Surface, m.destination.category);
            r.target_threshold = r.destination_threshold = 1.0;
            if (r.target_scores.size() == 1) {
                r.target = r.target_scores[0].entity.object_id();
                r.target_capture = r.target_scores[0].capture;
            }
            if (r.destination_scores.size() == 1) {
                r.destination = r.destination_scores[0].entity.surface_id();
                r.destination_capture = r.destination_scores[0].capture;
            }
            break;
        }
        case GrounderKind::Relational: {
            r.target_scores = score_targets(m, dets, t, w);
            r.destination_scores = score_destinations(m, dets, w);
            r.target_threshold = target_threshold(m, w);
            r.destination_threshold = w.attribute * m.destination.size();
            if (!r.target_scores.empty() && r.target_scores[0].score >= r.target_threshold) {
                r.target = r.target_scores[0].entity.object_id();
                r.target_capture = r.target_scores[0].capture;
            }
            if (!r.destination_scores.empty() && r.destination_scores[0].score >= r.destination_threshold) {
                r.destination = r.destination_scores[0].entity.surface_id();
                r.destination_capture = r.destination_scores[0].capture;
            }
            break;
        }
    }
    return r;
}

}  // namespace fcog::agent
