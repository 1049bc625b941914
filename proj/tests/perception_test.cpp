#include <gtest/gtest.h>

#include "fcog/agent/perception.hpp"
#include "fcog/instruction/grammar.hpp"

using namespace fcog;
using namespace fcog::agent;

namespace {

Snapshot snap(std::uint32_t id, std::string cat, double range, double bearing, std::optional<std::string> color = {},
              std::optional<std::string> material = {}, std::optional<SurfaceId> support = SurfaceId{50}) {
    return {EntityRef::object(ObjectId{id}), std::move(cat), std::move(color), std::move(material), bearing, range,
            support};
}

Snapshot surf(std::uint32_t id, std::string cat, double range, double bearing) {
    return {EntityRef::surface(SurfaceId{id}), std::move(cat), std::nullopt, std::nullopt, bearing, range, std::nullopt};
}

Capture cap(std::vector<Snapshot> s) { return {CameraPose{{0, 0, 0}}, std::move(s), std::nullopt}; }

InstructionAst instr(std::string text) { return instruction::parse(text); }

std::vector<std::pair<EntityRef, std::optional<std::string>>> colors_of(const std::vector<Detection>& d) {
    std::vector<std::pair<EntityRef, std::optional<std::string>>> out;
    for (const Detection& x : d) out.emplace_back(x.entity, x.color);
    return out;
}

// Brute force: the score of every candidate computed straight from the rule.
double brute_score(const instruction::ManipClause& m, const Detection& d, const std::vector<Detection>& capture) {
    if (d.category != m.target.category) return -1;
    double s = 1 + (m.target.color && m.target.color == d.color) + (m.target.material && m.target.material == d.material);
    if (m.relation)
        for (const Detection& l : capture)
            if (l.entity != d.entity && instruction::matches(m.relation->landmark, l) &&
                instruction::relation_holds(m.relation->kind, d, l)) {
                s += 2;
                break;
            }
    return s;
}

}  // namespace

TEST(Detect, ZeroNoiseIsIdentity) {
    const Capture c = cap({snap(0, "mug", 1, 0, "red"), snap(1, "cup", 2, 0.3), surf(0, "table", 2.5, 0.1)});
    Rng rng(1);
    const auto d = detect(c, 3, NoiseConfig{}, rng);
    ASSERT_EQ(d.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(d[i].entity, c.snapshots[i].entity);
        EXPECT_EQ(d[i].category, c.snapshots[i].category);
        EXPECT_EQ(d[i].color, c.snapshots[i].color);
        EXPECT_EQ(d[i].material, c.snapshots[i].material);
        EXPECT_EQ(d[i].range, c.snapshots[i].range);
        EXPECT_EQ(d[i].capture, 3u);
    }
}

TEST(Detect, FullMissIsEmpty) {
    const Capture c = cap({snap(0, "mug", 1, 0), snap(1, "cup", 2, 0.3)});
    Rng rng(1);
    EXPECT_TRUE(detect(c, 0, {1.0, 0.0, 0.0}, rng).empty());
}

TEST(Detect, FullAttributeNoiseChangesEveryAttribute) {
    std::vector<Snapshot> s;
    for (std::uint32_t i = 0; i < 50; ++i)
        s.push_back(snap(i, "mug", 1, 0, i % 3 ? std::optional<std::string>("red") : std::nullopt,
                         i % 2 ? std::optional<std::string>("glass") : std::nullopt));
    const Capture c = cap(s);
    Rng rng(77);
    const auto d = detect(c, 0, {0.0, 1.0, 0.0}, rng);
    ASSERT_EQ(d.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_NE(d[i].color, s[i].color);
        EXPECT_NE(d[i].material, s[i].material);
        if (d[i].color) EXPECT_TRUE(Vocabulary::builtin().is_color(*d[i].color));
        if (d[i].material) EXPECT_TRUE(Vocabulary::builtin().is_material(*d[i].material));
    }
    // Replaying the stream reproduces the draws.
    Rng again(77);
    EXPECT_EQ(colors_of(detect(c, 0, {0.0, 1.0, 0.0}, again)), colors_of(d));
}

TEST(Detect, HigherMissRateKeepsASubset) {
    std::vector<Snapshot> s;
    for (std::uint32_t i = 0; i < 40; ++i) s.push_back(snap(i, "mug", 1 + 0.01 * i, 0));
    const std::vector<Capture> caps{cap(s), cap(s), cap(s)};
    for (double lo : {0.0, 0.2, 0.5})
        for (double hi : {0.2, 0.5, 0.8}) {
            if (hi <= lo) continue;
            const auto a = detect_all(caps, {lo, 0, 0}, 9);
            const auto b = detect_all(caps, {hi, 0, 0}, 9);
            for (std::size_t k = 0; k < caps.size(); ++k) {
                std::set<EntityRef> ea, eb;
                for (const auto& d : a[k]) ea.insert(d.entity);
                for (const auto& d : b[k]) eb.insert(d.entity);
                EXPECT_TRUE(std::includes(ea.begin(), ea.end(), eb.begin(), eb.end()));
            }
        }
}

TEST(Detect, Hallucination) {
    const Capture c = cap({snap(0, "mug", 1, 0)});
    Rng rng(5);
    const auto d = detect(c, 7, {0.0, 0.0, 1.0}, rng);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d[1].entity, EntityRef::object(ObjectId{kHallucinationBase + 7}));
    EXPECT_TRUE(Vocabulary::builtin().is_object(d[1].category));
    EXPECT_LE(std::abs(d[1].bearing), c.camera.fov / 2);
}

TEST(Noise, Validation) {
    EXPECT_NO_THROW((NoiseConfig{0.2, 0.1, 0.0}.validate()));
    EXPECT_THROW((NoiseConfig{1.2, 0.1, 0.0}.validate()), Error);
    EXPECT_THROW((NoiseConfig{0.0, -0.1, 0.0}.validate()), Error);
}

TEST(Ground, SingleFullMatch) {
    const std::vector<Capture> caps{
        cap({snap(0, "mug", 1, 0, "red", "ceramic", SurfaceId{0}), surf(0, "table", 1.2, 0.1)})};
    const auto dets = perfect_detections(caps);
    const auto ast = instr("Go to the kitchen, move the ceramic red mug onto the table.");
    for (GrounderKind k : {GrounderKind::Relational, GrounderKind::KeywordBaseline}) {
        const auto g = ground(ast, dets, k);
        EXPECT_EQ(g.target, ObjectId{0});
        EXPECT_EQ(g.destination, SurfaceId{0});
        EXPECT_EQ(g.target_capture, 0u);
    }
}

TEST(Ground, RelationPicksTheRightBottle) {
    const std::vector<Capture> caps{cap({snap(0, "bottle", 1.5, 0.0, "white"), snap(1, "bottle", 2.5, 0.6, "white"),
                                         snap(2, "toy car", 2.2, 0.05), surf(3, "table", 3.0, -0.3)})};
    const auto dets = perfect_detections(caps);
    const auto ast = instr("Go to the kitchen, move the bottle in front of the toy car onto the table.");
    const auto g = ground(ast, dets, GrounderKind::Relational);
    EXPECT_EQ(g.target, ObjectId{0});
    // Brute force over every candidate.
    double best = -1;
    EntityRef arg{};
    for (const Detection& d : dets[0]) {
        const double s = brute_score(ast.manip, d, dets[0]);
        if (s > best) best = s, arg = d.entity;
    }
    EXPECT_EQ(EntityRef::object(*g.target), arg);
    EXPECT_EQ(g.target_scores[0].score, best);
    EXPECT_EQ(g.target_threshold, 2.0);

    const auto b = ground(ast, dets, GrounderKind::KeywordBaseline);
    EXPECT_FALSE(b.target);
    EXPECT_EQ(b.destination, SurfaceId{3});
}

TEST(Ground, ThresholdRejectsPartialMatch) {
    const std::vector<Capture> caps{cap({snap(0, "bottle", 1.5, 0.0, "red"), surf(3, "table", 3.0, -0.3)})};
    const auto g = ground(instr("Go to the kitchen, move the white bottle onto the table."), perfect_detections(caps),
                          GrounderKind::Relational);
    EXPECT_FALSE(g.target);
    EXPECT_EQ(g.destination, SurfaceId{3});
}

TEST(Ground, SourcePhraseActsAsOnRelation) {
    const std::vector<Capture> caps{cap({snap(0, "bottle", 1.5, 0.0, {}, "plastic", SurfaceId{2}),
                                         snap(1, "bottle", 1.6, 0.2, {}, "plastic", SurfaceId{5}),
                                         surf(2, "shelf", 1.4, 0.1), surf(5, "table", 2.5, -0.4)})};
    const auto g = ground(instr("Go to the living room, move the plastic bottle from the shelf to the table."),
                          perfect_detections(caps), GrounderKind::Relational);
    EXPECT_EQ(g.target, ObjectId{0});
    EXPECT_EQ(g.destination, SurfaceId{5});
}

TEST(Ground, TiesGoToLowestId) {
    const std::vector<Capture> caps{cap({snap(4, "mug", 1.5, 0.0), snap(2, "mug", 1.6, 0.2), surf(5, "table", 2.5, -0.4)})};
    const auto g = ground(instr("Go to the kitchen, move the mug onto the table."), perfect_detections(caps),
                          GrounderKind::Relational);
    EXPECT_EQ(g.target, ObjectId{2});
}

TEST(Ground, BaselineAbstainsOnAnyAmbiguity) {
    Rng rng(13);
    const std::vector<std::string> cats{"mug", "cup", "bowl"};
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Capture> caps;
        for (int c = 0; c < 3; ++c) {
            std::vector<Snapshot> s;
            const std::size_t n = rng.below(4);
            for (std::size_t i = 0; i < n; ++i)
                s.push_back(snap(static_cast<std::uint32_t>(rng.below(6)), cats[0], rng.uniform(0.5, 3), 0));
            for (std::size_t i = 0; i < 2; ++i)
                s.push_back(snap(10 + static_cast<std::uint32_t>(i), cats[1 + rng.below(2)], 1, 0));
            s.push_back(surf(0, "table", 2, 0));
            caps.push_back(cap(s));
        }
        const auto dets = perfect_detections(caps);
        std::set<EntityRef> mugs;
        for (const auto& c : dets)
            for (const auto& d : c)
                if (d.category == "mug") mugs.insert(d.entity);
        const auto g = ground(instr("Go to the kitchen, move the mug onto the table."), dets,
                              GrounderKind::KeywordBaseline);
        EXPECT_EQ(g.target.has_value(), mugs.size() == 1);
    }
}

TEST(Ground, OracleUsesFirstCaptureSeeingTheTarget) {
    const std::vector<Capture> caps{cap({surf(1, "table", 2, 0)}), cap({snap(3, "mug", 1, 0)})};
    const auto g = ground(instr("Go to the kitchen, move the mug onto the table."), perfect_detections(caps),
                          GrounderKind::Oracle, GroundTruth{ObjectId{3}, SurfaceId{1}});
    EXPECT_EQ(g.target, ObjectId{3});
    EXPECT_EQ(g.target_capture, 1u);
    EXPECT_EQ(g.destination_capture, 0u);
}

TEST(Grounder, NamesRoundTrip) {
    for (GrounderKind k : {GrounderKind::Relational, GrounderKind::KeywordBaseline, GrounderKind::Oracle})
        EXPECT_EQ(grounder_from_string(to_string(k)), k);
    EXPECT_FALSE(grounder_from_string("neural"));
}
