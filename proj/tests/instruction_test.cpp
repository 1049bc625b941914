#include <gtest/gtest.h>

#include <chrono>
#include <fstream>
#include <sstream>

#include "ast_sampler.hpp"
#include "fcog/instruction/grammar.hpp"

using namespace fcog;
using namespace fcog::instruction;
using fcog::testing::random_ast;

namespace {

const Vocabulary& vocab() { return Vocabulary::builtin(); }

}  // namespace

TEST(Vocabulary, DataFileMatchesBuiltin) {
    std::ifstream f(std::string(FCOG_SOURCE_DIR) + "/data/vocabulary.txt");
    ASSERT_TRUE(f);
    std::ostringstream ss;
    ss << f.rdbuf();
    EXPECT_EQ(ss.str(), std::string(kBuiltinVocabulary));
}

TEST(Vocabulary, Sizes) {
    EXPECT_GE(vocab().objects.size(), 12u);
    EXPECT_EQ(vocab().colors.size(), 8u);
    EXPECT_EQ(vocab().materials.size(), 5u);
    EXPECT_EQ(vocab().furniture.size(), 6u);
    EXPECT_EQ(vocab().rooms.size(), 4u);
}

TEST(Vocabulary, RejectsUnknownSection) {
    EXPECT_THROW(Vocabulary::parse("[animals]\ncat\n"), Error);
    EXPECT_THROW(Vocabulary::parse("cat\n"), Error);
}

TEST(Realize, GotoClause) { EXPECT_EQ(realize(GotoClause{"bedroom"}), "Go to the bedroom"); }

TEST(Realize, RelationSentence) {
    InstructionAst ast;
    ast.go.room = "living room";
    ast.manip.target = {"toy car", std::nullopt, "wooden"};
    ast.manip.relation = SpatialRelation{RelationKind::InFrontOf, {"bottle", "white", std::nullopt}};
    ast.manip.destination = {"table", std::nullopt, std::nullopt};
    EXPECT_EQ(realize(ast), "Go to the living room, move the wooden toy car in front of the white bottle onto the table.");
}

TEST(Realize, SourceSentence) {
    InstructionAst ast;
    ast.go.room = "living room";
    ast.manip.target = {"bottle", std::nullopt, "plastic"};
    ast.manip.source = AttributeSet{"shelf", std::nullopt, std::nullopt};
    ast.manip.destination = {"table", std::nullopt, std::nullopt};
    ast.manip.prep = DestPreposition::To;
    EXPECT_EQ(realize(ast), "Go to the living room, move the plastic bottle from the shelf to the table.");
}

TEST(Realize, MaterialBeforeColor) {
    InstructionAst ast;
    ast.go.room = "kitchen";
    ast.manip.target = {"mug", "red", "ceramic"};
    ast.manip.destination = {"cabinet", std::nullopt, std::nullopt};
    EXPECT_EQ(realize(ast), "Go to the kitchen, move the ceramic red mug onto the cabinet.");
}

TEST(Parse, MinimalSentence) {
    const auto ast = parse("Go to the bedroom, move the mug onto the desk.");
    EXPECT_EQ(ast.go.room, "bedroom");
    EXPECT_EQ(ast.manip.target, (AttributeSet{"mug", std::nullopt, std::nullopt}));
    EXPECT_EQ(ast.manip.destination.category, "desk");
    EXPECT_EQ(ast.manip.prep, DestPreposition::Onto);
    EXPECT_FALSE(ast.manip.relation);
    EXPECT_FALSE(ast.manip.source);
}

TEST(Parse, IndefiniteArticleSentence) {
    const auto ast = parse("Go to the living room, move a plastic bottle from the shelf to the table.");
    EXPECT_EQ(ast.go.room, "living room");
    EXPECT_EQ(ast.manip.target, (AttributeSet{"bottle", std::nullopt, "plastic"}));
    ASSERT_TRUE(ast.manip.source);
    EXPECT_EQ(ast.manip.source->category, "shelf");
    EXPECT_EQ(ast.manip.destination.category, "table");
    EXPECT_EQ(ast.manip.prep, DestPreposition::To);
}

TEST(Parse, SeparateSentencesAndCase) {
    const auto ast = parse("Go to the bedroom. Move the wooden toy car in front of the white bottle onto the table.");
    ASSERT_TRUE(ast.manip.relation);
    EXPECT_EQ(ast.manip.relation->kind, RelationKind::InFrontOf);
    EXPECT_EQ(ast.manip.relation->landmark, (AttributeSet{"bottle", "white", std::nullopt}));
    EXPECT_EQ(ast.manip.target, (AttributeSet{"toy car", std::nullopt, "wooden"}));
}

TEST(Parse, SideRelationsVersusToPreposition) {
    const auto l = parse("Go to the study, move the cup to the left of the sofa to the desk.");
    ASSERT_TRUE(l.manip.relation);
    EXPECT_EQ(l.manip.relation->kind, RelationKind::LeftOf);
    EXPECT_EQ(l.manip.relation->landmark.category, "sofa");
    EXPECT_EQ(l.manip.prep, DestPreposition::To);
    const auto r = parse("Go to the study, move the cup to the right of the teddy bear onto the desk.");
    EXPECT_EQ(r.manip.relation->kind, RelationKind::RightOf);
    EXPECT_EQ(r.manip.relation->landmark.category, "teddy bear");
}

TEST(Parse, OutOfGrammarAtOffsetZero) {
    try {
        parse("Bring me coffee.");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 0u);
        EXPECT_EQ(e.expected(), std::set<std::string>{"\"go\""});
    }
}

TEST(Parse, ErrorOffsets) {
    const std::string s = "Go to the garage, move the mug onto the desk.";
    try {
        parse(s);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), s.find("garage"));
        EXPECT_TRUE(e.expected().contains("<room>"));
    }
    const std::string t = "Go to the bedroom, move the mug onto the desk";
    try {
        parse(t);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), t.size());
    }
    // Furniture is not a target category.
    EXPECT_THROW(parse("Go to the bedroom, move the desk onto the table."), ParseError);
    // Nor is an object a destination.
    EXPECT_THROW(parse("Go to the bedroom, move the mug onto the cup."), ParseError);
    EXPECT_THROW(parse("Go to the bedroom, move the mug onto the desk. extra"), ParseError);
}

TEST(RoundTrip, ThousandRandomAsts) {
    Rng rng(42);
    const auto t0 = std::chrono::steady_clock::now();
    int ok = 0;
    for (int i = 0; i < 1000; ++i) {
        const InstructionAst ast = random_ast(rng);
        validate(ast);
        const std::string text = realize(ast);
        const InstructionAst back = parse(text);
        ok += back == ast ? 1 : 0;
        EXPECT_EQ(back, ast) << text;
        EXPECT_EQ(realize(back), text);
    }
    EXPECT_EQ(ok, 1000);
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
}

TEST(Parse, TotalOnArbitraryBytes) {
    Rng rng(7);
    const std::string alphabet = "gotheabdrmvlinfcwsy ,.\0\xff\x80";
    for (int i = 0; i < 20000; ++i) {
        std::string s;
        const std::size_t n = rng.below(60);
        for (std::size_t k = 0; k < n; ++k)
            s.push_back(rng.bernoulli(0.5) ? static_cast<char>(rng.below(256)) : alphabet[rng.below(alphabet.size())]);
        try {
            parse(s);
        } catch (const ParseError& e) {
            EXPECT_LE(e.offset(), s.size());
        }
    }
    // Mutations of valid sentences.
    for (int i = 0; i < 5000; ++i) {
        std::string s = realize(random_ast(rng));
        const std::size_t edits = 1 + rng.below(3);
        for (std::size_t k = 0; k < edits && !s.empty(); ++k) {
            const std::size_t at = rng.below(s.size());
            switch (rng.below(3)) {
                case 0: s.erase(at, 1); break;
                case 1: s.insert(at, 1, static_cast<char>(rng.below(256))); break;
                default: s[at] = static_cast<char>(rng.below(256)); break;
            }
        }
        try {
            const auto ast = parse(s);
            validate(ast);
        } catch (const ParseError& e) {
            EXPECT_LE(e.offset(), s.size());
        }
    }
}

TEST(Validate, RejectsUnknownTokens) {
    Rng rng(1);
    InstructionAst ast = random_ast(rng);
    EXPECT_NO_THROW(validate(ast));
    ast.manip.target.color = "mauve";
    EXPECT_THROW(validate(ast), Error);
}
