#pragma once

#include <cctype>
#include <cstddef>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fcog/instruction/ast.hpp"

// Surface realizer and recursive-descent parser for the grammar in
// docs/grammar.bnf.

namespace fcog::instruction {

namespace detail {

inline void append_np(std::string& out, const AttributeSet& a) {
    out += "the ";
    if (a.material) out += *a.material + " ";
    if (a.color) out += *a.color + " ";
    out += a.category;
}

inline std::string_view relation_words(RelationKind k) {
    switch (k) {
        case RelationKind::On: return "on";
        case RelationKind::InFrontOf: return "in front of";
        case RelationKind::Near: return "near";
        case RelationKind::LeftOf: return "to the left of";
        case RelationKind::RightOf: return "to the right of";
    }
    return "";
}

}  // namespace detail

inline std::string realize(const GotoClause& g) { return "Go to the " + g.room; }

inline std::string realize(const ManipClause& m) {
    std::string out = "move ";
    detail::append_np(out, m.target);
    if (m.relation) {
        out += " ";
        out += detail::relation_words(m.relation->kind);
        out += " ";
        detail::append_np(out, m.relation->landmark);
    }
    if (m.source) {
        out += " from ";
        detail::append_np(out, *m.source);
    }
    out += m.prep == DestPreposition::Onto ? " onto " : " to ";
    detail::append_np(out, m.destination);
    return out;
}

/// Combined single-sentence instruction.
inline std::string realize(const InstructionAst& ast) { return realize(ast.go) + ", " + realize(ast.manip) + "."; }

class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::set<std::string> expected)
        : Error(message(offset, expected)), offset_(offset), expected_(std::move(expected)) {}

    std::size_t offset() const { return offset_; }
    const std::set<std::string>& expected() const { return expected_; }

private:
    static std::string message(std::size_t offset, const std::set<std::string>& expected) {
        std::ostringstream os;
        os << "parse error at byte " << offset << ": expected one of";
        for (const auto& e : expected) os << ' ' << e;
        return os.str();
    }

    std::size_t offset_;
    std::set<std::string> expected_;
};

namespace detail {

struct Token {
    enum Kind { Word, Comma, Period, Invalid, End } kind;
    std::string text;  // lowercased for words
    std::size_t offset;
};

inline std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        if (std::isspace(c)) {
            ++i;
        } else if (std::isalpha(c)) {
            const std::size_t start = i;
            std::string w;
            while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i])))
                w += static_cast<char>(std::tolower(static_cast<unsigned char>(s[i++])));
            out.push_back({Token::Word, std::move(w), start});
        } else if (c == ',') {
            out.push_back({Token::Comma, ",", i++});
        } else if (c == '.') {
            out.push_back({Token::Period, ".", i++});
        } else {
            out.push_back({Token::Invalid, std::string(1, static_cast<char>(c)), i++});
        }
    }
    out.push_back({Token::End, "", s.size()});
    return out;
}

inline std::vector<std::string> split_words(const std::string& phrase) {
    std::vector<std::string> words;
    std::istringstream in(phrase);
    for (std::string w; in >> w;) words.push_back(w);
    return words;
}

class Parser {
public:
    Parser(std::string_view text, const Vocabulary& vocab) : toks_(tokenize(text)), vocab_(vocab) {}

    InstructionAst instruction() {
        InstructionAst ast;
        word("go");
        word("to");
        article();
        ast.go.room = phrase(vocab_.rooms, "<room>");
        if (peek().kind == Token::Comma || peek().kind == Token::Period) {
            ++pos_;
        } else {
            fail({"\",\"", "\".\""});
        }
        ast.manip = manip();
        if (peek().kind != Token::Period) fail({"\".\""});
        ++pos_;
        if (peek().kind != Token::End) fail({"<end>"});
        return ast;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }

    bool is_word(std::size_t k, std::string_view w) const {
        return peek(k).kind == Token::Word && peek(k).text == w;
    }

    [[noreturn]] void fail(std::set<std::string> expected) const { throw ParseError(peek().offset, std::move(expected)); }

    void word(std::string_view w) {
        if (!is_word(0, w)) fail({"\"" + std::string(w) + "\""});
        ++pos_;
    }

    void article() {
        if (is_word(0, "the") || is_word(0, "a") || is_word(0, "an")) {
            ++pos_;
            return;
        }
        fail({"\"the\"", "\"a\"", "\"an\""});
    }

    /// Longest vocabulary entry matching at the cursor, or empty.
    std::string try_phrase(const std::vector<std::string>& entries) {
        std::size_t best_len = 0;
        const std::string* best = nullptr;
        for (const std::string& e : entries) {
            const auto words = split_words(e);
            if (words.size() <= best_len) continue;
            bool ok = true;
            for (std::size_t k = 0; k < words.size() && ok; ++k) ok = is_word(k, words[k]);
            if (ok) {
                best_len = words.size();
                best = &e;
            }
        }
        if (!best) return {};
        pos_ += best_len;
        return *best;
    }

    std::string phrase(const std::vector<std::string>& entries, const std::string& label) {
        std::string p = try_phrase(entries);
        if (p.empty()) fail({label});
        return p;
    }

    AttributeSet np(bool allow_object, bool allow_furniture) {
        AttributeSet a;
        for (;;) {
            if (!a.color) {
                if (auto c = try_phrase(vocab_.colors); !c.empty()) {
                    a.color = c;
                    continue;
                }
            }
            if (!a.material) {
                if (auto m = try_phrase(vocab_.materials); !m.empty()) {
                    a.material = m;
                    continue;
                }
            }
            break;
        }
        if (allow_object) a.category = try_phrase(vocab_.objects);
        if (a.category.empty() && allow_furniture) a.category = try_phrase(vocab_.furniture);
        if (a.category.empty()) {
            std::set<std::string> exp;
            if (!a.color) exp.insert("<color>");
            if (!a.material) exp.insert("<material>");
            if (allow_object) exp.insert("<object>");
            if (allow_furniture) exp.insert("<furniture>");
            fail(std::move(exp));
        }
        return a;
    }

    bool at_side_relation() const {
        return is_word(0, "to") && (is_word(1, "the") || is_word(1, "a") || is_word(1, "an")) &&
               (is_word(2, "left") || is_word(2, "right"));
    }

    ManipClause manip() {
        ManipClause m;
        word("move");
        article();
        m.target = np(true, false);

        std::optional<RelationKind> rel;
        if (is_word(0, "in")) {
            ++pos_;
            word("front");
            word("of");
            rel = RelationKind::InFrontOf;
        } else if (is_word(0, "near")) {
            ++pos_;
            rel = RelationKind::Near;
        } else if (is_word(0, "on")) {
            ++pos_;
            rel = RelationKind::On;
        } else if (at_side_relation()) {
            rel = is_word(2, "left") ? RelationKind::LeftOf : RelationKind::RightOf;
            pos_ += 3;
            word("of");
        }
        if (rel) {
            article();
            m.relation = SpatialRelation{*rel, np(true, true)};
        }
        if (is_word(0, "from")) {
            ++pos_;
            article();
            m.source = np(false, true);
        }
        if (is_word(0, "onto")) {
            m.prep = DestPreposition::Onto;
        } else if (is_word(0, "to")) {
            m.prep = DestPreposition::To;
        } else {
            std::set<std::string> exp{"\"onto\"", "\"to\""};
            if (!m.source) exp.insert("\"from\"");
            if (!m.relation && !m.source) exp.insert({"\"in\"", "\"near\"", "\"on\""});
            fail(std::move(exp));
        }
        ++pos_;
        article();
        m.destination = np(false, true);
        return m;
    }

    std::vector<Token> toks_;
    const Vocabulary& vocab_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses one instruction; throws ParseError with the byte offset of the
/// first offending token and the set of tokens acceptable there.
inline InstructionAst parse(std::string_view text, const Vocabulary& vocab = Vocabulary::builtin()) {
    return detail::Parser(text, vocab).instruction();
}

}  // namespace fcog::instruction
