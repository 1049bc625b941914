#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "fcog/instruction/vocabulary.hpp"

namespace fcog::instruction {

struct AttributeSet {
    std::string category;
    std::optional<std::string> color;
    std::optional<std::string> material;

    bool operator==(const AttributeSet&) const = default;

    /// Number of specified attributes, category included.
    int size() const { return 1 + (color ? 1 : 0) + (material ? 1 : 0); }
};

enum class RelationKind { On, InFrontOf, Near, LeftOf, RightOf };

inline constexpr RelationKind kRelationOrder[] = {RelationKind::On, RelationKind::InFrontOf, RelationKind::Near,
                                                  RelationKind::LeftOf, RelationKind::RightOf};

inline std::string_view to_string(RelationKind k) {
    switch (k) {
        case RelationKind::On: return "On";
        case RelationKind::InFrontOf: return "InFrontOf";
        case RelationKind::Near: return "Near";
        case RelationKind::LeftOf: return "LeftOf";
        case RelationKind::RightOf: return "RightOf";
    }
    return "?";
}

struct SpatialRelation {
    RelationKind kind = RelationKind::Near;
    AttributeSet landmark;
    bool operator==(const SpatialRelation&) const = default;
};

struct GotoClause {
    std::string room;
    bool operator==(const GotoClause&) const = default;
};

enum class DestPreposition { Onto, To };

struct ManipClause {
    AttributeSet target;
    std::optional<SpatialRelation> relation;
    std::optional<AttributeSet> source;  // "from the X"
    AttributeSet destination;
    DestPreposition prep = DestPreposition::Onto;
    bool operator==(const ManipClause&) const = default;
};

struct InstructionAst {
    GotoClause go;
    ManipClause manip;
    bool operator==(const InstructionAst&) const = default;
};

namespace detail {

inline void check_attrs(const AttributeSet& a, const Vocabulary& v, bool object, bool furniture, std::string_view what) {
    const bool cat_ok = (object && v.is_object(a.category)) || (furniture && v.is_furniture(a.category));
    if (!cat_ok) throw Error(std::string(what) + " category '" + a.category + "' is not in the vocabulary");
    if (a.color && !v.is_color(*a.color)) throw Error(std::string(what) + " color '" + *a.color + "' is unknown");
    if (a.material && !v.is_material(*a.material))
        throw Error(std::string(what) + " material '" + *a.material + "' is unknown");
}

}  // namespace detail

/// Throws Error when the AST uses tokens outside the vocabulary.
inline void validate(const InstructionAst& ast, const Vocabulary& v = Vocabulary::builtin()) {
    if (!v.is_room(ast.go.room)) throw Error("room '" + ast.go.room + "' is not in the vocabulary");
    detail::check_attrs(ast.manip.target, v, true, false, "target");
    if (ast.manip.relation) detail::check_attrs(ast.manip.relation->landmark, v, true, true, "landmark");
    if (ast.manip.source) detail::check_attrs(*ast.manip.source, v, false, true, "source");
    detail::check_attrs(ast.manip.destination, v, false, true, "destination");
}

}  // namespace fcog::instruction
