#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fcog/taskgen/generator.hpp"
#include "fcog/world/scene_json.hpp"

namespace fcog::taskgen {

using world::Json;

inline constexpr std::string_view kEpisodeSchema = "fcog.episode/1";
inline constexpr std::string_view kManifestSchema = "fcog.manifest/1";

// Instruction encoding

inline Json attrs_json(const instruction::AttributeSet& a) {
    return {{"category", a.category}, {"color", world::optional_json(a.color)},
            {"material", world::optional_json(a.material)}};
}

inline instruction::AttributeSet attrs_from(const Json& j) {
    return {j.at("category").get<std::string>(), world::optional_from(j.at("color")),
            world::optional_from(j.at("material"))};
}

inline Json ast_json(const InstructionAst& ast) {
    const auto& m = ast.manip;
    Json rel = nullptr;
    if (m.relation)
        rel = {{"kind", instruction::to_string(m.relation->kind)}, {"landmark", attrs_json(m.relation->landmark)}};
    return {{"goto", {{"room", ast.go.room}}},
            {"manip",
             {{"target", attrs_json(m.target)},
              {"relation", std::move(rel)},
              {"source", m.source ? attrs_json(*m.source) : Json(nullptr)},
              {"destination", attrs_json(m.destination)},
              {"preposition", m.prep == instruction::DestPreposition::Onto ? "onto" : "to"}}}};
}

inline InstructionAst ast_from(const Json& j) {
    InstructionAst ast;
    ast.go.room = j.at("goto").at("room").get<std::string>();
    const Json& m = j.at("manip");
    ast.manip.target = attrs_from(m.at("target"));
    if (!m.at("relation").is_null()) {
        const auto kind = m.at("relation").at("kind").get<std::string>();
        bool found = false;
        for (auto k : instruction::kRelationOrder)
            if (instruction::to_string(k) == kind) {
                ast.manip.relation = instruction::SpatialRelation{k, attrs_from(m.at("relation").at("landmark"))};
                found = true;
            }
        if (!found) throw Error("unknown relation kind '" + kind + "'");
    }
    if (!m.at("source").is_null()) ast.manip.source = attrs_from(m.at("source"));
    ast.manip.destination = attrs_from(m.at("destination"));
    const auto prep = m.at("preposition").get<std::string>();
    if (prep != "onto" && prep != "to") throw Error("unknown preposition '" + prep + "'");
    ast.manip.prep = prep == "onto" ? instruction::DestPreposition::Onto : instruction::DestPreposition::To;
    return ast;
}

inline Json task_json(const TaskSpec& t) {
    return {{"target", t.target.value},
            {"destination", t.destination.value},
            {"instruction", {{"text", t.instruction.text}, {"ast", ast_json(t.instruction.ast)}}},
            {"target_position", world::vec_json(t.target_position)},
            {"destination_position", world::vec_json(t.destination_position)},
            {"target_capture", world::capture_json(t.target_capture)},
            {"destination_capture", world::capture_json(t.destination_capture)},
            {"attempt", t.attempt}};
}

inline Json gen_config_json(const GenConfig& c) {
    return {{"seed", c.seed},
            {"layout", c.layout},
            {"objects_per_room", c.objects_per_room},
            {"min_objects_per_room", c.min_objects_per_room},
            {"max_objects_per_room", c.max_objects_per_room},
            {"distractor_guarantee", c.distractor_guarantee},
            {"p_color", c.p_color},
            {"p_material", c.p_material},
            {"source_phrase", c.source_phrase},
            {"relations",
             {{"near_m", c.relations.near_m},
              {"lateral_m", c.relations.lateral_m},
              {"bearing_rad", c.relations.bearing_rad},
              {"depth_band_m", c.relations.depth_band_m}}},
            {"weights", {{"attribute", c.weights.attribute}, {"relation", c.weights.relation}}},
            {"max_task_attempts", c.max_task_attempts}};
}

inline Json episode_json(std::uint64_t seed, const GeneratedTask& g) {
    return {{"schema", kEpisodeSchema}, {"seed", seed}, {"scene", world::to_json(g.env)}, {"task", task_json(g.task)}};
}

// Schema validation

namespace detail {

inline void require(std::vector<std::string>& errs, const Json& j, const std::string& key, Json::value_t type,
                    const std::string& where) {
    if (!j.is_object() || !j.contains(key)) {
        errs.push_back(where + ": missing '" + key + "'");
        return;
    }
    const Json& v = j.at(key);
    bool ok = v.type() == type;
    if (type == Json::value_t::number_float) ok = v.is_number();
    if (type == Json::value_t::number_unsigned) ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    if (!ok) errs.push_back(where + ": '" + key + "' has the wrong type");
}

}  // namespace detail

/// Structural and semantic check of an episode record. Empty means valid.
inline std::vector<std::string> validate_episode(const Json& j) {
    using T = Json::value_t;
    std::vector<std::string> errs;
    if (!j.is_object()) return {"episode is not an object"};
    detail::require(errs, j, "schema", T::string, "episode");
    detail::require(errs, j, "seed", T::number_unsigned, "episode");
    detail::require(errs, j, "scene", T::object, "episode");
    detail::require(errs, j, "task", T::object, "episode");
    if (!errs.empty()) return errs;
    if (j.at("schema") != kEpisodeSchema) errs.push_back("episode: unknown schema");

    Environment env;
    try {
        env = world::environment_from_json(j.at("scene"));
    } catch (const std::exception& e) {
        errs.push_back(std::string("scene: ") + e.what());
        return errs;
    }
    for (const std::string& p : world::validate(env)) errs.push_back("scene: " + p);

    const Json& t = j.at("task");
    for (const char* k : {"target", "destination", "attempt"}) detail::require(errs, t, k, T::number_unsigned, "task");
    for (const char* k : {"instruction", "target_position", "destination_position", "target_capture",
                          "destination_capture"})
        detail::require(errs, t, k, T::object, "task");
    if (!errs.empty()) return errs;
    const ObjectId target{t.at("target").get<std::uint32_t>()};
    const SurfaceId dest{t.at("destination").get<std::uint32_t>()};
    if (!env.has(target)) errs.push_back("task: target does not exist");
    if (!env.has(dest)) errs.push_back("task: destination does not exist");
    if (!errs.empty()) return errs;
    if (env.object(target).support == dest) errs.push_back("task: destination is the target's support");

    try {
        const std::string text = t.at("instruction").at("text").get<std::string>();
        const InstructionAst ast = ast_from(t.at("instruction").at("ast"));
        if (instruction::parse(text) != ast) errs.push_back("task: instruction text and AST disagree");
        if (instruction::realize(ast) != text) errs.push_back("task: instruction text is not canonical");
        const auto room = world::point_in_room(env.object(target).pose.position(), env);
        if (!room || env.room(*room).name != ast.go.room) errs.push_back("task: goto room does not contain the target");
        const Capture tc = world::capture_from(t.at("target_capture"));
        const Capture dc = world::capture_from(t.at("destination_capture"));
        auto contains = [](const Capture& c, EntityRef e) {
            return std::any_of(c.snapshots.begin(), c.snapshots.end(), [&](const auto& s) { return s.entity == e; });
        };
        if (!contains(tc, EntityRef::object(target))) errs.push_back("task: target capture misses the target");
        if (!contains(dc, EntityRef::surface(dest))) errs.push_back("task: destination capture misses the destination");
        if (world::distance(world::vec_from(t.at("target_position")), env.object(target).pose.position()) > 1e-9)
            errs.push_back("task: target position disagrees with the scene");
    } catch (const instruction::ParseError& e) {
        errs.push_back(std::string("task: instruction does not parse: ") + e.what());
    } catch (const std::exception& e) {
        errs.push_back(std::string("task: ") + e.what());
    }
    return errs;
}

// Export

struct DatasetEntry {
    std::uint64_t seed;
    GeneratedTask generated;
};

inline std::string episode_file_name(std::uint64_t seed) {
    std::string s = std::to_string(seed);
    return "episode-" + std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s + ".json";
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::filesystem::filesystem_error("cannot open for writing", p, std::make_error_code(std::errc::io_error));
    f << text;
    if (!f) throw std::filesystem::filesystem_error("write failed", p, std::make_error_code(std::errc::io_error));
}

/// Writes one episode file per entry and a manifest. Returns the manifest.
inline Json export_dataset(const std::vector<DatasetEntry>& entries, const std::filesystem::path& dir,
                           const Json& config_echo = Json::object()) {
    std::filesystem::create_directories(dir);
    Json episodes = Json::array();
    for (const DatasetEntry& e : entries) {
        const std::string name = episode_file_name(e.seed);
        write_text(dir / name, episode_json(e.seed, e.generated).dump(2) + "\n");
        episodes.push_back({{"seed", e.seed}, {"file", name}, {"attempt", e.generated.task.attempt}});
    }
    Json manifest{{"schema", kManifestSchema},
                  {"count", entries.size()},
                  {"config", config_echo},
                  {"episodes", std::move(episodes)}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

}  // namespace fcog::taskgen
