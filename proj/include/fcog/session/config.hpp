#pragma once

#include <set>
#include <string>

#include "fcog/taskgen/dataset.hpp"

namespace fcog::session {

using world::Json;

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Everything that determines one session apart from its seed.
struct SessionConfig {
    taskgen::GenConfig gen;
    agent::GrounderKind grounder = agent::GrounderKind::Relational;
    agent::NoiseConfig noise;
    double time_budget_s = 300.0;
    /// Report row label; empty means the grounder name.
    std::string label;

    std::string method_label() const { return label.empty() ? std::string(agent::to_string(grounder)) : label; }

    void validate() const {
        try {
            gen.validate();
            noise.validate();
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        if (!(time_budget_s >= 0.0)) throw ConfigError("time_budget_s must be non-negative");
    }
};

namespace detail {

/// Rejects keys outside `allowed`, naming the first offender with its path.
inline void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : j.items()) {
        bool ok = false;
        for (std::string_view a : allowed) ok = ok || a == k;
        if (!ok) throw ConfigError("unknown configuration key '" + where + (where.empty() ? "" : ".") + k + "'");
    }
}

template <class T>
void read(const Json& j, std::string_view key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(std::string(key)).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("configuration key '" + where + (where.empty() ? "" : ".") + std::string(key) +
                          "' has the wrong type");
    }
}

}  // namespace detail

inline Json noise_json(const agent::NoiseConfig& n) {
    return {{"p_miss", n.p_miss}, {"p_attr", n.p_attr}, {"p_hallucinate", n.p_hallucinate}};
}

inline Json session_config_json(const SessionConfig& c) {
    Json gen = taskgen::gen_config_json(c.gen);
    gen.erase("seed");
    return {{"grounder", agent::to_string(c.grounder)},
            {"label", c.label},
            {"time_budget_s", c.time_budget_s},
            {"noise", noise_json(c.noise)},
            {"gen", std::move(gen)}};
}

inline void read_noise(const Json& j, agent::NoiseConfig& n, const std::string& where) {
    detail::check_keys(j, {"p_miss", "p_attr", "p_hallucinate"}, where);
    detail::read(j, "p_miss", n.p_miss, where);
    detail::read(j, "p_attr", n.p_attr, where);
    detail::read(j, "p_hallucinate", n.p_hallucinate, where);
}

inline void read_gen(const Json& j, taskgen::GenConfig& g, const std::string& where) {
    detail::check_keys(j,
                       {"layout", "objects_per_room", "min_objects_per_room", "max_objects_per_room",
                        "distractor_guarantee", "p_color", "p_material", "source_phrase", "relations", "weights",
                        "max_task_attempts"},
                       where);
    detail::read(j, "layout", g.layout, where);
    detail::read(j, "objects_per_room", g.objects_per_room, where);
    detail::read(j, "min_objects_per_room", g.min_objects_per_room, where);
    detail::read(j, "max_objects_per_room", g.max_objects_per_room, where);
    detail::read(j, "distractor_guarantee", g.distractor_guarantee, where);
    detail::read(j, "p_color", g.p_color, where);
    detail::read(j, "p_material", g.p_material, where);
    detail::read(j, "source_phrase", g.source_phrase, where);
    detail::read(j, "max_task_attempts", g.max_task_attempts, where);
    if (j.contains("relations")) {
        const Json& r = j.at("relations");
        const std::string w = where + ".relations";
        detail::check_keys(r, {"near_m", "lateral_m", "bearing_rad", "depth_band_m"}, w);
        detail::read(r, "near_m", g.relations.near_m, w);
        detail::read(r, "lateral_m", g.relations.lateral_m, w);
        detail::read(r, "bearing_rad", g.relations.bearing_rad, w);
        detail::read(r, "depth_band_m", g.relations.depth_band_m, w);
    }
    if (j.contains("weights")) {
        const Json& r = j.at("weights");
        const std::string w = where + ".weights";
        detail::check_keys(r, {"attribute", "relation"}, w);
        detail::read(r, "attribute", g.weights.attribute, w);
        detail::read(r, "relation", g.weights.relation, w);
    }
}

inline void read_grounder(const Json& j, agent::GrounderKind& out, const std::string& where) {
    std::string name;
    detail::read(j, "grounder", name, where);
    if (!j.contains("grounder")) return;
    const auto k = agent::grounder_from_string(name);
    if (!k) throw ConfigError("unknown grounder '" + name + "' (expected relational, keyword-baseline or oracle)");
    out = *k;
}

/// Fills `c` from the session part of a configuration object. `extra` lists
/// further keys the caller handles itself.
inline void read_session_config(const Json& j, SessionConfig& c, std::initializer_list<std::string_view> extra = {}) {
    std::vector<std::string_view> allowed{"grounder", "label", "time_budget_s", "noise", "gen"};
    allowed.insert(allowed.end(), extra.begin(), extra.end());
    if (!j.is_object()) throw ConfigError("configuration must be an object");
    for (const auto& [k, v] : j.items())
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ConfigError("unknown configuration key '" + k + "'");
    read_grounder(j, c.grounder, "");
    detail::read(j, "label", c.label, "");
    detail::read(j, "time_budget_s", c.time_budget_s, "");
    if (j.contains("noise")) read_noise(j.at("noise"), c.noise, "noise");
    if (j.contains("gen")) read_gen(j.at("gen"), c.gen, "gen");
}

inline SessionConfig session_config_from_json(const Json& j) {
    SessionConfig c;
    read_session_config(j, c);
    c.validate();
    return c;
}

}  // namespace fcog::session
