#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fcog/session/session.hpp"

namespace fcog::session {

class SchemaError : public Error {
public:
    using Error::Error;
};

class MismatchDetected : public Error {
public:
    MismatchDetected(std::size_t line, std::string expected, std::string actual)
        : Error("replay diverges at event " + std::to_string(line + 1) + ": logged " + excerpt(expected) +
                ", replayed " + excerpt(actual)),
          line_(line),
          expected_(std::move(expected)),
          actual_(std::move(actual)) {}

    std::size_t line() const { return line_; }
    const std::string& expected() const { return expected_; }
    const std::string& actual() const { return actual_; }

private:
    static std::string excerpt(const std::string& s) { return s.size() > 160 ? s.substr(0, 160) + "..." : s; }
    std::size_t line_;
    std::string expected_, actual_;
};

struct EpisodeLog {
    std::vector<std::string> lines;
    std::vector<Json> events;

    std::uint64_t seed() const { return events.front().at("seed").get<std::uint64_t>(); }
    const Json& config() const { return events.front().at("config"); }
    const Json& record() const { return events.back().at("record"); }
};

/// Parses and checks the log envelope: one JSON object per line, opening with
/// session_start and closing with session_end.
inline EpisodeLog parse_log(const std::string& text) {
    EpisodeLog log;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) throw SchemaError("last line is not newline-terminated (truncated log?)");
        std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        Json e;
        try {
            e = Json::parse(line);
        } catch (const nlohmann::json::exception&) {
            throw SchemaError("line " + std::to_string(log.lines.size() + 1) + " is not valid JSON");
        }
        if (!e.is_object() || !e.contains("event") || !e.at("event").is_string())
            throw SchemaError("line " + std::to_string(log.lines.size() + 1) + " has no event type");
        log.lines.push_back(std::move(line));
        log.events.push_back(std::move(e));
    }
    if (log.events.empty()) throw SchemaError("log is empty");
    const Json& first = log.events.front();
    if (first.at("event") != "session_start" || !first.contains("seed") || !first.at("seed").is_number_unsigned() ||
        !first.contains("config"))
        throw SchemaError("log does not open with a session_start event");
    const Json& last = log.events.back();
    if (last.at("event") != "session_end" || !last.contains("record"))
        throw SchemaError("log does not close with a session_end event (truncated log?)");
    try {
        (void)record_from(last.at("record"));
    } catch (const std::exception& e) {
        throw SchemaError(std::string("session record is malformed: ") + e.what());
    }
    return log;
}

inline EpisodeLog read_log(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::filesystem::filesystem_error("cannot open log", path, std::make_error_code(std::errc::no_such_file_or_directory));
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_log(ss.str());
}

/// Re-runs the logged session from its seed and configuration.
inline SessionRecord replay(const EpisodeLog& log) {
    SessionConfig cfg;
    try {
        cfg = session_config_from_json(log.config());
    } catch (const ConfigError& e) {
        throw SchemaError(std::string("logged configuration is invalid: ") + e.what());
    }
    return run_session(log.seed(), cfg);
}

/// Replays and compares event by event; throws MismatchDetected at the first
/// divergence.
inline SessionRecord verify_replay(const EpisodeLog& log) {
    SessionRecord fresh = replay(log);
    const std::size_t n = std::max(fresh.events.size(), log.lines.size());
    for (std::size_t i = 0; i < n; ++i) {
        const std::string got = i < fresh.events.size() ? fresh.events[i].dump() : "<end of log>";
        const std::string want = i < log.lines.size() ? log.lines[i] : "<end of log>";
        if (got != want) throw MismatchDetected(i, want, got);
    }
    return fresh;
}

}  // namespace fcog::session
