#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fcog/session/replay.hpp"
#include "fcog/session/report.hpp"

namespace fcog::cli {

using session::ConfigError;
using world::Json;
namespace fs = std::filesystem;

enum Exit : int {
    kOk = 0,
    kUsage = 1,
    kConfig = 2,
    kGeneration = 3,
    kIo = 4,
    kSchema = 5,
    kMismatch = 6,
};

struct RunConfig {
    std::uint64_t seed = 0;
    int sessions = 40;
    int workers = 1;
    std::string out = "fcog-out";
    bool paper_compat_counts = false;
    session::SessionConfig session;

    void validate() const {
        if (sessions < 1) throw ConfigError("sessions must be at least 1");
        if (workers < 1) throw ConfigError("workers must be at least 1");
        if (out.empty()) throw ConfigError("out must not be empty");
        session.validate();
    }
};

/// Command-line values that take precedence over the configuration file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> sessions;
    std::optional<std::string> grounder;
    std::optional<double> p_miss;
    std::optional<double> p_attr;
    std::optional<double> time_budget_s;
    std::optional<int> workers;
    std::optional<std::string> out;
    bool paper_compat_counts = false;
};

inline RunConfig run_config_from_json(const Json& j) {
    RunConfig c;
    session::read_session_config(j, c.session, {"seed", "sessions", "workers", "out", "paper_compat_counts"});
    session::detail::read(j, "seed", c.seed, "");
    session::detail::read(j, "sessions", c.sessions, "");
    session::detail::read(j, "workers", c.workers, "");
    session::detail::read(j, "out", c.out, "");
    session::detail::read(j, "paper_compat_counts", c.paper_compat_counts, "");
    return c;
}

/// The part of a run configuration that determines its outputs. Worker count
/// and output directory are left out so they cannot change any written byte.
inline Json run_config_json(const RunConfig& c) {
    Json j{{"seed", c.seed}, {"sessions", c.sessions}, {"paper_compat_counts", c.paper_compat_counts}};
    const Json s = session::session_config_json(c.session);
    for (const auto& [k, v] : s.items()) j[k] = v;
    return j;
}

inline Json read_config_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot read configuration file '" + p.string() + "'");
    try {
        return Json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("configuration file '" + p.string() + "' is not valid JSON: " + e.what());
    }
}

inline RunConfig resolve_config(const std::optional<fs::path>& file, const Overrides& o) {
    RunConfig c = file ? run_config_from_json(read_config_file(*file)) : RunConfig{};
    if (o.seed) c.seed = *o.seed;
    if (o.sessions) c.sessions = *o.sessions;
    if (o.grounder) {
        const auto k = agent::grounder_from_string(*o.grounder);
        if (!k) throw ConfigError("unknown grounder '" + *o.grounder + "' (expected relational, keyword-baseline or oracle)");
        c.session.grounder = *k;
    }
    if (o.p_miss) c.session.noise.p_miss = *o.p_miss;
    if (o.p_attr) c.session.noise.p_attr = *o.p_attr;
    if (o.time_budget_s) c.session.time_budget_s = *o.time_budget_s;
    if (o.workers) c.workers = *o.workers;
    if (o.out) c.out = *o.out;
    if (o.paper_compat_counts) c.paper_compat_counts = true;
    c.validate();
    return c;
}

namespace detail {

/// Runs fn(i) for i in [0, n) on `workers` threads. Results keep index order;
/// the first exception by index is rethrown after all workers finish.
template <class T>
std::vector<T> parallel_map(int n, int workers, const std::function<T(int)>& fn) {
    std::vector<std::optional<T>> slots(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                slots[static_cast<std::size_t>(i)] = fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    const int k = std::clamp(workers, 1, std::max(n, 1));
    if (k == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < k; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace detail

/// Runs the batch, writes one log per session plus report.txt and
/// report.json under the output directory, and prints one row per method.
inline int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfig;
    }
    std::vector<session::SessionRecord> records;
    try {
        records = detail::parallel_map<session::SessionRecord>(cfg.sessions, cfg.workers, [&](int i) {
            return session::run_session(cfg.seed + static_cast<std::uint64_t>(i), cfg.session);
        });
    } catch (const taskgen::GenerationFailed& e) {
        err << "generation failed: " << e.what() << "\n";
        return kGeneration;
    }
    const auto rows = session::aggregate_by_label(records, cfg.paper_compat_counts);
    try {
        const fs::path dir(cfg.out);
        fs::create_directories(dir / "episodes");
        for (const session::SessionRecord& r : records) session::write_log(r, dir / "episodes" / session::log_file_name(r.seed));
        taskgen::write_text(dir / "report.txt", session::format_table(rows));
        Json summary = session::report_json(rows, cfg.paper_compat_counts);
        summary["config"] = run_config_json(cfg);
        taskgen::write_text(dir / "report.json", summary.dump(2) + "\n");
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return kIo;
    }
    for (const auto& [label, tally] : rows) out << session::format_report(label, tally) << "\n";
    return kOk;
}

/// Exports `sessions` generated episodes with seeds seed, seed+1, ...
inline int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfig;
    }
    std::vector<taskgen::DatasetEntry> entries;
    try {
        entries = detail::parallel_map<taskgen::DatasetEntry>(cfg.sessions, cfg.workers, [&](int i) {
            taskgen::GenConfig g = cfg.session.gen;
            g.seed = cfg.seed + static_cast<std::uint64_t>(i);
            return taskgen::DatasetEntry{g.seed, taskgen::generate_task(g)};
        });
    } catch (const taskgen::GenerationFailed& e) {
        err << "generation failed: " << e.what() << "\n";
        return kGeneration;
    }
    try {
        taskgen::export_dataset(entries, cfg.out, run_config_json(cfg));
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return kIo;
    }
    out << (fs::path(cfg.out) / "manifest.json").string() << "\n";
    return kOk;
}

/// Log files named by `paths`; directories contribute their *.ndjson files in
/// name order.
inline std::vector<fs::path> expand_logs(const std::vector<std::string>& paths) {
    std::vector<fs::path> out;
    for (const std::string& p : paths) {
        if (!fs::is_directory(p)) {
            out.emplace_back(p);
            continue;
        }
        std::vector<fs::path> found;
        for (const auto& e : fs::recursive_directory_iterator(p))
            if (e.is_regular_file() && e.path().extension() == ".ndjson") found.push_back(e.path());
        std::sort(found.begin(), found.end());
        out.insert(out.end(), found.begin(), found.end());
    }
    return out;
}

inline int cmd_report(const std::vector<std::string>& paths, bool paper_compat, std::ostream& out, std::ostream& err) {
    std::vector<session::SessionRecord> records;
    for (const fs::path& p : expand_logs(paths)) {
        try {
            records.push_back(session::record_from(session::read_log(p).record()));
        } catch (const fs::filesystem_error& e) {
            err << "i/o error: " << e.what() << "\n";
            return kIo;
        } catch (const session::SchemaError& e) {
            err << "schema error in " << p.string() << ": " << e.what() << "\n";
            return kSchema;
        }
    }
    const auto rows = session::aggregate_by_label(records, paper_compat);
    if (rows.empty()) out << session::format_report("(no sessions)", session::Tally{}) << "\n";
    for (const auto& [label, tally] : rows) out << session::format_report(label, tally) << "\n";
    return kOk;
}

/// Replays every given log; stops at the first one that fails.
inline int cmd_replay(const std::vector<std::string>& paths, std::ostream& out, std::ostream& err) {
    const std::vector<fs::path> logs = expand_logs(paths);
    if (logs.empty()) {
        err << "no logs to replay\n";
        return kIo;
    }
    for (const fs::path& p : logs) {
        try {
            const session::EpisodeLog log = session::read_log(p);
            session::verify_replay(log);
            out << p.string() << ": " << log.lines.size() << " events match\n";
        } catch (const fs::filesystem_error& e) {
            err << "i/o error: " << e.what() << "\n";
            return kIo;
        } catch (const session::SchemaError& e) {
            err << "schema error in " << p.string() << ": " << e.what() << "\n";
            return kSchema;
        } catch (const session::MismatchDetected& e) {
            err << p.string() << ": " << e.what() << "\n";
            return kMismatch;
        } catch (const taskgen::GenerationFailed& e) {
            err << p.string() << ": generation failed on replay: " << e.what() << "\n";
            return kMismatch;
        }
    }
    return kOk;
}

}  // namespace fcog::cli
