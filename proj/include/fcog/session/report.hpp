#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fcog/session/session.hpp"

namespace fcog::session {

struct Count {
    int attempts = 0;
    int successes = 0;
    bool operator==(const Count&) const = default;
};

struct Tally {
    std::array<Count, 4> subtasks;
    int sessions = 0;

    Count& operator[](Subtask s) { return subtasks[static_cast<int>(s)]; }
    const Count& operator[](Subtask s) const { return subtasks[static_cast<int>(s)]; }
    bool operator==(const Tally&) const = default;
};

/// Attempt and success counts per subtask. With `paper_compat`, an OLR
/// abstention is not counted as an attempt.
inline Tally aggregate(std::span<const SessionRecord> records, bool paper_compat = false) {
    Tally t;
    for (const SessionRecord& r : records) {
        ++t.sessions;
        for (Subtask s : kSubtasks) {
            const SubtaskOutcome& o = r.outcome(s);
            bool attempted = o.attempted;
            if (paper_compat && s == Subtask::OLR && r.olr_abstained) attempted = false;
            t[s].attempts += attempted ? 1 : 0;
            t[s].successes += attempted && o.succeeded ? 1 : 0;
        }
    }
    return t;
}

/// "R (s/a)" with R the success percentage to one decimal, half up, and a
/// trailing ".0" dropped.
inline std::string format_cell(Count c) {
    if (c.attempts == 0) return "0 (0/0)";
    const long long s = c.successes, a = c.attempts;
    const long long tenths = (2000 * s + a) / (2 * a);
    std::string r = std::to_string(tenths / 10);
    if (tenths % 10 != 0) r += "." + std::to_string(tenths % 10);
    return r + " (" + std::to_string(s) + "/" + std::to_string(a) + ")";
}

inline std::string format_row(const Tally& t) {
    std::string out;
    for (Subtask s : kSubtasks) {
        if (!out.empty()) out += " | ";
        out += format_cell(t[s]);
    }
    return out;
}

inline std::string format_report(const std::string& label, const Tally& t) { return label + ": " + format_row(t); }

using LabelledTally = std::pair<std::string, Tally>;

/// Tallies grouped by method label, labels in sorted order.
inline std::vector<LabelledTally> aggregate_by_label(std::span<const SessionRecord> records, bool paper_compat = false) {
    std::map<std::string, std::vector<SessionRecord>> groups;
    for (const SessionRecord& r : records) {
        SessionRecord copy = r;
        copy.events.clear();
        groups[r.label].push_back(std::move(copy));
    }
    std::vector<LabelledTally> out;
    for (const auto& [label, recs] : groups) out.emplace_back(label, aggregate(recs, paper_compat));
    return out;
}

/// Plain-text table with one row per method.
inline std::string format_table(const std::vector<LabelledTally>& rows) {
    std::vector<std::array<std::string, 5>> cells;
    cells.push_back({"Method", "Navigation", "OLR", "Fetching", "Carrying"});
    for (const auto& [label, t] : rows) {
        std::array<std::string, 5> r{label};
        for (Subtask s : kSubtasks) r[1 + static_cast<int>(s)] = format_cell(t[s]);
        cells.push_back(r);
    }
    std::array<std::size_t, 5> width{};
    for (const auto& r : cells)
        for (std::size_t i = 0; i < 5; ++i) width[i] = std::max(width[i], r[i].size());
    std::string out;
    auto line = [&](const std::array<std::string, 5>& r) {
        std::string l;
        for (std::size_t i = 0; i < 5; ++i) {
            if (i) l += " | ";
            l += r[i] + std::string(width[i] - r[i].size(), ' ');
        }
        while (!l.empty() && l.back() == ' ') l.pop_back();
        out += l + "\n";
    };
    line(cells[0]);
    std::string rule;
    for (std::size_t i = 0; i < 5; ++i) rule += (i ? "-+-" : "") + std::string(width[i], '-');
    out += rule + "\n";
    for (std::size_t k = 1; k < cells.size(); ++k) line(cells[k]);
    return out;
}

inline Json tally_json(const Tally& t) {
    Json j = Json::object();
    for (Subtask s : kSubtasks)
        j[std::string(to_string(s))] = {{"attempts", t[s].attempts}, {"successes", t[s].successes},
                                        {"cell", format_cell(t[s])}};
    return j;
}

inline Json report_json(const std::vector<LabelledTally>& rows, bool paper_compat) {
    Json methods = Json::array();
    for (const auto& [label, t] : rows)
        methods.push_back({{"label", label}, {"sessions", t.sessions}, {"row", format_row(t)}, {"subtasks", tally_json(t)}});
    return {{"schema", "fcog.report/1"}, {"paper_compat_counts", paper_compat}, {"methods", std::move(methods)}};
}

}  // namespace fcog::session
