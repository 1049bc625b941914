#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "fcog/fcog.hpp"

using namespace fcog;
using namespace fcog::cli;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fcog-cli-" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
    return out;
}

RunConfig batch(std::uint64_t seed, int sessions, agent::GrounderKind g, const fs::path& out) {
    RunConfig c;
    c.seed = seed;
    c.sessions = sessions;
    c.session.grounder = g;
    c.out = out.string();
    return c;
}

int shell(const std::string& args) {
    const int rc = std::system((std::string(FCOG_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// A log holding only the envelope and the final record.
std::string synthetic_log(std::uint64_t seed, bool olr, bool fetch, bool carry) {
    session::SessionRecord r;
    r.seed = seed;
    r.label = "ours";
    auto done = [](bool ok) {
        agent::SubtaskOutcome o;
        o.attempted = true;
        o.succeeded = ok;
        return o;
    };
    r.outcomes[0] = done(true);
    r.outcomes[1] = done(olr);
    if (olr) r.outcomes[2] = done(fetch);
    if (olr && fetch) r.outcomes[3] = done(carry);
    r.termination = carry ? session::TerminationReason{session::TerminationReason::Kind::TaskCompleted, {}}
                          : session::TerminationReason{session::TerminationReason::Kind::SubtaskFailed,
                                                       olr ? session::Subtask::Carrying : session::Subtask::OLR};
    const Json start{{"event", "session_start"}, {"seed", seed}, {"config", Json::object()}};
    const Json end{{"event", "session_end"}, {"record", session::record_json(r)}};
    return start.dump() + "\n" + end.dump() + "\n";
}

}  // namespace

TEST(Run, FortyRelationalSessionsNavigateEverywhere) {
    const fs::path dir = scratch("forty");
    std::ostringstream out, err;
    EXPECT_EQ(cmd_run(batch(0, 40, agent::GrounderKind::Relational, dir), out, err), kOk) << err.str();
    EXPECT_EQ(out.str().rfind("relational: 100 (40/40) | ", 0), 0u) << out.str();
    EXPECT_TRUE(fs::exists(dir / "report.txt"));
    EXPECT_TRUE(fs::exists(dir / "report.json"));
    int logs = 0;
    for (const auto& e : fs::directory_iterator(dir / "episodes")) logs += e.path().extension() == ".ndjson" ? 1 : 0;
    EXPECT_EQ(logs, 40);
    fs::remove_all(dir);
}

TEST(Run, SingleOracleSession) {
    const fs::path dir = scratch("one");
    std::ostringstream out, err;
    EXPECT_EQ(cmd_run(batch(13, 1, agent::GrounderKind::Oracle, dir), out, err), kOk);
    EXPECT_EQ(out.str(), "oracle: 100 (1/1) | 100 (1/1) | 100 (1/1) | 100 (1/1)\n");
    fs::remove_all(dir);
}

TEST(Run, WorkersDoNotChangeOutput) {
    const fs::path a = scratch("w1"), b = scratch("w4");
    std::ostringstream o1, o2, err;
    RunConfig c = batch(40, 6, agent::GrounderKind::Relational, a);
    c.session.noise.p_miss = 0.4;
    ASSERT_EQ(cmd_run(c, o1, err), kOk);
    c.workers = 4;
    c.out = b.string();
    ASSERT_EQ(cmd_run(c, o2, err), kOk);
    EXPECT_EQ(o1.str(), o2.str());
    EXPECT_EQ(tree(a), tree(b));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Config, UnknownKeyIsNamed) {
    const fs::path dir = scratch("cfg");
    fs::create_directories(dir);
    taskgen::write_text(dir / "bad.json", R"({"sessions": 2, "noise": {"p_mis": 0.1}})");
    try {
        resolve_config(dir / "bad.json", {});
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("noise.p_mis"), std::string::npos) << e.what();
    }
    EXPECT_EQ(shell("run --config " + (dir / "bad.json").string()), kConfig);
    taskgen::write_text(dir / "broken.json", "{\"sessions\": ");
    EXPECT_THROW(resolve_config(dir / "broken.json", {}), ConfigError);
    fs::remove_all(dir);
}

TEST(Config, FlagsOverrideFile) {
    const fs::path dir = scratch("override");
    fs::create_directories(dir);
    taskgen::write_text(dir / "c.json",
                        R"({"seed": 3, "sessions": 9, "grounder": "oracle", "noise": {"p_miss": 0.1}, "gen": {"source_phrase": true}})");
    Overrides o;
    o.sessions = 2;
    o.p_miss = 0.5;
    o.grounder = "keyword-baseline";
    const RunConfig c = resolve_config(dir / "c.json", o);
    EXPECT_EQ(c.seed, 3u);
    EXPECT_EQ(c.sessions, 2);
    EXPECT_EQ(c.session.noise.p_miss, 0.5);
    EXPECT_EQ(c.session.grounder, agent::GrounderKind::KeywordBaseline);
    EXPECT_TRUE(c.session.gen.source_phrase);
    o.grounder = "psychic";
    EXPECT_THROW(resolve_config(dir / "c.json", o), ConfigError);
    Overrides zero;
    zero.sessions = 0;
    EXPECT_THROW(resolve_config(std::nullopt, zero), ConfigError);
    fs::remove_all(dir);
}

TEST(ExitCodes, Binary) {
    EXPECT_EQ(shell("run --p-miss 1.5"), kConfig);
    EXPECT_EQ(shell("run --sessions 0"), kConfig);
    EXPECT_EQ(shell("run --grounder psychic"), kConfig);
    EXPECT_EQ(shell("bogus"), kConfig);
    EXPECT_EQ(shell("replay /nonexistent/session-000001.ndjson"), kIo);
}

TEST(Generate, FortyEpisodes) {
    const fs::path dir = scratch("gen"), again = scratch("gen2");
    std::ostringstream out, err;
    RunConfig c = batch(7, 40, agent::GrounderKind::Relational, dir);
    ASSERT_EQ(cmd_generate(c, out, err), kOk) << err.str();
    EXPECT_EQ(out.str(), (dir / "manifest.json").string() + "\n");
    const Json manifest = Json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(manifest.at("count"), 40);
    ASSERT_EQ(manifest.at("episodes").size(), 40u);
    for (const Json& e : manifest.at("episodes")) {
        const auto errs = taskgen::validate_episode(Json::parse(slurp(dir / e.at("file").get<std::string>())));
        EXPECT_TRUE(errs.empty()) << errs.front();
    }
    c.out = again.string();
    c.workers = 3;
    ASSERT_EQ(cmd_generate(c, out, err), kOk);
    EXPECT_EQ(tree(dir), tree(again));
    fs::remove_all(dir);
    fs::remove_all(again);
}

TEST(Generate, UnwritableDirectory) {
    const fs::path f = scratch("blocker");
    taskgen::write_text(f, "x");
    std::ostringstream out, err;
    EXPECT_EQ(cmd_generate(batch(1, 1, agent::GrounderKind::Relational, f / "data"), out, err), kIo);
    EXPECT_EQ(shell("generate --sessions 1 --out " + (f / "data").string()), kIo);
    fs::remove_all(f);
}

TEST(Report, TableRowFromLogs) {
    const fs::path dir = scratch("report");
    fs::create_directories(dir);
    for (int i = 0; i < 40; ++i)
        taskgen::write_text(dir / session::log_file_name(static_cast<std::uint64_t>(i)), synthetic_log(i, i < 8, true, i == 0));
    std::ostringstream out, err;
    EXPECT_EQ(cmd_report({dir.string()}, false, out, err), kOk) << err.str();
    EXPECT_EQ(out.str(), "ours: 100 (40/40) | 20 (8/40) | 100 (8/8) | 12.5 (1/8)\n");
    fs::remove_all(dir);
}

TEST(Report, EmptyAndCorrupt) {
    std::ostringstream out, err;
    EXPECT_EQ(cmd_report({}, false, out, err), kOk);
    EXPECT_NE(out.str().find("0 (0/0) | 0 (0/0) | 0 (0/0) | 0 (0/0)"), std::string::npos);
    const fs::path dir = scratch("corrupt");
    fs::create_directories(dir);
    taskgen::write_text(dir / "session-000001.ndjson", "{\"event\":\"session_start\"");
    std::ostringstream e2;
    EXPECT_EQ(cmd_report({dir.string()}, false, out, e2), kSchema);
    EXPECT_NE(e2.str().find("session-000001.ndjson"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Replay, FreshTamperedMissing) {
    const fs::path dir = scratch("replay");
    std::ostringstream out, err;
    ASSERT_EQ(cmd_run(batch(30, 2, agent::GrounderKind::Relational, dir), out, err), kOk);
    EXPECT_EQ(cmd_replay({(dir / "episodes").string()}, out, err), kOk) << err.str();
    const fs::path log = dir / "episodes" / session::log_file_name(30);
    std::string text = slurp(log);
    const auto pos = text.find("\"clock_s\":");
    ASSERT_NE(pos, std::string::npos);
    text.insert(pos + 10, "1");
    taskgen::write_text(log, text);
    std::ostringstream e2;
    EXPECT_EQ(cmd_replay({log.string()}, out, e2), kMismatch);
    EXPECT_NE(e2.str().find("diverges at event"), std::string::npos) << e2.str();
    EXPECT_EQ(cmd_replay({(dir / "missing.ndjson").string()}, out, err), kIo);
    fs::remove_all(dir);
}
