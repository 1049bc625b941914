// fcog: run evaluation batches, export task datasets, aggregate reports and
// replay episode logs.

#include <CLI11.hpp>

#include "fcog/cli/cli.hpp"

namespace {

using namespace fcog::cli;

struct BatchFlags {
    std::string config;
    std::uint64_t seed = 0;
    int sessions = 0;
    std::string grounder;
    double p_miss = 0.0, p_attr = 0.0, time_budget = 0.0;
    int workers = 0;
    std::string out;
    bool compat = false;
    std::vector<CLI::Option*> opts;

    void attach(CLI::App& app, bool with_eval) {
        app.add_option("--config", config, "JSON configuration file")->check(CLI::ExistingFile);
        opts.push_back(app.add_option("--seed", seed, "first session seed"));
        opts.push_back(app.add_option("--sessions", sessions, "number of sessions (episodes)"));
        opts.push_back(app.add_option("--grounder", grounder, "relational, keyword-baseline or oracle"));
        opts.push_back(app.add_option("--p-miss", p_miss, "probability a visible object is missed"));
        opts.push_back(app.add_option("--p-attr", p_attr, "probability an attribute is corrupted"));
        opts.push_back(app.add_option("--time-budget", time_budget, "simulated seconds per session"));
        opts.push_back(app.add_option("--workers", workers, "parallel sessions (default 1)"));
        opts.push_back(app.add_option("--out", out, "output directory"));
        if (with_eval) app.add_flag("--paper-compat-counts", compat, "count OLR abstentions as non-attempts");
    }

    RunConfig resolve() const {
        Overrides o;
        auto given = [&](int i) { return opts[static_cast<std::size_t>(i)]->count() > 0; };
        if (given(0)) o.seed = seed;
        if (given(1)) o.sessions = sessions;
        if (given(2)) o.grounder = grounder;
        if (given(3)) o.p_miss = p_miss;
        if (given(4)) o.p_attr = p_attr;
        if (given(5)) o.time_budget_s = time_budget;
        if (given(6)) o.workers = workers;
        if (given(7)) o.out = out;
        o.paper_compat_counts = compat;
        return resolve_config(config.empty() ? std::nullopt : std::optional<fs::path>(config), o);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fetch-and-carry task generation, execution and evaluation"};
    app.require_subcommand(1);

    BatchFlags run_flags, gen_flags;
    CLI::App* run = app.add_subcommand("run", "run a batch of sessions and report per-subtask results");
    run_flags.attach(*run, true);
    CLI::App* gen = app.add_subcommand("generate", "export generated episodes as a dataset");
    gen_flags.attach(*gen, false);

    std::vector<std::string> report_paths;
    bool report_compat = false;
    CLI::App* report = app.add_subcommand("report", "aggregate episode logs into report rows");
    report->add_option("logs", report_paths, "log files or directories");
    report->add_flag("--paper-compat-counts", report_compat, "count OLR abstentions as non-attempts");

    std::vector<std::string> replay_paths;
    CLI::App* replay = app.add_subcommand("replay", "re-run logged sessions and compare event by event");
    replay->add_option("logs", replay_paths, "log files or directories")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    try {
        if (*run) return cmd_run(run_flags.resolve(), std::cout, std::cerr);
        if (*gen) return cmd_generate(gen_flags.resolve(), std::cout, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    }
    if (*report) return cmd_report(report_paths, report_compat, std::cout, std::cerr);
    if (*replay) return cmd_replay(replay_paths, std::cout, std::cerr);
    return kUsage;
}
