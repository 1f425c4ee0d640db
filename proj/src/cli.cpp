#include "forage/cli.h"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"

#include "forage/a2c.h"
#include "forage/env.h"
#include "forage/format.h"
#include "forage/oracle.h"
#include "forage/report.h"
#include "forage/sweep.h"

namespace forage {

namespace {

struct Options {
    std::uint64_t seed = 42;
    std::string profile;
    std::string out = "out";
    double yield = 2000.0;
    double spoilage = 0.3;
    int agents = 0;
    int episodes = 0;
    int eval_runs = 0;
    int jobs = 1;
    double lr = 0.0;
    std::string policy = "greedy";
    std::string trace;
    std::string history;
    std::string results;
    int grid = 10;
};

bool given(const CLI::App& app, const char* name) { return app.get_option(name)->count() > 0; }

TrainConfig train_config(const CLI::App& app, const Options& o, int default_episodes) {
    TrainConfig cfg;
    cfg.episodes = given(app, "--episodes") ? o.episodes : default_episodes;
    if (given(app, "--eval-runs")) cfg.eval_runs = o.eval_runs;
    if (given(app, "--lr")) cfg.adam.lr = o.lr;
    return cfg;
}

int run_simulate(const CLI::App& app, const Options& o, std::ostream& out) {
    (void)app;
    EnvParams env = EnvParams::with(o.yield, o.spoilage);
    env.validate();
    Rng rng(mix64(o.seed));
    EnvState state = reset(env);

    std::unique_ptr<std::ofstream> file;
    std::ostream* os = &out;
    if (!o.trace.empty()) {
        file = std::make_unique<std::ofstream>(o.trace);
        if (!*file) throw std::runtime_error("cannot open " + o.trace + " for writing");
        os = file.get();
    }
    *os << "step,day,action,days,reward,food,skill,culture,status\n";
    int step_no = 0;
    while (!state.finished()) {
        Action a = Action::Culture;
        if (o.policy == "hunt") {
            a = Action::Hunt;
        } else if (o.policy == "invest") {
            a = Action::Invest;
        } else if (o.policy == "culture") {
            a = Action::Culture;
        } else if (o.policy == "random") {
            a = action_from_index(static_cast<int>(uniform01(rng) * kNumActions));
        } else if (o.policy == "greedy") {
            a = oracle::should_hunt(state.food, env.horizon - state.day, env) ? Action::Hunt : Action::Culture;
        } else {
            throw std::invalid_argument("unknown policy '" + o.policy + "'");
        }
        const StepOutcome res = step(state, env, a, &rng);
        *os << step_no++ << ',' << state.day << ',' << action_name(a) << ',' << res.days_elapsed << ','
            << shortest(res.reward) << ',' << shortest(state.food) << ',' << shortest(state.skill) << ','
            << shortest(state.culture) << ',' << cause_name(state.cause) << '\n';
    }
    return 0;
}

int run_train(const CLI::App& app, const Options& o, std::ostream& out) {
    EnvParams env = EnvParams::with(o.yield, o.spoilage);
    int episodes = TrainConfig{}.episodes;
    if (!o.profile.empty()) episodes = sweep::profile(o.profile).train.episodes;
    const TrainConfig cfg = train_config(app, o, episodes);
    const TrainedAgent agent = train_agent(env, cfg, o.seed);
    const EvalResult ev = evaluate(agent, env, cfg.eval_runs, o.seed ^ 0x5BD1E9955BD1E995ULL);
    if (!o.history.empty()) {
        std::ofstream hs(o.history);
        if (!hs) throw std::runtime_error("cannot open " + o.history + " for writing");
        write_history_csv(hs, agent.history);
    }
    out << "Y=" << shortest(o.yield) << " p=" << shortest(o.spoilage) << " episodes=" << cfg.episodes << '\n'
        << "mean_C=" << shortest(ev.mean_culture) << " std_C=" << shortest(ev.std_culture)
        << " starvation_rate=" << shortest(ev.starvation_rate) << '\n';
    return 0;
}

int run_sweep_cmd(const CLI::App& app, const Options& o, std::ostream& out, std::ostream& err) {
    sweep::SweepConfig cfg = sweep::profile(o.profile.empty() ? "desk" : o.profile);
    cfg.master_seed = o.seed;
    cfg.out_dir = o.out;
    cfg.jobs = o.jobs;
    if (given(app, "--agents")) cfg.n_agents = o.agents;
    cfg.train = train_config(app, o, cfg.train.episodes);
    sweep::RunTimes times{sweep::iso_timestamp_now(), {}};
    int last_pct = -1;
    const auto results = sweep::run_sweep(cfg, [&](int done, int total) {
        const int pct = 100 * done / total;
        if (pct / 10 != last_pct / 10) {
            err << "sweep: " << done << '/' << total << " agents\n";
            last_pct = pct;
        }
    });
    times.finished = sweep::iso_timestamp_now();
    sweep::write_results(results, cfg, cfg.out_dir, times);
    const int diverged = sweep::diverged_count(results);
    out << "wrote " << (cfg.out_dir / "results.csv").string() << " (" << results.size() << " agents, " << diverged
        << " diverged)\n";
    return sweep::sweep_failed(results) ? 1 : 0;
}

int run_analyze(const Options& o, std::ostream& out) {
    const std::filesystem::path out_dir = o.out;
    const std::filesystem::path input = o.results.empty() ? out_dir / "results.csv" : std::filesystem::path(o.results);
    const auto results = sweep::read_results(input);
    const auto outputs = report::analyze(results, out_dir);
    std::ifstream rep(out_dir / report::kReportFile);
    out << rep.rdbuf();
    for (const auto& f : outputs.files) out << "wrote " << f.string() << '\n';
    return 0;
}

int run_verify(const Options& o, std::ostream& out) {
    if (o.grid < 2) throw std::invalid_argument("--grid must be >= 2");
    const EnvParams base;
    const auto grid = oracle::make_grid(1000.0, 3000.0, o.grid, 0.2, 0.5, o.grid);
    const std::vector<oracle::CheckReport> reports = {
        oracle::check_fewer_hunts(grid, base),
        oracle::check_more_free_days(grid, base),
        oracle::check_culture_advantage(grid, base),
        oracle::check_monotonicity(grid, o.grid, o.grid, base),
    };
    char line[200];
    std::snprintf(line, sizeof(line), "%-44s %8s %8s %11s  %s\n", "check", "pairs", "strict", "violations", "status");
    out << "grid " << o.grid << "x" << o.grid << " over Y in [1000, 3000], p in [0.2, 0.5]\n" << line;
    bool ok = true;
    for (const auto& r : reports) {
        std::snprintf(line, sizeof(line), "%-44s %8d %8d %11zu  %s\n", r.name.c_str(), r.pairs_checked,
                      r.strict_pairs_checked, r.violations.size(), r.passed() ? "PASS" : "FAIL");
        out << line;
        for (const auto& v : r.violations) {
            out << "  " << v.check << ": A=(" << shortest(v.a.yield) << ", " << shortest(v.a.spoilage) << ") "
                << shortest(v.value_a) << " vs B=(" << shortest(v.b.yield) << ", " << shortest(v.b.spoilage) << ") "
                << shortest(v.value_b) << '\n';
        }
        ok = ok && r.passed();
    }
    return ok ? 0 : 1;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Subsistence vs culture: environment, actor-critic training, sweeps and analysis", "forage"};
    app.set_config("--config", "", "Flat key = value file mirroring the long flags; flags override it");
    app.require_subcommand(1);

    Options o;
    app.add_option("--seed", o.seed, "Seed (master seed for sweep)");
    app.add_option("--profile", o.profile, "Preset: desk (100 agents, 30 episodes) or paper (1000, 50)")
        ->check(CLI::IsMember({"desk", "paper"}));
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--yield", o.yield, "Hunt yield Y (simulate, train)")->check(CLI::PositiveNumber);
    app.add_option("--spoilage", o.spoilage, "Daily spoilage p (simulate, train)")->check(CLI::Range(0.0, 1.0));
    app.add_option("--agents", o.agents, "Number of sweep agents")->check(CLI::PositiveNumber);
    app.add_option("--episodes", o.episodes, "Training episodes per agent")->check(CLI::NonNegativeNumber);
    app.add_option("--eval-runs", o.eval_runs, "Evaluation runs per agent")->check(CLI::PositiveNumber);
    app.add_option("--lr", o.lr, "Adam learning rate")->check(CLI::PositiveNumber);
    app.add_option("--jobs", o.jobs, "Worker threads for sweep")->check(CLI::PositiveNumber);
    app.add_option("--policy", o.policy, "simulate: hunt, invest, culture, random or greedy")
        ->check(CLI::IsMember({"hunt", "invest", "culture", "random", "greedy"}));
    app.add_option("--trace", o.trace, "simulate: write the trace here instead of stdout");
    app.add_option("--history", o.history, "train: write per-episode history CSV here");
    app.add_option("--results", o.results, "analyze: results.csv to read (default <out>/results.csv)");
    app.add_option("--grid", o.grid, "verify: grid points per axis");

    auto* simulate = app.add_subcommand("simulate", "Run one environment under a fixed policy, print a trace");
    auto* train = app.add_subcommand("train", "Train one agent and print its evaluation");
    auto* sweep_cmd = app.add_subcommand("sweep", "Train and evaluate one agent per sampled (Y, p)");
    auto* analyze = app.add_subcommand("analyze", "Regression report and figures from results.csv");
    auto* verify = app.add_subcommand("verify", "Check the hunting/free-time/culture orderings on a grid");
    for (auto* sc : {simulate, train, sweep_cmd, analyze, verify}) sc->fallthrough();

    std::vector<std::string> argv_store{"forage"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*simulate) return run_simulate(app, o, out);
        if (*train) return run_train(app, o, out);
        if (*sweep_cmd) return run_sweep_cmd(app, o, out, err);
        if (*analyze) return run_analyze(o, out);
        if (*verify) return run_verify(o, out);
    } catch (const std::exception& e) {
        err << "forage: error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace forage
