#include "forage/sweep.h"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "forage/format.h"

namespace forage::sweep {

namespace {

using nlohmann::json;

// Stream tags so the evaluation draws never overlap the training ones.
constexpr std::uint64_t kEvalStream = 0x5BD1E9955BD1E995ULL;

json env_to_json(const EnvParams& e) {
    return {
        {"consumption", e.consumption},
        {"horizon", e.horizon},
        {"requirement", e.requirement},
        {"hunt_days", e.hunt_days},
        {"invest_days", e.invest_days},
        {"culture_days", e.culture_days},
        {"skill_increment", e.skill_increment},
        {"initial_food", e.initial_food},
        {"culture_reward", e.culture_reward},
        {"starvation_penalty", e.starvation_penalty},
        {"yield_norm", e.yield_norm},
        {"spoilage_mode", e.spoilage_mode == SpoilageMode::Bernoulli ? "bernoulli" : "multiplicative"},
        {"obs_scaling", e.obs_scaling == ObsScaling::Raw ? "raw" : "scaled"},
    };
}

json train_to_json(const TrainConfig& t) {
    return {
        {"episodes", t.episodes},
        {"gamma", t.gamma},
        {"lr", t.adam.lr},
        {"beta1", t.adam.beta1},
        {"beta2", t.adam.beta2},
        {"adam_eps", t.adam.eps},
        {"clip_norm", t.clip_norm},
        {"entropy_coef", t.entropy_coef},
        {"eval_runs", t.eval_runs},
        {"actor_output_gain", t.actor_output_gain},
        {"critic_output_gain", t.critic_output_gain},
    };
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

void SweepConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("SweepConfig: " + what); };
    if (n_agents < 1) fail("n_agents must be >= 1");
    if (!(yield_range.lo <= yield_range.hi)) fail("yield range out of order");
    if (!(spoilage_range.lo <= spoilage_range.hi)) fail("spoilage range out of order");
    if (!(yield_range.lo > 0.0)) fail("yield range must be positive");
    if (!(spoilage_range.lo >= 0.0 && spoilage_range.hi <= 1.0)) fail("spoilage range must lie in [0, 1]");
    if (jobs < 1) fail("jobs must be >= 1");
    train.validate();
}

SweepConfig desk_profile() {
    SweepConfig c;
    c.n_agents = 100;
    c.train.episodes = 30;
    c.profile = "desk";
    return c;
}

SweepConfig paper_profile() {
    SweepConfig c;
    c.n_agents = 1000;
    c.train.episodes = 50;
    c.profile = "paper";
    return c;
}

SweepConfig profile(const std::string& name) {
    if (name == "desk") return desk_profile();
    if (name == "paper") return paper_profile();
    throw std::invalid_argument("unknown profile '" + name + "' (expected desk or paper)");
}

std::uint64_t derive_agent_seed(std::uint64_t master_seed, int agent_id) {
    return mix64(master_seed ^ mix64(static_cast<std::uint64_t>(agent_id) + 0x9E3779B97F4A7C15ULL));
}

std::pair<double, double> sample_params(const SweepConfig& config, int agent_id) {
    Rng rng(derive_agent_seed(config.master_seed, agent_id));
    const double y = uniform(rng, config.yield_range.lo, config.yield_range.hi);
    const double p = uniform(rng, config.spoilage_range.lo, config.spoilage_range.hi);
    return {y, p};
}

AgentResult run_agent(const SweepConfig& config, int agent_id) {
    AgentResult row;
    row.agent_id = agent_id;
    row.agent_seed = derive_agent_seed(config.master_seed, agent_id);
    std::tie(row.yield, row.spoilage) = sample_params(config, agent_id);
    EnvParams env = config.env;
    env.yield_base = row.yield;
    env.spoilage = row.spoilage;
    try {
        const TrainedAgent agent = train_agent(env, config.train, row.agent_seed);
        const EvalResult ev = evaluate(agent, env, config.train.eval_runs, row.agent_seed ^ kEvalStream);
        row.mean_culture = ev.mean_culture;
        row.std_culture = ev.std_culture;
        row.starvation_rate = ev.starvation_rate;
        row.episodes_trained = static_cast<int>(agent.history.size());
    } catch (const TrainingDiverged& e) {
        row.diverged = true;
        row.episodes_trained = e.episode();
    } catch (const DivergenceError&) {
        row.diverged = true;
        row.episodes_trained = config.train.episodes;
    }
    if (row.diverged) {
        row.mean_culture = kDivergedSentinel;
        row.std_culture = kDivergedSentinel;
        row.starvation_rate = kDivergedSentinel;
    }
    return row;
}

std::vector<AgentResult> run_sweep(const SweepConfig& config, const Progress& progress) {
    config.validate();
    config.env.validate();
    const int n = config.n_agents;
    std::vector<AgentResult> results(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    std::atomic<int> done{0};
    std::mutex progress_mu;

    auto worker = [&] {
        for (int id = next.fetch_add(1); id < n; id = next.fetch_add(1)) {
            // Each slot is written by exactly one worker.
            results[static_cast<std::size_t>(id)] = run_agent(config, id);
            const int finished = done.fetch_add(1) + 1;
            if (progress) {
                std::lock_guard lock(progress_mu);
                progress(finished, n);
            }
        }
    };

    const int workers = std::min(config.jobs, n);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    return results;
}

int diverged_count(const std::vector<AgentResult>& results) {
    int n = 0;
    for (const auto& r : results) n += r.diverged ? 1 : 0;
    return n;
}

bool sweep_failed(const std::vector<AgentResult>& results) {
    return !results.empty() && 10 * diverged_count(results) > static_cast<int>(results.size());
}

void write_results_csv(std::ostream& os, const std::vector<AgentResult>& results) {
    os << kResultsHeader << '\n';
    for (const auto& r : results) {
        os << r.agent_id << ',' << shortest(r.yield) << ',' << shortest(r.spoilage) << ',' << shortest(r.mean_culture)
           << ',' << shortest(r.std_culture) << ',' << shortest(r.starvation_rate) << ',' << r.agent_seed << '\n';
    }
}

std::vector<AgentResult> read_results_csv(std::istream& is) {
    std::vector<AgentResult> out;
    std::string line;
    int line_no = 0;
    if (!std::getline(is, line)) throw std::runtime_error("results CSV: missing header");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kResultsHeader) throw std::runtime_error("results CSV line 1: unexpected header '" + line + "'");
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        auto bad = [&](const std::string& why) {
            return std::runtime_error("results CSV line " + std::to_string(line_no) + ": " + why);
        };
        if (f.size() != 7) throw bad("expected 7 fields, got " + std::to_string(f.size()));
        AgentResult r;
        try {
            std::size_t pos = 0;
            r.agent_id = std::stoi(f[0], &pos);
            if (pos != f[0].size()) throw std::invalid_argument("agent_id");
            r.yield = parse_double(f[1]);
            r.spoilage = parse_double(f[2]);
            r.mean_culture = parse_double(f[3]);
            r.std_culture = parse_double(f[4]);
            r.starvation_rate = parse_double(f[5]);
            r.agent_seed = std::stoull(f[6], &pos);
            if (pos != f[6].size()) throw std::invalid_argument("agent_seed");
        } catch (const std::exception& e) {
            throw bad(std::string("malformed field (") + e.what() + ")");
        }
        r.diverged = r.mean_culture == kDivergedSentinel;
        out.push_back(r);
    }
    return out;
}

std::string iso_timestamp_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_results(const std::vector<AgentResult>& results, const SweepConfig& config,
                   const std::filesystem::path& dir, const RunTimes& times) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

    const auto csv_path = dir / "results.csv";
    {
        std::ofstream os(csv_path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + csv_path.string() + " for writing");
        write_results_csv(os, results);
        if (!os) throw std::runtime_error("write failed: " + csv_path.string());
    }

    json diverged = json::array();
    for (const auto& r : results) {
        if (r.diverged) diverged.push_back({{"agent_id", r.agent_id}, {"episode", r.episodes_trained}});
    }
    const json manifest = {
        {"tool", "forage"},
        {"version", kToolVersion},
        {"master_seed", config.master_seed},
        {"profile", config.profile},
        {"n_agents", config.n_agents},
        {"yield_range", {config.yield_range.lo, config.yield_range.hi}},
        {"spoilage_range", {config.spoilage_range.lo, config.spoilage_range.hi}},
        {"jobs", config.jobs},
        {"train", train_to_json(config.train)},
        {"env", env_to_json(config.env)},
        {"diverged", diverged},
        {"started", times.started},
        {"finished", times.finished},
    };
    const auto manifest_path = dir / "manifest.json";
    std::ofstream ms(manifest_path);
    if (!ms) throw std::runtime_error("cannot open " + manifest_path.string() + " for writing");
    ms << manifest.dump(2) << '\n';
    if (!ms) throw std::runtime_error("write failed: " + manifest_path.string());
}

std::vector<AgentResult> read_results(const std::filesystem::path& csv_path) {
    std::ifstream is(csv_path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + csv_path.string());
    std::vector<AgentResult> results;
    try {
        results = read_results_csv(is);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(csv_path.string() + ": " + e.what());
    }

    const auto manifest_path = csv_path.parent_path() / "manifest.json";
    std::ifstream ms(manifest_path);
    if (!ms) return results;
    json manifest;
    try {
        manifest = json::parse(ms);
    } catch (const json::exception& e) {
        throw std::runtime_error(manifest_path.string() + ": " + e.what());
    }
    const int episodes = manifest.at("train").at("episodes").get<int>();
    for (auto& r : results) r.episodes_trained = episodes;
    for (const auto& d : manifest.at("diverged")) {
        const int id = d.at("agent_id").get<int>();
        for (auto& r : results) {
            if (r.agent_id == id) r.episodes_trained = d.at("episode").get<int>();
        }
    }
    return results;
}

}  // namespace forage::sweep
