#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "forage/a2c.h"
#include "forage/env.h"
#include "forage/results.h"

namespace forage::sweep {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct SweepConfig {
    int n_agents = 100;
    Range yield_range{1000.0, 3000.0};
    Range spoilage_range{0.2, 0.5};
    std::uint64_t master_seed = 42;
    TrainConfig train{};
    EnvParams env{};
    std::filesystem::path out_dir = "out";
    int jobs = 1;
    std::string profile = "custom";

    void validate() const;
};

/// n = 100 agents, 30 episodes.
SweepConfig desk_profile();
/// n = 1000 agents, 50 episodes.
SweepConfig paper_profile();
/// "desk" or "paper"; throws std::invalid_argument otherwise.
SweepConfig profile(const std::string& name);

/// mix64(master_seed ^ mix64(agent_id + 0x9E3779B97F4A7C15))
std::uint64_t derive_agent_seed(std::uint64_t master_seed, int agent_id);

/// Uniform draws of Y then p from the agent's own stream.
std::pair<double, double> sample_params(const SweepConfig& config, int agent_id);

/// Sample, train, evaluate one agent. Divergence is recorded in the row.
AgentResult run_agent(const SweepConfig& config, int agent_id);

using Progress = std::function<void(int done, int total)>;

/// Rows ordered by agent_id whatever the worker count.
std::vector<AgentResult> run_sweep(const SweepConfig& config, const Progress& progress = {});

int diverged_count(const std::vector<AgentResult>& results);

/// Exit status policy: nonzero when more than 10% of agents diverged.
bool sweep_failed(const std::vector<AgentResult>& results);

inline constexpr const char* kResultsHeader = "agent_id,Y,p,mean_C,std_C,starvation_rate,agent_seed";

void write_results_csv(std::ostream& os, const std::vector<AgentResult>& results);
std::vector<AgentResult> read_results_csv(std::istream& is);

struct RunTimes {
    std::string started;
    std::string finished;
};

/// Writes results.csv and manifest.json under `dir`.
void write_results(const std::vector<AgentResult>& results, const SweepConfig& config,
                   const std::filesystem::path& dir, const RunTimes& times = {});

/// Reads results.csv; when a manifest.json sits beside it, episode counts
/// and divergence details are restored from it.
std::vector<AgentResult> read_results(const std::filesystem::path& csv_path);

std::string iso_timestamp_now();

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace forage::sweep
