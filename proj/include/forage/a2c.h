#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "forage/env.h"
#include "forage/mlp.h"

namespace forage {

struct TrainConfig {
    int episodes = 50;
    double gamma = 0.99;
    AdamConfig adam{};
    double clip_norm = 0.5;
    double entropy_coef = 0.01;
    int eval_runs = 100;
    double actor_output_gain = 0.01;
    double critic_output_gain = 1.0;

    void validate() const;
};

struct Transition {
    Observation obs{};
    Action action = Action::Hunt;
    double reward = 0.0;
    double value = 0.0;
    double next_value = 0.0;  // exactly 0 when the step ended the episode
    double log_prob = 0.0;
};

struct Trajectory {
    std::vector<Transition> steps;
    double total_reward = 0.0;
    double final_culture = 0.0;
    bool starved = false;

    std::size_t size() const { return steps.size(); }
    bool empty() const { return steps.empty(); }
};

struct EpisodeRecord {
    int episode = 0;
    double total_reward = 0.0;
    double final_culture = 0.0;
    bool starved = false;
};

struct TrainedAgent {
    Mlp actor;
    Mlp critic;
    std::vector<EpisodeRecord> history;
};

struct LossReport {
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double entropy = 0.0;
    double actor_grad_norm = 0.0;   // before clipping
    double critic_grad_norm = 0.0;  // before clipping
};

struct EvalResult {
    double mean_culture = 0.0;
    double std_culture = 0.0;  // sample standard deviation; 0 for a single run
    double starvation_rate = 0.0;
};

/// Divergence raised during training, tagged with the failing episode.
class TrainingDiverged : public DivergenceError {
public:
    TrainingDiverged(int episode, const std::string& what);
    int episode() const { return episode_; }

private:
    int episode_;
};

/// Fresh actor (obs -> 3 logits) and critic (obs -> 1 value).
TrainedAgent make_agent(const TrainConfig& config, Rng& rng);

/// Rolls out one episode from reset(), sampling from softmax(actor logits).
Trajectory collect_episode(const EnvParams& env, const Mlp& actor, const Mlp& critic, Rng& rng);

/// One-step TD advantages R_t + gamma V(s_{t+1}) - V(s_t).
std::vector<double> compute_advantages(const Trajectory& traj, double gamma);

/// One clipped Adam step for each network from a single episode.
/// `episode` only labels divergence errors.
LossReport update(Mlp& actor, Mlp& critic, const Trajectory& traj, const TrainConfig& config, int episode = 0);

/// Deterministic in (env, config, seed).
TrainedAgent train_agent(const EnvParams& env, const TrainConfig& config, std::uint64_t seed);

/// Frozen-policy evaluation. Final C is taken at termination, starved runs
/// included.
EvalResult evaluate(const Mlp& actor, const EnvParams& env, int eval_runs, std::uint64_t seed);
EvalResult evaluate(const TrainedAgent& agent, const EnvParams& env, int eval_runs, std::uint64_t seed);

/// Network whose softmax is exactly uniform over the actions.
Mlp uniform_policy();

/// Columns: episode,total_reward,final_C,starved
void write_history_csv(std::ostream& os, const std::vector<EpisodeRecord>& history);

}  // namespace forage
