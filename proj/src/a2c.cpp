#include "forage/a2c.h"

#include <cmath>
#include <ostream>
#include <string>

namespace forage {

namespace {

int sample_index(const Eigen::VectorXd& probs, Rng& rng) {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        acc += probs(i);
        if (u < acc) return static_cast<int>(i);
    }
    // u landed in the rounding slack above the cumulative sum.
    for (Eigen::Index i = probs.size(); i-- > 0;) {
        if (probs(i) > 0.0) return static_cast<int>(i);
    }
    return 0;
}

struct Rollout {
    Trajectory traj;
    EnvState final_state;
};

Rollout rollout(const EnvParams& env, const Mlp& actor, const Mlp* critic, Rng& rng) {
    Rollout out;
    EnvState state = reset(env);
    Observation obs = observe(state, env);
    double value = critic ? critic->forward(obs)(0) : 0.0;
    while (!state.finished()) {
        const Eigen::VectorXd probs = softmax(actor.forward(obs));
        const int a = sample_index(probs, rng);
        Transition tr;
        tr.obs = obs;
        tr.action = action_from_index(a);
        tr.value = value;
        tr.log_prob = std::log(probs(a));
        const StepOutcome res = step(state, env, tr.action, &rng);
        tr.reward = res.reward;
        obs = observe(state, env);
        if (res.terminal) {
            tr.next_value = 0.0;
        } else {
            value = critic ? critic->forward(obs)(0) : 0.0;
            tr.next_value = value;
        }
        out.traj.total_reward += tr.reward;
        out.traj.steps.push_back(tr);
    }
    out.traj.final_culture = state.culture;
    out.traj.starved = state.cause == TerminalCause::Starved;
    out.final_state = state;
    return out;
}

}  // namespace

void TrainConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("TrainConfig: " + what); };
    if (episodes < 0) fail("episodes must be >= 0");
    if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must lie in (0, 1]");
    if (!(adam.lr > 0.0)) fail("lr must be > 0");
    if (!(clip_norm > 0.0)) fail("clip_norm must be > 0");
    if (!(entropy_coef >= 0.0)) fail("entropy_coef must be >= 0");
    if (eval_runs < 1) fail("eval_runs must be >= 1");
}

TrainingDiverged::TrainingDiverged(int episode, const std::string& what)
    : DivergenceError("episode " + std::to_string(episode) + ": " + what), episode_(episode) {}

TrainedAgent make_agent(const TrainConfig& config, Rng& rng) {
    TrainedAgent agent;
    agent.actor = Mlp::orthogonal(kObsSize, kNumActions, config.actor_output_gain, rng);
    agent.critic = Mlp::orthogonal(kObsSize, 1, config.critic_output_gain, rng);
    return agent;
}

Trajectory collect_episode(const EnvParams& env, const Mlp& actor, const Mlp& critic, Rng& rng) {
    return rollout(env, actor, &critic, rng).traj;
}

std::vector<double> compute_advantages(const Trajectory& traj, double gamma) {
    std::vector<double> adv;
    adv.reserve(traj.size());
    for (const auto& s : traj.steps) adv.push_back(s.reward + gamma * s.next_value - s.value);
    return adv;
}

LossReport update(Mlp& actor, Mlp& critic, const Trajectory& traj, const TrainConfig& config, int episode) {
    LossReport report;
    if (traj.empty()) return report;
    const std::vector<double> adv = compute_advantages(traj, config.gamma);
    const double inv_n = 1.0 / static_cast<double>(traj.size());

    Gradients g_actor = actor.zero_gradients();
    Gradients g_critic = critic.zero_gradients();
    ForwardCache cache;
    for (std::size_t t = 0; t < traj.size(); ++t) {
        const Transition& tr = traj.steps[t];
        const int a = static_cast<int>(tr.action);

        const Eigen::VectorXd logits = actor.forward(tr.obs, cache);
        const Eigen::VectorXd probs = softmax(logits);
        const Eigen::VectorXd log_probs = probs.array().log().matrix();
        const double entropy = -probs.dot(log_probs);
        report.actor_loss -= log_probs(a) * adv[t] * inv_n;
        report.actor_loss -= config.entropy_coef * entropy * inv_n;
        report.entropy += entropy * inv_n;

        // d/dz of -A log pi(a) is -A (onehot(a) - p); d/dz of -beta H is
        // beta p (log p + H).
        Eigen::VectorXd d_logits = probs * adv[t];
        d_logits(a) -= adv[t];
        if (config.entropy_coef > 0.0) {
            d_logits += config.entropy_coef * probs.cwiseProduct((log_probs.array() + entropy).matrix());
        }
        d_logits *= inv_n;
        g_actor += actor.backward(cache, d_logits);

        const double v = critic.forward(tr.obs, cache)(0);
        const double target = tr.reward + config.gamma * tr.next_value;
        const double resid = v - target;
        report.critic_loss += resid * resid * inv_n;
        Eigen::VectorXd d_v(1);
        d_v(0) = 2.0 * resid * inv_n;
        g_critic += critic.backward(cache, d_v);
    }

    if (!std::isfinite(report.actor_loss) || !std::isfinite(report.critic_loss) || !g_actor.all_finite() ||
        !g_critic.all_finite()) {
        throw TrainingDiverged(episode, "non-finite loss or gradient");
    }
    report.actor_grad_norm = clip_global_norm(g_actor, config.clip_norm);
    report.critic_grad_norm = clip_global_norm(g_critic, config.clip_norm);
    actor.adam_step(g_actor, config.adam);
    critic.adam_step(g_critic, config.adam);
    return report;
}

TrainedAgent train_agent(const EnvParams& env, const TrainConfig& config, std::uint64_t seed) {
    config.validate();
    env.validate();
    Rng rng(mix64(seed));
    TrainedAgent agent = make_agent(config, rng);
    agent.history.reserve(static_cast<std::size_t>(config.episodes));
    for (int ep = 0; ep < config.episodes; ++ep) {
        Trajectory traj;
        try {
            traj = collect_episode(env, agent.actor, agent.critic, rng);
        } catch (const TrainingDiverged&) {
            throw;
        } catch (const DivergenceError& e) {
            throw TrainingDiverged(ep, e.what());
        }
        update(agent.actor, agent.critic, traj, config, ep);
        agent.history.push_back({ep, traj.total_reward, traj.final_culture, traj.starved});
    }
    return agent;
}

EvalResult evaluate(const Mlp& actor, const EnvParams& env, int eval_runs, std::uint64_t seed) {
    if (eval_runs < 1) throw std::invalid_argument("evaluate: eval_runs must be >= 1");
    Rng rng(mix64(seed));
    std::vector<double> finals;
    finals.reserve(static_cast<std::size_t>(eval_runs));
    int starved = 0;
    for (int r = 0; r < eval_runs; ++r) {
        const Rollout ro = rollout(env, actor, nullptr, rng);
        finals.push_back(ro.final_state.culture);
        if (ro.traj.starved) ++starved;
    }
    EvalResult res;
    double sum = 0.0;
    for (double c : finals) sum += c;
    res.mean_culture = sum / eval_runs;
    if (eval_runs > 1) {
        double ss = 0.0;
        for (double c : finals) ss += (c - res.mean_culture) * (c - res.mean_culture);
        res.std_culture = std::sqrt(ss / (eval_runs - 1));
    }
    res.starvation_rate = static_cast<double>(starved) / eval_runs;
    return res;
}

EvalResult evaluate(const TrainedAgent& agent, const EnvParams& env, int eval_runs, std::uint64_t seed) {
    return evaluate(agent.actor, env, eval_runs, seed);
}

Mlp uniform_policy() { return Mlp({kObsSize, kHiddenWidth, kHiddenWidth, kNumActions}); }

void write_history_csv(std::ostream& os, const std::vector<EpisodeRecord>& history) {
    os << "episode,total_reward,final_C,starved\n";
    for (const auto& h : history) {
        os << h.episode << ',' << h.total_reward << ',' << h.final_culture << ',' << (h.starved ? 1 : 0) << '\n';
    }
}

}  // namespace forage
