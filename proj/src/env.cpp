#include "forage/env.h"

#include <algorithm>

namespace forage {

EnvParams EnvParams::with(double yield, double spoilage) {
    EnvParams p;
    p.yield_base = yield;
    p.spoilage = spoilage;
    p.requirement = p.consumption * p.horizon;
    return p;
}

void EnvParams::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("EnvParams: " + what); };
    if (!(yield_base > 0.0)) fail("yield_base must be > 0");
    if (!(spoilage >= 0.0 && spoilage <= 1.0)) fail("spoilage must lie in [0, 1]");
    if (!(consumption > 0.0)) fail("consumption must be > 0");
    if (horizon < 0) fail("horizon must be >= 0");
    if (!(requirement > 0.0)) fail("requirement must be > 0");
    if (hunt_days < 1 || invest_days < 1 || culture_days < 1) fail("action costs must be >= 1 day");
    if (!(skill_increment >= 0.0)) fail("skill_increment must be >= 0");
    if (!(initial_food >= 0.0)) fail("initial_food must be >= 0");
    if (!(yield_norm > 0.0)) fail("yield_norm must be > 0");
}

Action action_from_index(int index) {
    if (index < 0 || index >= kNumActions) {
        throw ContractError("action index out of range: " + std::to_string(index));
    }
    return static_cast<Action>(index);
}

std::string_view action_name(Action a) {
    switch (a) {
        case Action::Hunt: return "hunt";
        case Action::Invest: return "invest";
        case Action::Culture: return "culture";
    }
    return "?";
}

std::string_view cause_name(TerminalCause cause) {
    switch (cause) {
        case TerminalCause::None: return "none";
        case TerminalCause::Starved: return "starved";
        case TerminalCause::HorizonReached: return "horizon";
    }
    return "?";
}

double effective_yield(const EnvParams& params, double skill, double culture) {
    return params.yield_base * (1.0 + 0.1 * skill) * (1.0 + 0.01 * culture);
}

EnvState reset(const EnvParams& params) {
    EnvState s;
    s.food = params.initial_food;
    // A zero-day horizon is finished before it starts.
    if (params.horizon == 0) {
        s.alive = false;
        s.cause = TerminalCause::HorizonReached;
    }
    return s;
}

DayOutcome advance_one_day(const EnvState& state, const EnvParams& params, Rng* rng) {
    if (!state.alive || state.finished() || state.day >= params.horizon) {
        throw ContractError("advance_one_day on a finished episode");
    }
    DayOutcome out{state, false};
    EnvState& s = out.state;
    const double remaining = s.food - params.consumption;
    if (params.spoilage_mode == SpoilageMode::Multiplicative) {
        s.food = remaining * (1.0 - params.spoilage);
    } else {
        if (rng == nullptr) throw ContractError("Bernoulli spoilage requires an RNG");
        const bool spoiled = uniform01(*rng) < params.spoilage;
        s.food = (spoiled && remaining >= 0.0) ? 0.0 : remaining;
    }
    s.day += 1;
    if (remaining < 0.0) {
        s.alive = false;
        s.cause = TerminalCause::Starved;
        out.terminal = true;
    } else if (s.day >= params.horizon) {
        s.alive = false;
        s.cause = TerminalCause::HorizonReached;
        out.terminal = true;
    }
    return out;
}

StepOutcome step(EnvState& state, const EnvParams& params, Action action, Rng* rng) {
    if (!state.alive || state.finished()) {
        throw ContractError("step on a finished episode");
    }
    StepOutcome out;
    auto run_day = [&] {
        DayOutcome d = advance_one_day(state, params, rng);
        state = d.state;
        out.days_elapsed += 1;
        if (d.terminal) {
            out.terminal = true;
            out.cause = state.cause;
        }
        return !d.terminal || state.cause == TerminalCause::HorizonReached;
    };

    // Runs `days` days; true when every day was lived through, the last one
    // possibly ending at the horizon.
    auto complete_days = [&](int days) {
        for (int d = 0; d < days; ++d) {
            if (!run_day()) return false;
            if (out.terminal && d + 1 < days) return false;
        }
        return true;
    };

    switch (action) {
        case Action::Hunt:
            if (complete_days(params.hunt_days)) {
                state.food += effective_yield(params, state.skill, state.culture);
            }
            break;
        case Action::Invest:
            if (complete_days(params.invest_days)) state.skill += params.skill_increment;
            break;
        case Action::Culture:
            if (complete_days(params.culture_days)) {
                state.culture += 1.0;
                out.reward += params.culture_reward;
            }
            break;
    }
    if (out.cause == TerminalCause::Starved) out.reward += params.starvation_penalty;
    return out;
}

Observation observe(const EnvState& state, const EnvParams& params) {
    const double horizon = params.horizon > 0 ? static_cast<double>(params.horizon) : 1.0;
    const bool scaled = params.obs_scaling == ObsScaling::Scaled;
    return {
        std::max(state.food, 0.0) / params.requirement,
        scaled ? 0.1 * state.skill : state.skill,
        scaled ? state.culture / horizon : state.culture,
        static_cast<double>(params.horizon - state.day) / horizon,
        params.yield_base / params.yield_norm,
        params.spoilage,
    };
}

}  // namespace forage
