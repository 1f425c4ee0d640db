#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

#include "forage/errors.h"
#include "forage/random.h"

namespace forage {

enum class SpoilageMode {
    Multiplicative,  // f' = (f - c)(1 - p) every day
    Bernoulli,       // with probability p the whole remaining stock is lost
};

enum class ObsScaling {
    Scaled,  // 0.1*G and C/T
    Raw,     // G and C as-is
};

struct EnvParams {
    double yield_base = 2000.0;
    double spoilage = 0.3;
    double consumption = 10.0;
    int horizon = 365;
    double requirement = 3650.0;
    int hunt_days = 2;
    int invest_days = 1;
    int culture_days = 1;
    double skill_increment = 1.0;
    double initial_food = 100.0;
    double culture_reward = 5.0;
    double starvation_penalty = -100.0;
    double yield_norm = 3000.0;
    SpoilageMode spoilage_mode = SpoilageMode::Multiplicative;
    ObsScaling obs_scaling = ObsScaling::Scaled;

    /// Default parameters with the given yield and spoilage. The annual
    /// requirement tracks consumption * horizon.
    static EnvParams with(double yield, double spoilage);

    /// Throws std::invalid_argument naming the first bad field.
    void validate() const;
};

enum class Action : int { Hunt = 0, Invest = 1, Culture = 2 };

inline constexpr int kNumActions = 3;

Action action_from_index(int index);
std::string_view action_name(Action a);

enum class TerminalCause { None, Starved, HorizonReached };

struct EnvState {
    int day = 0;
    double food = 0.0;
    double skill = 0.0;
    double culture = 0.0;
    bool alive = true;
    TerminalCause cause = TerminalCause::None;

    bool finished() const { return cause != TerminalCause::None; }

    bool operator==(const EnvState&) const = default;
};

struct DayOutcome {
    EnvState state;
    bool terminal = false;
};

struct StepOutcome {
    double reward = 0.0;
    int days_elapsed = 0;
    bool terminal = false;
    TerminalCause cause = TerminalCause::None;
};

inline constexpr int kObsSize = 6;
using Observation = std::array<double, kObsSize>;

/// Y * (1 + 0.1 G) * (1 + 0.01 C)
double effective_yield(const EnvParams& params, double skill, double culture);

EnvState reset(const EnvParams& params);

/// One day of consumption followed by spoilage. The group starves when the
/// day's ration exceeds the stock, i.e. when f - c < 0; for p < 1 this is
/// the same as the post-spoilage stock being negative. `rng` is only
/// consulted in Bernoulli spoilage mode.
DayOutcome advance_one_day(const EnvState& state, const EnvParams& params, Rng* rng = nullptr);

/// Applies one action in place. Hunts that starve midway or run past the
/// horizon yield nothing.
StepOutcome step(EnvState& state, const EnvParams& params, Action action, Rng* rng = nullptr);

Observation observe(const EnvState& state, const EnvParams& params);

std::string_view cause_name(TerminalCause cause);

}  // namespace forage
