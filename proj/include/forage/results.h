#pragma once

#include <cstdint>

namespace forage {

/// One sweep row: the environment an agent was trained in and how its
/// frozen policy scored.
struct AgentResult {
    int agent_id = 0;
    double yield = 0.0;
    double spoilage = 0.0;
    double mean_culture = 0.0;
    double std_culture = 0.0;
    double starvation_rate = 0.0;
    int episodes_trained = 0;
    std::uint64_t agent_seed = 0;
    bool diverged = false;

    bool operator==(const AgentResult&) const = default;
};

/// Value written to mean_C, std_C and starvation_rate for agents whose
/// training diverged.
inline constexpr double kDivergedSentinel = -1.0;

}  // namespace forage
