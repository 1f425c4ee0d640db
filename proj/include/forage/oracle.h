#pragma once

#include <string>
#include <vector>

#include "forage/env.h"

namespace forage::oracle {

struct GreedyOutcome {
    int hunts = 0;
    int hunting_days = 0;
    int free_days = 0;
    int attainable_culture = 0;
    bool survived = false;

    bool operator==(const GreedyOutcome&) const = default;
};

/// True when `food` cannot carry the group through min(d_h + 1,
/// days_remaining) more days of consumption and spoilage.
bool should_hunt(double food, int days_remaining, const EnvParams& params);

/// Hunt-only-when-needed schedule; every other day goes to Culture and G
/// stays 0. With `culture_feedback` off each hunt yields exactly Y; with it
/// on the yield is Y (1 + 0.01 C) using the culture accumulated so far.
GreedyOutcome greedy_run(const EnvParams& params, bool culture_feedback = false);

struct GridPoint {
    double yield = 0.0;
    double spoilage = 0.0;
};

/// n_yield x n_spoilage evenly spaced grid, endpoints included.
std::vector<GridPoint> make_grid(double y_lo, double y_hi, int n_yield, double p_lo, double p_hi, int n_spoilage);

struct Violation {
    GridPoint a;
    GridPoint b;
    std::string check;
    double value_a = 0.0;
    double value_b = 0.0;
};

struct CheckReport {
    std::string name;
    int pairs_checked = 0;
    int strict_pairs_checked = 0;
    int environments_checked = 0;
    std::vector<Violation> violations;

    bool passed() const { return violations.empty(); }
};

/// Pairs (A, B) qualify when Y_A > Y_B and p_A < p_B. Strictness is demanded
/// on pairs separated by at least these gaps.
struct Separation {
    double min_yield_gap = 500.0;
    double min_spoilage_gap = 0.1;
};

/// H_A <= H_B on every qualifying pair, H_A < H_B on separated ones.
CheckReport check_fewer_hunts(const std::vector<GridPoint>& grid, const EnvParams& base = {},
                                Separation sep = {});

/// free_A >= free_B (hunting time), strict on separated pairs.
CheckReport check_more_free_days(const std::vector<GridPoint>& grid, const EnvParams& base = {},
                                Separation sep = {});

/// C_A >= C_B on qualifying pairs (strict on separated ones), and per
/// environment the culture feedback never lowers attainable C.
CheckReport check_culture_advantage(const std::vector<GridPoint>& grid, const EnvParams& base = {}, Separation sep = {});

/// H non-increasing in Y along each p row, non-decreasing in p along each Y
/// column. `grid` must come from make_grid with the same dimensions.
CheckReport check_monotonicity(const std::vector<GridPoint>& grid, int n_yield, int n_spoilage,
                               const EnvParams& base = {});

}  // namespace forage::oracle
