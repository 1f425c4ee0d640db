#include "forage/oracle.h"

#include <algorithm>
#include <functional>
#include <limits>

namespace forage::oracle {

namespace {

// Outcome of one scalar day: false when the ration exceeds the stock.
bool live_day(double& food, const EnvParams& params) {
    const double after = food - params.consumption;
    food = after * (1.0 - params.spoilage);
    return after >= 0.0;
}

// A starved run is infeasible: it ranks below every survivor.
double hunts_score(const GreedyOutcome& g) {
    return g.survived ? g.hunts : std::numeric_limits<double>::infinity();
}
double free_score(const GreedyOutcome& g) { return g.survived ? g.free_days : -1.0; }
double culture_score(const GreedyOutcome& g) { return g.survived ? g.attainable_culture : -1.0; }

bool qualifies(const GridPoint& a, const GridPoint& b) { return a.yield > b.yield && a.spoilage < b.spoilage; }

bool separated(const GridPoint& a, const GridPoint& b, const Separation& sep) {
    // Tolerance absorbs rounding in grid construction.
    constexpr double slack = 1e-9;
    return a.yield - b.yield >= sep.min_yield_gap - slack && b.spoilage - a.spoilage >= sep.min_spoilage_gap - slack;
}

EnvParams at(const EnvParams& base, const GridPoint& g) {
    EnvParams p = base;
    p.yield_base = g.yield;
    p.spoilage = g.spoilage;
    return p;
}

std::vector<GreedyOutcome> run_all(const std::vector<GridPoint>& grid, const EnvParams& base, bool feedback) {
    std::vector<GreedyOutcome> out;
    out.reserve(grid.size());
    for (const auto& g : grid) out.push_back(greedy_run(at(base, g), feedback));
    return out;
}

using Score = std::function<double(const GreedyOutcome&)>;

// Weak comparison on every qualifying pair, strict on separated ones.
void compare_pairs(CheckReport& report, const std::vector<GridPoint>& grid, const std::vector<GreedyOutcome>& runs,
                   const Separation& sep, const std::string& label, const Score& score, bool lower_is_better) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (!qualifies(grid[i], grid[j])) continue;
            const double a = score(runs[i]);
            const double b = score(runs[j]);
            const bool weak = lower_is_better ? a <= b : a >= b;
            ++report.pairs_checked;
            if (!weak) {
                report.violations.push_back({grid[i], grid[j], label, a, b});
                continue;
            }
            if (separated(grid[i], grid[j], sep)) {
                ++report.strict_pairs_checked;
                const bool strict = lower_is_better ? a < b : a > b;
                if (!strict) report.violations.push_back({grid[i], grid[j], label + " (strict)", a, b});
            }
        }
    }
}

}  // namespace

bool should_hunt(double food, int days_remaining, const EnvParams& params) {
    const int lookahead = std::min(params.hunt_days + 1, days_remaining);
    for (int d = 0; d < lookahead; ++d) {
        if (!live_day(food, params)) return true;
    }
    return false;
}

GreedyOutcome greedy_run(const EnvParams& params, bool culture_feedback) {
    params.validate();
    GreedyOutcome out;
    double food = params.initial_food;
    int day = 0;
    bool alive = true;
    while (alive && day < params.horizon) {
        const int remaining = params.horizon - day;
        if (!should_hunt(food, remaining, params)) {
            alive = live_day(food, params);
            ++day;
            if (alive) ++out.attainable_culture;
            continue;
        }
        if (remaining < params.hunt_days) {
            // A hunt cannot finish; the remaining days are lived on stock.
            while (alive && day < params.horizon) {
                alive = live_day(food, params);
                ++day;
            }
            break;
        }
        for (int d = 0; d < params.hunt_days && alive; ++d) {
            alive = live_day(food, params);
            ++day;
        }
        if (!alive) break;
        ++out.hunts;
        const double culture = culture_feedback ? static_cast<double>(out.attainable_culture) : 0.0;
        food += effective_yield(params, 0.0, culture);
    }
    out.survived = alive;
    out.hunting_days = out.hunts * params.hunt_days;
    out.free_days = out.survived ? params.horizon - out.hunting_days : out.attainable_culture;
    return out;
}

std::vector<GridPoint> make_grid(double y_lo, double y_hi, int n_yield, double p_lo, double p_hi, int n_spoilage) {
    if (n_yield < 1 || n_spoilage < 1) throw std::invalid_argument("make_grid: sizes must be >= 1");
    auto lerp = [](double lo, double hi, int i, int n) {
        return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    std::vector<GridPoint> grid;
    grid.reserve(static_cast<std::size_t>(n_yield) * n_spoilage);
    for (int j = 0; j < n_spoilage; ++j) {
        for (int i = 0; i < n_yield; ++i) grid.push_back({lerp(y_lo, y_hi, i, n_yield), lerp(p_lo, p_hi, j, n_spoilage)});
    }
    return grid;
}

CheckReport check_fewer_hunts(const std::vector<GridPoint>& grid, const EnvParams& base, Separation sep) {
    if (grid.empty()) throw std::invalid_argument("check_fewer_hunts: empty grid");
    CheckReport report;
    report.name = "fewer hunts (H_A <= H_B)";
    const auto runs = run_all(grid, base, false);
    report.environments_checked = static_cast<int>(grid.size());
    compare_pairs(report, grid, runs, sep, "hunts", hunts_score, true);
    return report;
}

CheckReport check_more_free_days(const std::vector<GridPoint>& grid, const EnvParams& base, Separation sep) {
    if (grid.empty()) throw std::invalid_argument("check_more_free_days: empty grid");
    CheckReport report;
    report.name = "more free days (T_free,A >= T_free,B)";
    const auto runs = run_all(grid, base, false);
    report.environments_checked = static_cast<int>(grid.size());
    compare_pairs(report, grid, runs, sep, "free_days", free_score, false);
    return report;
}

CheckReport check_culture_advantage(const std::vector<GridPoint>& grid, const EnvParams& base, Separation sep) {
    if (grid.empty()) throw std::invalid_argument("check_culture_advantage: empty grid");
    CheckReport report;
    report.name = "culture advantage (C_A >= C_B, feedback)";
    const auto runs = run_all(grid, base, false);
    report.environments_checked = static_cast<int>(grid.size());
    compare_pairs(report, grid, runs, sep, "free_days", free_score, false);
    compare_pairs(report, grid, runs, sep, "attainable_C", culture_score, false);

    const auto with_feedback = run_all(grid, base, true);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double on = culture_score(with_feedback[i]);
        const double off = culture_score(runs[i]);
        if (on < off) report.violations.push_back({grid[i], grid[i], "feedback lowers attainable_C", on, off});
    }
    return report;
}

CheckReport check_monotonicity(const std::vector<GridPoint>& grid, int n_yield, int n_spoilage,
                               const EnvParams& base) {
    if (grid.size() != static_cast<std::size_t>(n_yield) * n_spoilage) {
        throw std::invalid_argument("check_monotonicity: grid does not match dimensions");
    }
    CheckReport report;
    report.name = "hunts monotone in Y and p";
    const auto runs = run_all(grid, base, false);
    report.environments_checked = static_cast<int>(grid.size());
    auto idx = [n_yield](int i, int j) { return static_cast<std::size_t>(j) * n_yield + i; };
    for (int j = 0; j < n_spoilage; ++j) {
        for (int i = 0; i + 1 < n_yield; ++i) {
            const auto lo = idx(i, j), hi = idx(i + 1, j);
            ++report.pairs_checked;
            if (hunts_score(runs[hi]) > hunts_score(runs[lo])) {
                report.violations.push_back({grid[hi], grid[lo], "H increases with Y", hunts_score(runs[hi]),
                                             hunts_score(runs[lo])});
            }
        }
    }
    for (int i = 0; i < n_yield; ++i) {
        for (int j = 0; j + 1 < n_spoilage; ++j) {
            const auto lo = idx(i, j), hi = idx(i, j + 1);
            ++report.pairs_checked;
            if (hunts_score(runs[hi]) < hunts_score(runs[lo])) {
                report.violations.push_back({grid[lo], grid[hi], "H decreases with p", hunts_score(runs[lo]),
                                             hunts_score(runs[hi])});
            }
        }
    }
    return report;
}

}  // namespace forage::oracle
