#include <cmath>
#include <vector>

#include "doctest.h"
#include "forage/env.h"

using namespace forage;

namespace {

EnvParams small(double food, double c, double p, double y = 1000.0) {
    EnvParams e = EnvParams::with(y, p);
    e.consumption = c;
    e.requirement = c * e.horizon;
    e.initial_food = food;
    return e;
}

// Scalar replay of the daily recurrence, independent of env::step.
double recur(double food, double c, double p, int days) {
    for (int d = 0; d < days; ++d) food = (food - c) * (1.0 - p);
    return food;
}

}  // namespace

TEST_CASE("effective yield") {
    const EnvParams p1 = EnvParams::with(1000.0, 0.3);
    CHECK(effective_yield(p1, 0.0, 0.0) == doctest::Approx(1000.0));
    CHECK(effective_yield(p1, 1.0, 10.0) == doctest::Approx(1210.0).epsilon(1e-12));
    const EnvParams p2 = EnvParams::with(2000.0, 0.3);
    CHECK(effective_yield(p2, 5.0, 50.0) == doctest::Approx(4500.0).epsilon(1e-12));
}

TEST_CASE("effective yield is strictly increasing in Y, G and C") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const double y = uniform(rng, 1.0, 5000.0);
        const double g = uniform(rng, 0.0, 50.0);
        const double c = uniform(rng, 0.0, 400.0);
        const double d = uniform(rng, 1e-3, 10.0);
        const EnvParams a = EnvParams::with(y, 0.3);
        const EnvParams b = EnvParams::with(y + d, 0.3);
        const double base = effective_yield(a, g, c);
        CHECK(effective_yield(b, g, c) > base);
        CHECK(effective_yield(a, g + d, c) > base);
        CHECK(effective_yield(a, g, c + d) > base);
    }
}

TEST_CASE("advance_one_day") {
    SUBCASE("p = 0 subtracts the ration") {
        const EnvParams e = small(100.0, 10.0, 0.0);
        const DayOutcome d = advance_one_day(reset(e), e);
        CHECK(d.state.food == 90.0);
        CHECK(d.state.day == 1);
        CHECK_FALSE(d.terminal);
    }
    SUBCASE("spoilage applies after consumption") {
        const EnvParams e = small(100.0, 10.0, 0.2);
        CHECK(advance_one_day(reset(e), e).state.food == doctest::Approx(72.0).epsilon(1e-14));
    }
    SUBCASE("ration larger than stock starves") {
        const EnvParams e = small(5.0, 10.0, 0.2);
        const DayOutcome d = advance_one_day(reset(e), e);
        CHECK(d.state.food == doctest::Approx(-4.0).epsilon(1e-14));
        CHECK(d.terminal);
        CHECK_FALSE(d.state.alive);
        CHECK(d.state.cause == TerminalCause::Starved);
    }
    SUBCASE("last day reaches the horizon") {
        EnvParams e = small(100.0, 10.0, 0.0);
        e.horizon = 1;
        const DayOutcome d = advance_one_day(reset(e), e);
        CHECK(d.terminal);
        CHECK(d.state.cause == TerminalCause::HorizonReached);
    }
    SUBCASE("finished state is a contract violation") {
        const EnvParams e = small(5.0, 10.0, 0.2);
        const DayOutcome d = advance_one_day(reset(e), e);
        CHECK_THROWS_AS(advance_one_day(d.state, e), ContractError);
    }
}

TEST_CASE("total spoilage starves on the second day") {
    const EnvParams e = small(100.0, 10.0, 1.0);
    EnvState s = reset(e);
    CHECK_FALSE(step(s, e, Action::Culture).terminal);
    CHECK(s.food == 0.0);
    const StepOutcome out = step(s, e, Action::Culture);
    CHECK(out.cause == TerminalCause::Starved);
    CHECK(out.reward == -100.0);
}

TEST_CASE("step: culture") {
    const EnvParams e = small(100.0, 10.0, 0.0);
    EnvState s = reset(e);
    const StepOutcome out = step(s, e, Action::Culture);
    CHECK(s.food == 90.0);
    CHECK(s.culture == 1.0);
    CHECK(out.reward == 5.0);
    CHECK(out.days_elapsed == 1);
    CHECK_FALSE(out.terminal);
}

TEST_CASE("step: hunt credits yield after the second day's spoilage") {
    const EnvParams e = small(100.0, 10.0, 0.2, 1000.0);
    EnvState s = reset(e);
    const StepOutcome out = step(s, e, Action::Hunt);
    const double expected = recur(100.0, 10.0, 0.2, 2) + 1000.0;
    CHECK(expected == doctest::Approx(1049.6).epsilon(1e-14));
    CHECK(s.food == doctest::Approx(expected).epsilon(1e-14));
    CHECK(out.reward == 0.0);
    CHECK(out.days_elapsed == 2);
    CHECK(s.day == 2);
}

TEST_CASE("step: invest that starves leaves G unchanged") {
    const EnvParams e = small(5.0, 10.0, 0.3);
    EnvState s = reset(e);
    const StepOutcome out = step(s, e, Action::Invest);
    CHECK(out.terminal);
    CHECK(out.reward == -100.0);
    CHECK(s.skill == 0.0);
}

TEST_CASE("step: culture day that starves gives only the penalty") {
    const EnvParams e = small(5.0, 10.0, 0.3);
    EnvState s = reset(e);
    const StepOutcome out = step(s, e, Action::Culture);
    CHECK(out.reward == -100.0);
    CHECK(s.culture == 0.0);
}

TEST_CASE("step: hunts that cannot finish yield nothing") {
    SUBCASE("starved on the first hunt day") {
        const EnvParams e = small(15.0, 10.0, 0.0);
        EnvState s = reset(e);
        step(s, e, Action::Culture);  // 5 left
        const StepOutcome out = step(s, e, Action::Hunt);
        CHECK(out.cause == TerminalCause::Starved);
        CHECK(out.days_elapsed == 1);
        CHECK(s.food < 0.0);
        CHECK(out.reward == -100.0);
    }
    SUBCASE("starved on the second hunt day") {
        const EnvParams e = small(15.0, 10.0, 0.0);
        EnvState s = reset(e);
        const StepOutcome out = step(s, e, Action::Hunt);
        CHECK(out.cause == TerminalCause::Starved);
        CHECK(out.days_elapsed == 2);
        CHECK(s.food == -5.0);
    }
    SUBCASE("truncated at the horizon") {
        EnvParams e = small(100.0, 10.0, 0.0);
        e.horizon = 3;
        EnvState s = reset(e);
        step(s, e, Action::Culture);
        step(s, e, Action::Culture);
        const StepOutcome out = step(s, e, Action::Hunt);
        CHECK(out.cause == TerminalCause::HorizonReached);
        CHECK(out.days_elapsed == 1);
        CHECK(s.day == 3);
        CHECK(s.food == 70.0);
    }
    SUBCASE("completed exactly at the horizon") {
        EnvParams e = small(100.0, 10.0, 0.0);
        e.horizon = 2;
        EnvState s = reset(e);
        const StepOutcome out = step(s, e, Action::Hunt);
        CHECK(out.cause == TerminalCause::HorizonReached);
        CHECK(s.food == 1080.0);
    }
}

TEST_CASE("step on a terminal state is a contract violation") {
    const EnvParams e = small(5.0, 10.0, 0.3);
    EnvState s = reset(e);
    step(s, e, Action::Culture);
    CHECK_THROWS_AS(step(s, e, Action::Culture), ContractError);
}

TEST_CASE("observe") {
    SUBCASE("fresh state") {
        EnvParams e = EnvParams::with(3000.0, 0.5);
        const Observation o = observe(reset(e), e);
        CHECK(o[0] == doctest::Approx(100.0 / 3650.0).epsilon(1e-15));
        CHECK(o[0] == doctest::Approx(0.0273972602739726).epsilon(1e-12));
        CHECK(o[1] == 0.0);
        CHECK(o[2] == 0.0);
        CHECK(o[3] == 1.0);
        CHECK(o[4] == 1.0);
        CHECK(o[5] == 0.5);
    }
    SUBCASE("normalization endpoints") {
        const EnvParams e = EnvParams::with(2000.0, 0.3);
        EnvState s = reset(e);
        s.food = e.requirement;
        s.day = e.horizon;
        const Observation o = observe(s, e);
        CHECK(o[0] == 1.0);
        CHECK(o[3] == 0.0);
    }
    SUBCASE("yield normalized by 3000") {
        const EnvParams e = EnvParams::with(1500.0, 0.3);
        CHECK(observe(reset(e), e)[4] == 0.5);
    }
    SUBCASE("skill and culture scaling") {
        EnvParams e = EnvParams::with(1500.0, 0.3);
        EnvState s = reset(e);
        s.skill = 4.0;
        s.culture = 73.0;
        Observation o = observe(s, e);
        CHECK(o[1] == doctest::Approx(0.4));
        CHECK(o[2] == doctest::Approx(0.2));
        e.obs_scaling = ObsScaling::Raw;
        o = observe(s, e);
        CHECK(o[1] == 4.0);
        CHECK(o[2] == 73.0);
    }
}

TEST_CASE("reset") {
    const EnvParams e;
    const EnvState a = reset(e);
    CHECK(a.food == 100.0);
    CHECK(e.initial_food == 10.0 * e.consumption);
    CHECK(a.culture == 0.0);
    CHECK(a.skill == 0.0);
    CHECK(a.day == 0);
    CHECK(a.alive);
    CHECK(a == reset(e));
}

TEST_CASE("default parameters") {
    const EnvParams e;
    CHECK(e.consumption == 10.0);
    CHECK(e.horizon == 365);
    CHECK(e.requirement == e.consumption * e.horizon);
    CHECK(e.hunt_days == 2);
    CHECK(e.invest_days == 1);
    CHECK(e.culture_days == 1);
    CHECK(e.skill_increment == 1.0);
    CHECK_NOTHROW(e.validate());
    EnvParams bad = e;
    bad.spoilage = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = e;
    bad.yield_base = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("action encoding is stable") {
    CHECK(static_cast<int>(Action::Hunt) == 0);
    CHECK(static_cast<int>(Action::Invest) == 1);
    CHECK(static_cast<int>(Action::Culture) == 2);
    CHECK(action_from_index(2) == Action::Culture);
    CHECK_THROWS_AS(action_from_index(3), ContractError);
}

TEST_CASE("ledger identities over random action sequences") {
    Rng rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        EnvParams e = EnvParams::with(uniform(rng, 200.0, 3000.0), uniform(rng, 0.0, 0.6));
        e.horizon = 1 + static_cast<int>(rng() % 60);
        e.requirement = e.consumption * e.horizon;
        EnvState s = reset(e);
        int cultures = 0, invests = 0, days = 0;
        while (!s.finished()) {
            const Action a = action_from_index(static_cast<int>(rng() % 3));
            const StepOutcome out = step(s, e, a);
            days += out.days_elapsed;
            if (out.cause != TerminalCause::Starved) {
                if (a == Action::Culture) ++cultures;
                if (a == Action::Invest) ++invests;
            }
            if (!out.terminal) CHECK(out.days_elapsed == (a == Action::Hunt ? e.hunt_days : 1));
            CHECK(out.days_elapsed <= (a == Action::Hunt ? e.hunt_days : 1));
        }
        CHECK(s.culture == cultures);
        CHECK(s.skill == doctest::Approx(invests * e.skill_increment));
        CHECK(s.day == days);
        CHECK(s.day <= e.horizon);
        CHECK_FALSE(s.alive);
        // Dead exactly when the horizon was reached or a day ended short.
        if (s.cause == TerminalCause::HorizonReached) {
            CHECK(s.day == e.horizon);
        } else {
            CHECK(s.cause == TerminalCause::Starved);
        }
    }
}

TEST_CASE("spoilage and yield monotonicity over every action sequence up to length 10") {
    struct Run {
        std::vector<double> food;  // after each step while alive
        int death = -1;            // step index of starvation
    };
    auto play = [](const EnvParams& e, const std::vector<int>& seq) {
        Run r;
        EnvState s = reset(e);
        for (std::size_t i = 0; i < seq.size() && !s.finished(); ++i) {
            step(s, e, action_from_index(seq[i]));
            if (s.cause == TerminalCause::Starved) {
                r.death = static_cast<int>(i);
                break;
            }
            r.food.push_back(s.food);
        }
        return r;
    };
    // b is the harsher environment: food never above a's, death never later.
    auto dominated = [](const Run& a, const Run& b) {
        if (b.food.size() > a.food.size()) return false;
        for (std::size_t i = 0; i < b.food.size(); ++i) {
            if (b.food[i] > a.food[i]) return false;
        }
        return true;
    };

    const std::vector<std::pair<double, double>> p_pairs = {{0.0, 0.1}, {0.2, 0.3}, {0.3, 0.5}, {0.5, 1.0}};
    const std::vector<std::pair<double, double>> y_pairs = {{20.0, 40.0}, {200.0, 1000.0}};
    std::vector<int> seq;
    long checked = 0;
    for (int len = 1; len <= 10; ++len) {
        seq.assign(static_cast<std::size_t>(len), 0);
        while (true) {
            for (auto [lo, hi] : p_pairs) {
                const EnvParams a = small(60.0, 10.0, lo, 30.0);
                const EnvParams b = small(60.0, 10.0, hi, 30.0);
                CHECK(dominated(play(a, seq), play(b, seq)));
                ++checked;
            }
            for (auto [lo, hi] : y_pairs) {
                const EnvParams a = small(60.0, 10.0, 0.3, hi);
                const EnvParams b = small(60.0, 10.0, 0.3, lo);
                CHECK(dominated(play(a, seq), play(b, seq)));
                ++checked;
            }
            int k = 0;
            while (k < len && ++seq[static_cast<std::size_t>(k)] == 3) seq[static_cast<std::size_t>(k++)] = 0;
            if (k == len) break;
        }
    }
    CHECK(checked == 6 * (88572L));
}

TEST_CASE("transitions are deterministic") {
    const EnvParams e = EnvParams::with(1700.0, 0.37);
    EnvState a = reset(e), b = reset(e);
    Rng rng(5);
    while (!a.finished()) {
        const Action act = action_from_index(static_cast<int>(rng() % 3));
        const StepOutcome oa = step(a, e, act);
        const StepOutcome ob = step(b, e, act);
        CHECK(oa.reward == ob.reward);
        CHECK(a == b);
    }
}

TEST_CASE("Bernoulli spoilage mode") {
    EnvParams e = small(100.0, 10.0, 1.0);
    e.spoilage_mode = SpoilageMode::Bernoulli;
    EnvState s = reset(e);
    CHECK_THROWS_AS(step(s, e, Action::Culture), ContractError);
    Rng rng(1);
    step(s, e, Action::Culture, &rng);
    CHECK(s.food == 0.0);

    e.spoilage = 0.0;
    s = reset(e);
    step(s, e, Action::Culture, &rng);
    CHECK(s.food == 90.0);
}
