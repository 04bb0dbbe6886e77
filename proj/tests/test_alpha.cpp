#include <cmath>

#include "doctest.h"

#include "adjalpha/alpha.hpp"
#include "adjalpha/errors.hpp"
#include "adjalpha/trial.hpp"

using namespace adjalpha;

namespace {

DesignParams neutral(double c, double w, double alpha = 0.025, double t = 0.3,
                     double info = 127.5) {
    return DesignParams::make(alpha, StrategyKind::Neutral, c, t, info, w);
}

const double kC11 = std::log(1.1);

}  // namespace

TEST_CASE("neutral components: frozen one-dimensional-quadrature references") {
    // c = log 1.1, t = 0.3, I = 127.5, astar = 0.0199. References computed by
    // conditioning each rectangle on the two-dimensional block analytically
    // and integrating the remaining coordinate to ~1e-11.
    const ComponentValues cv = components_neutral(kC11, 0.3, 127.5, 0.0199);
    CHECK(cv.A == doctest::Approx(0.011660986).epsilon(2e-4));
    CHECK(cv.B == doctest::Approx(0.003387929).epsilon(2e-4));
    CHECK(cv.C == doctest::Approx(0.015283340).epsilon(2e-4));
    CHECK(cv.D == doctest::Approx(0.018603242).epsilon(2e-4));
    CHECK(cv.total(0.6) == doctest::Approx(0.024963064).epsilon(4e-5));
}

TEST_CASE("type I error of the sample-call design") {
    const double t1 = type_one_error(neutral(kC11, 0.6), 0.0199);
    CHECK(std::fabs(t1 - 0.024963064) <= 1e-6);
}

TEST_CASE("conservative and aggressive totals: frozen cross-checked values") {
    // Verified against an independent numeric oracle and the MC simulator.
    const ComponentValues cons = components_conservative(std::log(1.15), 0.3, 127.5, 0.024);
    CHECK(cons.total(0.8) == doctest::Approx(0.023065).epsilon(1e-3));
    const ComponentValues agg = components_aggressive(std::log(1.15), 0.3, 127.5, 0.018);
    CHECK(agg.total(0.8) == doctest::Approx(0.031522).epsilon(1e-3));
    const ComponentValues neu = components_neutral(std::log(1.15), 0.3, 127.5, 0.02);
    CHECK(neu.total(0.6) == doctest::Approx(0.026640).epsilon(1e-3));
}

TEST_CASE("sample-call solve returns 0.0199") {
    const AlphaStarResult res = solve_alpha_star(neutral(kC11, 0.6));
    CHECK(std::fabs(res.alpha_star - 0.0199) <= 5e-4);
    CHECK(std::fabs(res.achieved_type1 - 0.025) <= 2e-6);
    CHECK(!res.at_alpha_bound);
    CHECK(!res.clamped_w);
    CHECK(res.alpha_star <= 0.025);
}

TEST_CASE("c = 0 disables pooling: alpha* equals alpha") {
    for (double alpha : {0.01, 0.025, 0.05}) {
        const AlphaStarResult res = solve_alpha_star(neutral(0.0, 0.9, alpha));
        CHECK(std::fabs(res.alpha_star - alpha) <= 1e-6);
    }
}

TEST_CASE("huge cutoff, equal weights: mixture restores the standard normal") {
    // Max/min selection with w = 0.5 gives back a standard normal marginal,
    // so pooling always is harmless. Verified against the MC oracle.
    const AlphaStarResult res = solve_alpha_star(neutral(50.0, 0.5));
    CHECK(std::fabs(res.alpha_star - 0.025) <= 1e-3);
}

TEST_CASE("huge cutoff makes conservative and aggressive agree") {
    // Both reduce to "always pool" when the cutoff can never be exceeded.
    const auto cons = DesignParams::make(0.02, StrategyKind::Conservative, 50.0, 0.3, 127.5, 0.8);
    const auto agg = DesignParams::make(0.02, StrategyKind::Aggressive, 50.0, 0.3, 127.5, 0.8);
    CHECK(std::fabs(type_one_error(cons, 0.02) - type_one_error(agg, 0.02)) <= 2e-6);
}

TEST_CASE("w below 0.5 is clamped and flagged") {
    const AlphaStarResult low = solve_alpha_star(neutral(kC11, 0.2));
    const AlphaStarResult half = solve_alpha_star(neutral(kC11, 0.5));
    CHECK(low.alpha_star == half.alpha_star);
    CHECK(low.clamped_w);
    CHECK(!half.clamped_w);
}

TEST_CASE("neutral alpha* is nonincreasing in w") {
    double prev = 1.0;
    for (double w : {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
        const double a = solve_alpha_star(neutral(kC11, w)).alpha_star;
        CHECK(a <= prev + 3e-6);
        prev = a;
    }
}

TEST_CASE("neutral alpha* is nonincreasing in t") {
    for (double w : {0.5, 1.0}) {
        for (double c : {std::log(1.1), std::log(1.2)}) {
            double prev = 1.0;
            for (double t : {0.2, 0.3, 0.4}) {
                const double a =
                    solve_alpha_star(
                        DesignParams::make(0.025, StrategyKind::Neutral, c, t, 127.5, w))
                        .alpha_star;
                CHECK(a <= prev + 3e-6);
                prev = a;
            }
        }
    }
}

TEST_CASE("strategy ordering at a representative point") {
    auto solve_for = [&](StrategyKind s) {
        return solve_alpha_star(DesignParams::make(0.025, s, kC11, 0.3, 127.5, 0.8)).alpha_star;
    };
    const double cons = solve_for(StrategyKind::Conservative);
    const double neut = solve_for(StrategyKind::Neutral);
    const double agg = solve_for(StrategyKind::Aggressive);
    CHECK(cons >= neut - 3e-6);
    CHECK(neut >= agg - 3e-6);
}

TEST_CASE("conservative pooling is often no worse than alpha") {
    // The conservative rule pools only when Stage 1 looks weaker, so the
    // Type I error at alpha is typically deflated and no adjustment is needed.
    const auto p = DesignParams::make(0.025, StrategyKind::Conservative, kC11, 0.3, 127.5, 0.8);
    const AlphaStarResult res = solve_alpha_star(p);
    CHECK(res.at_alpha_bound);
    CHECK(res.alpha_star == 0.025);
    CHECK(res.achieved_type1 <= 0.025 + 1e-9);
}

TEST_CASE("solved level re-evaluates to alpha (self-consistency)") {
    for (double w : {0.6, 1.0}) {
        const DesignParams p = neutral(std::log(1.2), w);
        const AlphaStarResult res = solve_alpha_star(p);
        if (!res.at_alpha_bound) {
            CHECK(std::fabs(type_one_error(p, res.alpha_star) - p.alpha) <= 2e-6);
        }
    }
}

TEST_CASE("aggressive pooling inflates more than neutral at the same level") {
    const auto agg = DesignParams::make(0.025, StrategyKind::Aggressive, kC11, 0.3, 127.5, 0.8);
    const auto neu = DesignParams::make(0.025, StrategyKind::Neutral, kC11, 0.3, 127.5, 0.8);
    CHECK(type_one_error(agg, 0.02) >= type_one_error(neu, 0.02) - 1e-7);
}

TEST_CASE("type I error is increasing in the nominal level") {
    const DesignParams p = neutral(kC11, 0.8);
    double prev = 0.0;
    for (double a : {0.005, 0.01, 0.02, 0.03}) {
        const double t1 = type_one_error(p, a);
        CHECK(t1 > prev);
        prev = t1;
    }
}

TEST_CASE("figure anchors: neutral curves") {
    CHECK(std::fabs(solve_alpha_star(neutral(kC11, 0.5)).alpha_star - 0.0204) <= 5e-4);
    CHECK(std::fabs(solve_alpha_star(neutral(kC11, 1.0)).alpha_star - 0.0183) <= 5e-4);
    CHECK(std::fabs(solve_alpha_star(neutral(std::log(1.2), 0.5)).alpha_star - 0.0188) <= 5e-4);
    CHECK(std::fabs(solve_alpha_star(neutral(std::log(1.2), 1.0)).alpha_star - 0.0160) <= 5e-4);
}

TEST_CASE("component values are probabilities") {
    for (double astar : {0.005, 0.02}) {
        const ComponentValues cv = components_neutral(kC11, 0.3, 127.5, astar);
        for (double v : {cv.A, cv.B, cv.C, cv.D}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("invalid nominal level is rejected") {
    CHECK_THROWS_AS((void)type_one_error(neutral(kC11, 0.6), 0.0), OutOfRange);
    CHECK_THROWS_AS((void)type_one_error(neutral(kC11, 0.6), 0.6), OutOfRange);
}
