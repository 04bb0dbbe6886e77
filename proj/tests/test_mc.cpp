#include <cmath>

#include "doctest.h"

#include "adjalpha/alpha.hpp"
#include "adjalpha/errors.hpp"
#include "adjalpha/mc.hpp"
#include "adjalpha/normal.hpp"
#include "adjalpha/trial.hpp"

using namespace adjalpha;

namespace {

DesignParams neutral(double c, double w) {
    return DesignParams::make(0.025, StrategyKind::Neutral, c, 0.3, 127.5, w);
}

McConfig cfg(std::uint64_t reps, std::uint64_t seed = 20240901) {
    McConfig c;
    c.replicates = reps;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("dose selection picks max for winner, min otherwise") {
    CHECK(select_dose(1.0, 2.0, true).index == 1);
    CHECK(select_dose(1.0, 2.0, true).y1s == 2.0);
    CHECK(select_dose(1.0, 2.0, false).index == 0);
    CHECK(select_dose(3.0, 2.0, false).index == 1);
    CHECK(select_dose(3.0, 2.0, false).y1s == 2.0);
}

TEST_CASE("uniforms stay strictly inside (0, 1)") {
    McRng rng(1, 0);
    for (int i = 0; i < 100'000; ++i) {
        const double u = rng.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("model draw moments and correlation") {
    McRng rng(7, 0);
    const int n = 200'000;
    double s11 = 0, s12 = 0, s2 = 0, q11 = 0, q12 = 0, x = 0, x2 = 0;
    for (int i = 0; i < n; ++i) {
        const ModelDraw m = draw_model(rng, EffectSpec{});
        s11 += m.y11;
        s12 += m.y12;
        s2 += m.y2s;
        q11 += m.y11 * m.y11;
        q12 += m.y12 * m.y12;
        x += m.y11 * m.y12;
        x2 += m.y11 * m.y2s;
    }
    CHECK(std::fabs(s11 / n) < 0.01);
    CHECK(std::fabs(s12 / n) < 0.01);
    CHECK(std::fabs(s2 / n) < 0.01);
    CHECK(q11 / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(q12 / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(x / n == doctest::Approx(0.5).epsilon(0.04));   // corr(Y11, Y12) = 0.5
    CHECK(std::fabs(x2 / n) < 0.01);                      // Y2s independent
}

TEST_CASE("mean shifts move the draws") {
    McRng a(3, 0), b(3, 0);
    const ModelDraw null_draw = draw_model(a, EffectSpec{});
    const ModelDraw shifted = draw_model(b, EffectSpec{1.0, 2.0, 3.0});
    CHECK(shifted.y11 == doctest::Approx(null_draw.y11 + 1.0).epsilon(1e-14));
    CHECK(shifted.y12 == doctest::Approx(null_draw.y12 + 2.0).epsilon(1e-14));
    CHECK(shifted.y2s == doctest::Approx(null_draw.y2s + 3.0).epsilon(1e-14));
}

TEST_CASE("identical seeds reproduce bit-identical estimates") {
    const DesignParams p = neutral(std::log(1.1), 0.6);
    const McEstimate a = simulate_type_one(p, 0.0199, cfg(50'000));
    const McEstimate b = simulate_type_one(p, 0.0199, cfg(50'000));
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_error == b.std_error);
    const McEstimate c = simulate_type_one(p, 0.0199, cfg(50'000, 999));
    CHECK(a.estimate != c.estimate);  // different stream, almost surely
}

TEST_CASE("type I simulation is power at zero effect, bit for bit") {
    const DesignParams p = neutral(std::log(1.1), 0.8);
    const McEstimate a = simulate_type_one(p, 0.02, cfg(60'000));
    const McEstimate b = simulate_power(p, 0.02, EffectSpec{}, cfg(60'000));
    CHECK(a.estimate == b.estimate);
}

TEST_CASE("argmax commutes across Y1, D and S scales") {
    // The Stage 1 ranking, the difference statistics D_j and the pooled
    // statistics S_j share a common positive multiple of Y1j, so all three
    // pick the same dose. The analytic expansions rely on this.
    const double t = 0.3, I = 127.5;
    const double inv_s1 = 1.0 / std::sqrt(t * I), inv_s2 = 1.0 / std::sqrt((1.0 - t) * I);
    McRng rng(11, 0);
    for (int i = 0; i < 20'000; ++i) {
        const ModelDraw m = draw_model(rng, EffectSpec{});
        const double d1 = m.y11 * inv_s1 - m.y2s * inv_s2;
        const double d2 = m.y12 * inv_s1 - m.y2s * inv_s2;
        const double s1 = std::sqrt(t) * m.y11 + std::sqrt(1.0 - t) * m.y2s;
        const double s2 = std::sqrt(t) * m.y12 + std::sqrt(1.0 - t) * m.y2s;
        const bool first = m.y11 >= m.y12;
        CHECK((d1 >= d2) == first);
        CHECK((s1 >= s2) == first);
    }
}

TEST_CASE("c = 0 with a pure stage-2 shift reproduces the design power") {
    // Never pool; the test statistic is Y2s with mean z_{0.975} + z_{0.90}.
    const double mu2 = norm_quantile(0.975) + norm_quantile(0.90);
    const DesignParams p = neutral(0.0, 0.9);
    const McEstimate est = simulate_power(p, 0.025, EffectSpec{0.0, 0.0, mu2}, cfg(200'000));
    CHECK(std::fabs(est.estimate - 0.90) <= 3.5 * est.std_error);
}

TEST_CASE("simulation agrees with the analytic type I error") {
    const DesignParams p = neutral(std::log(1.1), 0.6);
    const double analytic = type_one_error(p, 0.0199);
    const McEstimate est = simulate_type_one(p, 0.0199, cfg(400'000));
    CHECK(std::fabs(analytic - est.estimate) <= 3.5 * est.std_error);
}

TEST_CASE("winner pick frequency tracks w") {
    // With w = 1 the selected arm is always the larger Y1; rejection under a
    // large Y11-only shift then nearly always pools the shifted arm.
    const DesignParams p =
        DesignParams::make(0.025, StrategyKind::Aggressive, 50.0, 0.3, 127.5, 1.0);
    const McEstimate hi = simulate_power(p, 0.025, EffectSpec{6.0, 0.0, 0.0}, cfg(50'000));
    const DesignParams p2 =
        DesignParams::make(0.025, StrategyKind::Aggressive, 50.0, 0.3, 127.5, 0.5);
    const McEstimate mid = simulate_power(p2, 0.025, EffectSpec{6.0, 0.0, 0.0}, cfg(50'000));
    CHECK(hi.estimate > mid.estimate + 0.05);  // picking the winner helps here
}

TEST_CASE("configuration validation") {
    const DesignParams p = neutral(std::log(1.1), 0.6);
    CHECK_THROWS_AS((void)simulate_type_one(p, 0.0199, cfg(5'000)), OutOfRange);
    CHECK_THROWS_AS((void)simulate_type_one(p, 0.0, cfg(50'000)), OutOfRange);
    McConfig bad = cfg(50'000);
    bad.chunk_size = 0;
    CHECK_THROWS_AS((void)simulate_type_one(p, 0.0199, bad), OutOfRange);
}

TEST_CASE("standard error is the binomial formula") {
    const DesignParams p = neutral(std::log(1.1), 0.6);
    const McEstimate est = simulate_type_one(p, 0.0199, cfg(50'000));
    const double expect = std::sqrt(est.estimate * (1.0 - est.estimate) / 50'000.0);
    CHECK(est.std_error == doctest::Approx(expect).epsilon(1e-12));
    CHECK(est.replicates == 50'000);
    CHECK(est.seed == 20240901);
}
