#include "adjalpha/alpha.hpp"

#include <cmath>

#include "adjalpha/errors.hpp"
#include "adjalpha/mvn.hpp"
#include "adjalpha/normal.hpp"

namespace adjalpha {

namespace {

void check_component_args(double c, double t, double info, double astar) {
    if (!(c >= 0.0)) throw OutOfRange("components: c >= 0");
    if (!(t > 0.0 && t < 1.0)) throw OutOfRange("components: t in (0, 1)");
    if (!(info > 0.0)) throw OutOfRange("components: I > 0");
    if (!(astar > 0.0 && astar < 0.5)) throw OutOfRange("components: astar in (0, 0.5)");
}

double clamp01(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

}  // namespace

ComponentValues components_neutral(double c, double t, double info, double astar) {
    check_component_args(c, t, info, astar);
    const double z = norm_quantile(1.0 - astar);
    const CovMatrix s1 = sigma1(t, info);
    const CovMatrix s2 = sigma2(t, info);
    const CovMatrix s3 = sigma3(t, info);

    // Pool when |D_max| < c, reject on S_max (winner picked).
    const double a1 = mvn_rect_prob(Rectangle::below({c, c}), s1, kMvnTol) -
                      mvn_rect_prob(Rectangle::below({-c, -c}), s1, kMvnTol) -
                      mvn_rect_prob(Rectangle::below({c, c, z, z}), s2, kMvnTol) +
                      mvn_rect_prob(Rectangle::below({-c, -c, z, z}), s2, kMvnTol);
    // Same events for the loser pick, via min-based rectangles.
    const double b1 = mvn_rect_prob(Rectangle::above({-c, -c, z, z}), s2, kMvnTol) -
                      mvn_rect_prob(Rectangle::above({c, c, z, z}), s2, kMvnTol);
    // Stage-2-only branch, winner pick.
    const double c1 = astar +
                      mvn_rect_prob(Rectangle{{-kInf, -kInf, z}, {-c, -c, kInf}}, s3, kMvnTol) -
                      mvn_rect_prob(Rectangle{{-kInf, -kInf, z}, {c, c, kInf}}, s3, kMvnTol);
    // Stage-2-only branch, loser pick.
    const double d1 = astar +
                      mvn_rect_prob(Rectangle::above({c, c, z}), s3, kMvnTol) -
                      mvn_rect_prob(Rectangle::above({-c, -c, z}), s3, kMvnTol);
    return ComponentValues{clamp01(a1), clamp01(b1), clamp01(c1), clamp01(d1)};
}

ComponentValues components_conservative(double c, double t, double info, double astar) {
    check_component_args(c, t, info, astar);
    const double z = norm_quantile(1.0 - astar);
    const CovMatrix s1 = sigma1(t, info);
    const CovMatrix s2 = sigma2(t, info);
    const CovMatrix s3 = sigma3(t, info);

    // Winner pick: pool when D_max < c.
    // A = P(D_max < c) - P(D_max < c, S_max < z)
    const double a1 = mvn_rect_prob(Rectangle::below({c, c}), s1, kMvnTol) -
                      mvn_rect_prob(Rectangle::below({c, c, z, z}), s2, kMvnTol);
    // Loser pick: pool when D_min < c.
    // B = P(S_min > z) - P(D_min >= c, S_min > z)
    const double b1 = mvn_rect_prob(Rectangle{{-kInf, -kInf, z, z}, {kInf, kInf, kInf, kInf}}, s2, kMvnTol) -
                      mvn_rect_prob(Rectangle::above({c, c, z, z}), s2, kMvnTol);
    // C = P(D_max >= c, Y2s > z) = astar - P(D_max < c, Y2s > z)
    const double c1 = astar -
                      mvn_rect_prob(Rectangle{{-kInf, -kInf, z}, {c, c, kInf}}, s3, kMvnTol);
    // D = P(D_min >= c, Y2s > z)
    const double d1 = mvn_rect_prob(Rectangle::above({c, c, z}), s3, kMvnTol);
    return ComponentValues{clamp01(a1), clamp01(b1), clamp01(c1), clamp01(d1)};
}

ComponentValues components_aggressive(double c, double t, double info, double astar) {
    check_component_args(c, t, info, astar);
    const double z = norm_quantile(1.0 - astar);
    const CovMatrix s1 = sigma1(t, info);
    const CovMatrix s2 = sigma2(t, info);
    const CovMatrix s3 = sigma3(t, info);

    // Winner pick: pool when D_max > -c.
    // A = P(S_max > z) - P(D_max <= -c) + P(D_max <= -c, S_max < z)
    const double a1 = 1.0 -
                      mvn_rect_prob(Rectangle{{-kInf, -kInf, -kInf, -kInf}, {kInf, kInf, z, z}}, s2, kMvnTol) -
                      mvn_rect_prob(Rectangle::below({-c, -c}), s1, kMvnTol) +
                      mvn_rect_prob(Rectangle::below({-c, -c, z, z}), s2, kMvnTol);
    // Loser pick: pool when D_min > -c.
    const double b1 = mvn_rect_prob(Rectangle::above({-c, -c, z, z}), s2, kMvnTol);
    // C = P(D_max <= -c, Y2s > z)
    const double c1 = mvn_rect_prob(Rectangle{{-kInf, -kInf, z}, {-c, -c, kInf}}, s3, kMvnTol);
    // D = P(D_min <= -c, Y2s > z) = astar - P(D_min > -c, Y2s > z)
    const double d1 = astar -
                      mvn_rect_prob(Rectangle::above({-c, -c, z}), s3, kMvnTol);
    return ComponentValues{clamp01(a1), clamp01(b1), clamp01(c1), clamp01(d1)};
}

double type_one_error(const DesignParams& params, double astar) {
    ComponentValues cv;
    switch (params.strategy) {
        case StrategyKind::Neutral:
            cv = components_neutral(params.c, params.t, params.info, astar);
            break;
        case StrategyKind::Conservative:
            cv = components_conservative(params.c, params.t, params.info, astar);
            break;
        case StrategyKind::Aggressive:
            cv = components_aggressive(params.c, params.t, params.info, astar);
            break;
    }
    return cv.total(params.w);
}

AlphaStarResult solve_alpha_star(const DesignParams& params) {
    constexpr int kMaxIter = 200;
    const double alpha = params.alpha;

    auto f = [&](double x) { return type_one_error(params, x) - alpha; };

    int iters = 0;
    double a = 1e-6;
    double b = alpha;
    double fb = f(b);
    ++iters;
    if (fb <= 0.0) {
        // No inflation to compensate; the nominal level needs no adjustment.
        return AlphaStarResult{alpha, fb + alpha, iters, 0.0, params.w_was_clamped, true};
    }
    double fa = f(a);
    ++iters;
    if (fa > 0.0) throw NoConvergence("solve_alpha_star: no sign change on [1e-6, alpha]");

    // Brent's method; type_one_error is monotone in astar so the bracket is sound.
    double c = a, fc = fa, d = b - a, e = d;
    while (iters < kMaxIter) {
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * 1e-16 * std::fabs(b) + 1e-12;
        const double xm = 0.5 * (c - b);
        if (std::fabs(fb) <= kSolverTol || std::fabs(xm) <= tol1) {
            return AlphaStarResult{b, fb + alpha, iters, std::fabs(c - b), params.w_was_clamped, false};
        }
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            // Inverse quadratic / secant step.
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        ++iters;
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            e = d = b - a;
        }
    }
    throw NoConvergence("solve_alpha_star: bracket did not close within 200 iterations");
}

}  // namespace adjalpha
