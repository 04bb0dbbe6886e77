#pragma once

#include "adjalpha/trial.hpp"

namespace adjalpha {

/// The four probability terms whose w-mixture is the overall Type I error:
/// A/C condition on picking the winner, B/D on picking the loser;
/// A/B pool Stage 1, C/D fall back to the Stage-2-only test.
struct ComponentValues {
    double A;
    double B;
    double C;
    double D;

    double total(double w) const { return (A + C) * w + (B + D) * (1.0 - w); }
};

struct AlphaStarResult {
    double alpha_star;
    double achieved_type1;
    int iterations;
    double bracket;        // final bracket width
    bool clamped_w;
    bool at_alpha_bound;   // Type I at alpha was already <= alpha; result capped at alpha
};

inline constexpr double kMvnTol = 1e-7;
inline constexpr double kSolverTol = 1e-6;

ComponentValues components_neutral(double c, double t, double info, double astar);
ComponentValues components_conservative(double c, double t, double info, double astar);
ComponentValues components_aggressive(double c, double t, double info, double astar);

/// Overall Type I error of the design when both tests run at level astar.
double type_one_error(const DesignParams& params, double astar);

/// Smallest-bracket root of type_one_error(params, x) = alpha on [1e-6, alpha].
/// When the Type I error at alpha is already at or below alpha the level
/// needs no adjustment and alpha is returned with at_alpha_bound set.
AlphaStarResult solve_alpha_star(const DesignParams& params);

}  // namespace adjalpha
