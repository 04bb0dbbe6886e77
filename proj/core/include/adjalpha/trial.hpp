#pragma once

#include <optional>
#include <string>

#include "adjalpha/mvn.hpp"

namespace adjalpha {

/// When Stage 1 data is pooled into the primary analysis, as a function of
/// the Stage1-minus-Stage2 difference D in observed -log(hazard ratio):
///   Conservative: pool when D < c
///   Aggressive:   pool when D > -c
///   Neutral:      pool when |D| < c
enum class StrategyKind { Conservative, Aggressive, Neutral };

std::string to_string(StrategyKind s);
std::optional<StrategyKind> parse_strategy(const std::string& name);

struct ClampedW {
    double w;
    bool clamped;  // true when the raw value was below 0.5
};

/// Values below 0.5 are lifted to 0.5 so Type I error control stays strong.
ClampedW clamp_w(double w_raw);

/// One design problem. Use make() so w-clamping and range checks apply.
struct DesignParams {
    double alpha;            // overall one-sided level, (0, 0.5)
    StrategyKind strategy;
    double c;                // consistency cutoff in log-HR units, >= 0
    double t;                // Stage 1 information fraction, (0, 1)
    double info;             // information units I = N/4, > 0
    double w;                // picking-the-winner probability, stored in [0.5, 1]
    bool w_was_clamped = false;

    static DesignParams make(double alpha, StrategyKind strategy, double c, double t,
                             double info, double w_raw);
};

struct StageEffects {
    double hr_overall;
    double hr_stage1;
    double hr_stage2;
    double diff;  // e1 - e2 with e_i = -log(hr_stage_i)
};

/// Schoenfeld event count 4*((z_{1-alpha} + z_{power}) / log hr)^2, unrounded.
double schoenfeld_events(double alpha, double power, double hr);

/// Minimal detectable hazard ratio exp(-z_{1-alpha} / sqrt(events/4)).
double mdd_hr(double alpha, double events);

/// Split an overall effect into stage effects with a given difference.
StageEffects stage_decompose(double hr_overall, double t, double diff);

/// One-sided p-value of the Stage-2 log-rank normal approximation.
double stage2_nominal_p(double hr_stage2, double events_stage2);

/// Covariance of (D1, D2), D_j = Y1j/sqrt(tI) - Y2s/sqrt((1-t)I).
CovMatrix sigma1(double t, double info);

/// Covariance of (D1, D2, S1, S2), S_j = sqrt(t) Y1j + sqrt(1-t) Y2s.
CovMatrix sigma2(double t, double info);

/// Covariance of (D1, D2, Y2s).
CovMatrix sigma3(double t, double info);

}  // namespace adjalpha
