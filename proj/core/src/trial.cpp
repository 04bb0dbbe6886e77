#include "adjalpha/trial.hpp"

#include <cmath>

#include "adjalpha/errors.hpp"
#include "adjalpha/normal.hpp"

namespace adjalpha {

std::string to_string(StrategyKind s) {
    switch (s) {
        case StrategyKind::Conservative: return "conservative";
        case StrategyKind::Aggressive: return "aggressive";
        case StrategyKind::Neutral: return "neutral";
    }
    return "unknown";
}

std::optional<StrategyKind> parse_strategy(const std::string& name) {
    if (name == "conservative") return StrategyKind::Conservative;
    if (name == "aggressive") return StrategyKind::Aggressive;
    if (name == "neutral") return StrategyKind::Neutral;
    return std::nullopt;
}

ClampedW clamp_w(double w_raw) {
    if (!(w_raw >= 0.0 && w_raw <= 1.0)) throw OutOfRange("clamp_w: w must be in [0, 1]");
    if (w_raw < 0.5) return {0.5, true};
    return {w_raw, false};
}

DesignParams DesignParams::make(double alpha, StrategyKind strategy, double c, double t,
                                double info, double w_raw) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw OutOfRange("DesignParams: alpha must be in (0, 0.5)");
    if (!(c >= 0.0)) throw OutOfRange("DesignParams: c must be >= 0");
    if (!(t > 0.0 && t < 1.0)) throw OutOfRange("DesignParams: t must be in (0, 1)");
    if (!(info > 0.0)) throw OutOfRange("DesignParams: I must be > 0");
    const ClampedW cw = clamp_w(w_raw);
    return DesignParams{alpha, strategy, c, t, info, cw.w, cw.clamped};
}

double schoenfeld_events(double alpha, double power, double hr) {
    // alpha = 0.5 is allowed so the zero-effect boundary case is expressible.
    if (!(alpha > 0.0 && alpha <= 0.5)) throw OutOfRange("schoenfeld_events: alpha in (0, 0.5]");
    if (!(power > 0.0 && power < 1.0)) throw OutOfRange("schoenfeld_events: power in (0, 1)");
    if (!(hr > 0.0 && hr < 1.0)) throw OutOfRange("schoenfeld_events: hr in (0, 1)");
    const double z = norm_quantile(1.0 - alpha) + norm_quantile(power);
    const double l = std::log(hr);
    return 4.0 * (z / l) * (z / l);
}

double mdd_hr(double alpha, double events) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw OutOfRange("mdd_hr: alpha in (0, 1)");
    if (!(events > 0.0)) throw OutOfRange("mdd_hr: events > 0");
    return std::exp(-norm_quantile(1.0 - alpha) / std::sqrt(events / 4.0));
}

StageEffects stage_decompose(double hr_overall, double t, double diff) {
    if (!(hr_overall > 0.0)) throw OutOfRange("stage_decompose: hr_overall > 0");
    if (!(t > 0.0 && t < 1.0)) throw OutOfRange("stage_decompose: t in (0, 1)");
    const double e = -std::log(hr_overall);
    const double e1 = e + (1.0 - t) * diff;
    const double e2 = e - t * diff;
    return StageEffects{hr_overall, std::exp(-e1), std::exp(-e2), diff};
}

double stage2_nominal_p(double hr_stage2, double events_stage2) {
    if (!(hr_stage2 > 0.0)) throw OutOfRange("stage2_nominal_p: hr > 0");
    if (!(events_stage2 > 0.0)) throw OutOfRange("stage2_nominal_p: events > 0");
    const double z = -std::log(hr_stage2) * std::sqrt(events_stage2 / 4.0);
    return norm_sf(z);
}

namespace {
void check_ti(double t, double info, const char* who) {
    if (!(t > 0.0 && t < 1.0)) throw OutOfRange(std::string(who) + ": t in (0, 1)");
    if (!(info > 0.0)) throw OutOfRange(std::string(who) + ": I > 0");
}
}  // namespace

CovMatrix sigma1(double t, double info) {
    check_ti(t, info, "sigma1");
    const double diag = 1.0 / (t * info) + 1.0 / ((1.0 - t) * info);
    const double off = 1.0 / (2.0 * t * info) + 1.0 / ((1.0 - t) * info);
    CovMatrix s(2);
    s(0, 0) = s(1, 1) = diag;
    s(0, 1) = s(1, 0) = off;
    return s;
}

CovMatrix sigma2(double t, double info) {
    check_ti(t, info, "sigma2");
    const CovMatrix s1 = sigma1(t, info);
    const double b = -1.0 / (2.0 * std::sqrt(info));
    CovMatrix s(4);
    s(0, 0) = s(1, 1) = s1(0, 0);
    s(0, 1) = s(1, 0) = s1(0, 1);
    s(0, 2) = s(2, 0) = 0.0;
    s(1, 3) = s(3, 1) = 0.0;
    s(0, 3) = s(3, 0) = b;
    s(1, 2) = s(2, 1) = b;
    s(2, 2) = s(3, 3) = 1.0;
    s(2, 3) = s(3, 2) = 1.0 - t / 2.0;
    return s;
}

CovMatrix sigma3(double t, double info) {
    check_ti(t, info, "sigma3");
    const CovMatrix s1 = sigma1(t, info);
    const double b = -1.0 / std::sqrt((1.0 - t) * info);
    CovMatrix s(3);
    s(0, 0) = s(1, 1) = s1(0, 0);
    s(0, 1) = s(1, 0) = s1(0, 1);
    s(0, 2) = s(2, 0) = b;
    s(1, 2) = s(2, 1) = b;
    s(2, 2) = 1.0;
    return s;
}

}  // namespace adjalpha
