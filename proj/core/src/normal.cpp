#include "adjalpha/normal.hpp"

#include <cmath>
#include <limits>

namespace adjalpha {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double norm_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_quantile(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    if (p == 0.5) return 0.0;

    // Work in the lower tail; reflect at the end.
    const bool flip = p > 0.5;
    const double q = flip ? 1.0 - p : p;

    // Abramowitz & Stegun 26.2.23 starting guess (|err| < 4.5e-4),
    // polished with two Halley steps to full double precision.
    const double s = std::sqrt(-2.0 * std::log(q));
    double x = -(s - (2.30753 + 0.27061 * s) / (1.0 + s * (0.99229 + 0.04481 * s)));

    for (int it = 0; it < 2; ++it) {
        const double err = norm_cdf(x) - q;
        const double r = err / norm_pdf(x);
        x -= r / (1.0 + 0.5 * r * x);
    }
    return flip ? -x : x;
}

}  // namespace adjalpha
