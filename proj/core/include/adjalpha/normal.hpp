#pragma once

namespace adjalpha {

/// Standard normal CDF, accurate in both tails (erfc-based).
double norm_cdf(double x);

/// Upper tail P(Z > x).
double norm_sf(double x);

/// Standard normal density.
double norm_pdf(double x);

/// Inverse CDF. p <= 0 maps to -inf, p >= 1 to +inf.
double norm_quantile(double p);

}  // namespace adjalpha
