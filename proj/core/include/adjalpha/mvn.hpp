#pragma once

#include <array>
#include <limits>
#include <vector>

namespace adjalpha {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense symmetric matrix of dimension 1..4 (row-major, fixed storage).
class CovMatrix {
public:
    static constexpr int kMaxDim = 4;

    explicit CovMatrix(int dim);

    double& operator()(int i, int j) { return a_[i * kMaxDim + j]; }
    double operator()(int i, int j) const { return a_[i * kMaxDim + j]; }
    int dim() const { return dim_; }

private:
    int dim_;
    std::array<double, kMaxDim * kMaxDim> a_{};
};

/// Axis-aligned integration region; +-inf bounds are first-class.
struct Rectangle {
    std::vector<double> lower;
    std::vector<double> upper;

    /// (-inf, upper] box.
    static Rectangle below(std::vector<double> up);
    /// [lower, +inf) box.
    static Rectangle above(std::vector<double> lo);
};

/// Lower-triangular factor L with L*L^T = sigma.
/// Throws NotPositiveDefinite when a pivot falls at or below
/// 1e-12 times the largest diagonal entry.
CovMatrix cholesky(const CovMatrix& sigma);

/// P(lower < X < upper) for X ~ N(0, sigma), zero mean, dim 1..4.
///
/// d=1 and d=2 use closed forms (erfc, Drezner-Genz quadrature); d=3 and
/// d=4 use the Genz sequential transform integrated with a deterministic
/// shifted Kronecker lattice, so results are bit-identical across runs.
/// tol is an absolute accuracy target in [1e-10, 1e-3].
double mvn_rect_prob(const Rectangle& rect, const CovMatrix& sigma, double tol = 1e-7);

}  // namespace adjalpha
