#include "adjalpha/mvn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "adjalpha/errors.hpp"
#include "adjalpha/normal.hpp"

namespace adjalpha {

CovMatrix::CovMatrix(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw DimensionMismatch("CovMatrix dimension must be 1..4");
}

Rectangle Rectangle::below(std::vector<double> up) {
    Rectangle r;
    r.lower.assign(up.size(), -kInf);
    r.upper = std::move(up);
    return r;
}

Rectangle Rectangle::above(std::vector<double> lo) {
    Rectangle r;
    r.upper.assign(lo.size(), kInf);
    r.lower = std::move(lo);
    return r;
}

namespace {

void check_symmetric(const CovMatrix& sigma) {
    const int d = sigma.dim();
    double max_abs = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) max_abs = std::max(max_abs, std::fabs(sigma(i, j)));
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (std::fabs(sigma(i, j) - sigma(j, i)) > 1e-12 * std::max(max_abs, 1.0))
                throw OutOfRange("covariance matrix not symmetric");
}

}  // namespace

CovMatrix cholesky(const CovMatrix& sigma) {
    const int d = sigma.dim();
    check_symmetric(sigma);
    double max_diag = 0.0;
    for (int i = 0; i < d; ++i) max_diag = std::max(max_diag, sigma(i, i));

    const double pivot_floor = 1e-12 * max_diag;
    CovMatrix lower(d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = sigma(i, j);
            for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
            if (i == j) {
                if (s <= pivot_floor) throw NotPositiveDefinite("cholesky: pivot <= 1e-12 * max diagonal");
                lower(i, i) = std::sqrt(s);
            } else {
                lower(i, j) = s / lower(j, j);
            }
        }
    }
    return lower;
}

namespace {

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes on [-1,1], Newton iteration on the recurrence.

struct GlRule {
    std::vector<double> x;
    std::vector<double> w;
};

GlRule make_gl(int n) {
    GlRule r;
    r.x.resize(n);
    r.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return r;
}

const GlRule& gl48() {
    static const GlRule r = make_gl(48);
    return r;
}
const GlRule& gl128() {
    static const GlRule r = make_gl(128);
    return r;
}

// ---------------------------------------------------------------------------
// Bivariate normal CDF P(X < h, Y < k), unit variances, correlation rho.
// Drezner-Genz style: Phi(h)Phi(k) plus a quadrature over theta = asin(r).

double bvn_cdf(double h, double k, double rho) {
    if (h == -kInf || k == -kInf) return 0.0;
    if (h == kInf && k == kInf) return 1.0;
    if (h == kInf) return norm_cdf(k);
    if (k == kInf) return norm_cdf(h);

    rho = std::clamp(rho, -1.0, 1.0);
    double p = norm_cdf(h) * norm_cdf(k);
    if (rho == 0.0) return p;

    const GlRule& gl = std::fabs(rho) > 0.95 ? gl128() : gl48();
    const double theta_max = std::asin(rho);
    const double hk = h * k;
    const double hs = 0.5 * (h * h + k * k);
    double sum = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
        const double theta = 0.5 * theta_max * (gl.x[i] + 1.0);
        const double sn = std::sin(theta);
        const double cs2 = 1.0 - sn * sn;
        sum += gl.w[i] * std::exp((hk * sn - hs) / cs2);
    }
    p += sum * 0.5 * theta_max / (2.0 * M_PI);
    return std::clamp(p, 0.0, 1.0);
}

double bvn_rect(double a1, double b1, double a2, double b2, double rho) {
    return bvn_cdf(b1, b2, rho) - bvn_cdf(a1, b2, rho) - bvn_cdf(b1, a2, rho) + bvn_cdf(a1, a2, rho);
}

// ---------------------------------------------------------------------------
// Genz sequential-conditioning problem over a possibly rank-deficient
// factorization. Variables whose residual variance vanishes (linear
// combinations of earlier ones, e.g. the pooled statistics built from three
// underlying normals) become extra interval constraints on the pivot level
// carrying their last nonzero coefficient.

struct GenzProblem {
    int rank = 0;

    // Pivot level k: triangular row over y_0..y_k and its bounds.
    double lrow[CovMatrix::kMaxDim][CovMatrix::kMaxDim] = {};
    double lo[CovMatrix::kMaxDim] = {};
    double hi[CovMatrix::kMaxDim] = {};

    // Dependent rows: coefficients over y_0..y_level and their bounds.
    struct Dependent {
        int level;
        double coef[CovMatrix::kMaxDim];
        double lo;
        double hi;
    };
    int num_dep = 0;
    Dependent dep[CovMatrix::kMaxDim];

    // Intersected standardized interval for Y_k given y_0..y_{k-1}.
    void interval_at(int k, const double* y, double& zlo, double& zhi) const {
        double m = 0.0;
        for (int j = 0; j < k; ++j) m += lrow[k][j] * y[j];
        const double diag = lrow[k][k];
        zlo = (lo[k] == -kInf) ? -kInf : (lo[k] - m) / diag;
        zhi = (hi[k] == kInf) ? kInf : (hi[k] - m) / diag;
        for (int q = 0; q < num_dep; ++q) {
            const Dependent& dr = dep[q];
            if (dr.level != k) continue;
            double md = 0.0;
            for (int j = 0; j < k; ++j) md += dr.coef[j] * y[j];
            const double ck = dr.coef[k];
            double l2, h2;
            if (ck > 0.0) {
                l2 = (dr.lo == -kInf) ? -kInf : (dr.lo - md) / ck;
                h2 = (dr.hi == kInf) ? kInf : (dr.hi - md) / ck;
            } else {
                l2 = (dr.hi == kInf) ? -kInf : (dr.hi - md) / ck;
                h2 = (dr.lo == -kInf) ? kInf : (dr.lo - md) / ck;
            }
            zlo = std::max(zlo, l2);
            zhi = std::min(zhi, h2);
        }
    }

    double mass_at(int k, const double* y) const {
        double zlo, zhi;
        interval_at(k, y, zlo, zhi);
        const double dlo = (zlo == -kInf) ? 0.0 : norm_cdf(zlo);
        const double dhi = (zhi == kInf) ? 1.0 : norm_cdf(zhi);
        return std::max(dhi - dlo, 0.0);
    }

    double eval(const double* u) const {
        double y[CovMatrix::kMaxDim];
        double f = 1.0;
        for (int k = 0; k < rank; ++k) {
            double zlo, zhi;
            interval_at(k, y, zlo, zhi);
            const double dlo = (zlo == -kInf) ? 0.0 : norm_cdf(zlo);
            const double dhi = (zhi == kInf) ? 1.0 : norm_cdf(zhi);
            if (dhi <= dlo) return 0.0;
            f *= dhi - dlo;
            if (k + 1 < rank) {
                double z = dlo + u[k] * (dhi - dlo);
                z = std::clamp(z, 1e-300, 1.0 - 1e-16);
                y[k] = norm_quantile(z);
            }
        }
        return f;
    }

    bool deps_only_at_last_level() const {
        for (int q = 0; q < num_dep; ++q)
            if (dep[q].level != rank - 1) return false;
        return true;
    }
};

// Rank-revealing factorization in a caller-chosen variable order.
// Throws NotPositiveDefinite if the matrix is indefinite.
GenzProblem factorize(const CovMatrix& sigma, const std::vector<int>& order,
                      const std::vector<double>& lower, const std::vector<double>& upper) {
    const int d = static_cast<int>(order.size());
    double max_diag = 0.0;
    for (int i : order) max_diag = std::max(max_diag, sigma(i, i));
    const double zero_floor = 1e-12 * std::max(max_diag, 1.0);

    GenzProblem prob;
    int pivots[CovMatrix::kMaxDim];  // original index of each pivot level

    for (int idx = 0; idx < d; ++idx) {
        const int v = order[idx];
        double coef[CovMatrix::kMaxDim];
        double resid = sigma(v, v);
        for (int j = 0; j < prob.rank; ++j) {
            double s = sigma(v, pivots[j]);
            for (int m = 0; m < j; ++m) s -= coef[m] * prob.lrow[j][m];
            coef[j] = s / prob.lrow[j][j];
            resid -= coef[j] * coef[j];
        }
        if (resid > zero_floor) {
            const int k = prob.rank;
            for (int j = 0; j < k; ++j) prob.lrow[k][j] = coef[j];
            prob.lrow[k][k] = std::sqrt(resid);
            prob.lo[k] = lower[v];
            prob.hi[k] = upper[v];
            pivots[k] = v;
            ++prob.rank;
        } else if (resid > -1e-8 * std::max(max_diag, 1.0)) {
            // Linearly dependent on earlier pivots.
            int lev = -1;
            for (int j = prob.rank - 1; j >= 0; --j) {
                if (std::fabs(coef[j]) > 1e-10 * std::sqrt(max_diag)) {
                    lev = j;
                    break;
                }
            }
            if (lev < 0) {
                // Zero-variance coordinate: a point mass at 0.
                if (lower[v] > 0.0 || upper[v] < 0.0) {
                    prob.rank = -1;  // marks an impossible event
                    return prob;
                }
                continue;
            }
            GenzProblem::Dependent& dr = prob.dep[prob.num_dep++];
            dr.level = lev;
            for (int j = 0; j <= lev; ++j) dr.coef[j] = coef[j];
            dr.lo = lower[v];
            dr.hi = upper[v];
        } else {
            throw NotPositiveDefinite("mvn_rect_prob: covariance matrix is indefinite");
        }
    }
    return prob;
}

// ---------------------------------------------------------------------------
// Nested adaptive Gauss-Legendre for rank 2 and 3 problems. Bounds coming
// from dependent rows are affine in the last conditioned variable, so the
// min/max kinks they introduce sit at exactly computable split points and
// every sub-integrand is smooth.

const GlRule& gl12() {
    static const GlRule r = make_gl(12);
    return r;
}
const GlRule& gl32() {
    static const GlRule r = make_gl(32);
    return r;
}

template <typename F>
double gl_rule_on(const GlRule& g, const F& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
    return s * h;
}

template <typename F>
double gl_on(const F& f, double a, double b) {
    const GlRule& g = gl12();
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
    return s * h;
}

template <typename F>
double adaptive_gl(const F& f, double a, double b, double tol, int depth = 0) {
    const double whole = gl_on(f, a, b);
    const double mid = 0.5 * (a + b);
    const double two = gl_on(f, a, mid) + gl_on(f, mid, b);
    if (std::fabs(whole - two) <= tol || depth >= 20) return two;
    return adaptive_gl(f, a, mid, 0.5 * tol, depth + 1) + adaptive_gl(f, mid, b, 0.5 * tol, depth + 1);
}

// Crossing points in y_{k-1} of the affine bounds acting on level k; the
// min/max in interval_at is piecewise smooth between them.
int level_kinks_y(const GenzProblem& p, int k, const double* y, double* xs) {
    struct Affine {
        double a0;
        double slope;
    };
    Affine fn[8];
    int n = 0;

    double mp = 0.0;
    for (int j = 0; j < k - 1; ++j) mp += p.lrow[k][j] * y[j];
    const double diag = p.lrow[k][k];
    const double sl = -p.lrow[k][k - 1] / diag;
    if (p.hi[k] != kInf) fn[n++] = {(p.hi[k] - mp) / diag, sl};
    if (p.lo[k] != -kInf) fn[n++] = {(p.lo[k] - mp) / diag, sl};

    for (int q = 0; q < p.num_dep; ++q) {
        const GenzProblem::Dependent& dr = p.dep[q];
        if (dr.level != k) continue;
        double md = 0.0;
        for (int j = 0; j < k - 1; ++j) md += dr.coef[j] * y[j];
        const double ck = dr.coef[k];
        const double sd = -dr.coef[k - 1] / ck;
        if (dr.hi != kInf) fn[n++] = {(dr.hi - md) / ck, sd};
        if (dr.lo != -kInf) fn[n++] = {(dr.lo - md) / ck, sd};
    }

    int nx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double ds = fn[i].slope - fn[j].slope;
            if (std::fabs(ds) < 1e-14) continue;
            xs[nx++] = (fn[j].a0 - fn[i].a0) / ds;
        }
    std::sort(xs, xs + nx);
    return nx;
}

int level_kinks(const GenzProblem& p, int k, const double* y, double d, double m, double* vs) {
    double xs[32];
    const int nx = level_kinks_y(p, k, y, xs);
    int nv = 0;
    for (int i = 0; i < nx; ++i) {
        const double v = (norm_cdf(xs[i]) - d) / m;
        if (v > 1e-12 && v < 1.0 - 1e-12) vs[nv++] = v;
    }
    return nv;
}

double first_level_mass(const GenzProblem& p, double& d0, double& m0) {
    double zlo, zhi;
    p.interval_at(0, nullptr, zlo, zhi);
    const double dlo = (zlo == -kInf) ? 0.0 : norm_cdf(zlo);
    const double dhi = (zhi == kInf) ? 1.0 : norm_cdf(zhi);
    d0 = dlo;
    m0 = dhi - dlo;
    return m0;
}

template <typename F>
double integrate_with_kinks(const F& f, const double* vs, int nv, double tol) {
    double total = 0.0;
    double a = 0.0;
    for (int i = 0; i <= nv; ++i) {
        const double b = (i == nv) ? 1.0 : vs[i];
        if (b > a) total += adaptive_gl(f, a, b, tol * (b - a), 0);
        a = b;
    }
    return total;
}

double quad_rank2(const GenzProblem& p, double tol) {
    double d0, m0;
    if (first_level_mass(p, d0, m0) <= 0.0) return 0.0;

    auto f = [&](double u0) {
        double y[1];
        const double z = std::clamp(d0 + u0 * m0, 1e-300, 1.0 - 1e-16);
        y[0] = norm_quantile(z);
        return p.mass_at(1, y);
    };
    double vs[32];
    const int nv = level_kinks(p, 1, nullptr, d0, m0, vs);
    const double sub_tol = 0.45 * tol / std::max(m0, 1e-12);
    return std::clamp(m0 * integrate_with_kinks(f, vs, nv, sub_tol), 0.0, 1.0);
}

double quad_rank3(const GenzProblem& p, double tol) {
    double d0, m0;
    if (first_level_mass(p, d0, m0) <= 0.0) return 0.0;
    const double sub_tol = 0.45 * tol / std::max(m0, 1e-12);

    auto outer = [&](double u0) {
        double y[2];
        const double z0 = std::clamp(d0 + u0 * m0, 1e-300, 1.0 - 1e-16);
        y[0] = norm_quantile(z0);

        double zlo1, zhi1;
        p.interval_at(1, y, zlo1, zhi1);
        const double ylo = std::max(zlo1, -8.5);
        const double yhi = std::min(zhi1, 8.5);
        if (yhi <= ylo) return 0.0;

        // The inner level is integrated in y-space, where the integrand is
        // analytic between kinks; a fixed rule there keeps the outer
        // integrand smooth in u0 (an adaptive inner loop would add
        // level-flipping noise that defeats the outer error estimate).
        auto inner = [&](double y1) {
            y[1] = y1;
            return norm_pdf(y1) * p.mass_at(2, y);
        };
        double xs[32];
        const int nx = level_kinks_y(p, 2, y, xs);
        double total = 0.0;
        double a = ylo;
        for (int i = 0; i <= nx; ++i) {
            const double b = (i == nx) ? yhi : std::clamp(xs[i], ylo, yhi);
            if (b > a) {
                const int np = std::max(1, static_cast<int>(std::ceil((b - a) / 2.5)));
                for (int q = 0; q < np; ++q)
                    total += gl_rule_on(gl32(), inner, a + (b - a) * q / np,
                                        a + (b - a) * (q + 1) / np);
            }
            a = std::max(a, b);
        }
        return total;
    };
    return std::clamp(m0 * adaptive_gl(outer, 0.0, 1.0, sub_tol, 0), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Deterministic shifted Kronecker lattice with baker periodization.

constexpr int kNumShifts = 8;
constexpr std::int64_t kInitialN = 2048;
constexpr std::int64_t kMaxNPerShift = 1 << 19;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

struct ShiftTable {
    double delta[kNumShifts][3];
};

const ShiftTable& shifts() {
    static const ShiftTable t = [] {
        ShiftTable tt{};
        std::uint64_t state = 0x0123456789ABCDEFull;
        for (auto& row : tt.delta)
            for (double& v : row) {
                state = splitmix64(state);
                v = static_cast<double>(state >> 11) * 0x1.0p-53;
            }
        return tt;
    }();
    return t;
}

double genz_lattice(const GenzProblem& prob, double tol) {
    const int s = prob.rank - 1;
    if (s == 0) return prob.eval(nullptr);

    static const double alpha[3] = {0.41421356237309515,   // frac(sqrt 2)
                                    0.7320508075688772,    // frac(sqrt 3)
                                    0.2360679774997896};   // frac(sqrt 5)
    const ShiftTable& sh = shifts();

    double sums[kNumShifts] = {};
    std::int64_t n = 0;
    std::int64_t target = kInitialN;
    double value = 0.0;

    while (true) {
        for (int q = 0; q < kNumShifts; ++q) {
            double acc = 0.0;
            for (std::int64_t k = n + 1; k <= target; ++k) {
                double u[3];
                for (int j = 0; j < s; ++j) {
                    const double v = std::fmod(static_cast<double>(k) * alpha[j] + sh.delta[q][j], 1.0);
                    u[j] = std::fabs(2.0 * v - 1.0);  // baker periodization
                }
                acc += prob.eval(u);
            }
            sums[q] += acc;
        }
        n = target;

        double mean = 0.0;
        for (double sq : sums) mean += sq / static_cast<double>(n);
        mean /= kNumShifts;
        double var = 0.0;
        for (double sq : sums) {
            const double m = sq / static_cast<double>(n);
            var += (m - mean) * (m - mean);
        }
        var /= (kNumShifts - 1);
        const double err = 3.0 * std::sqrt(var / kNumShifts);
        value = mean;
        if (err <= 0.9 * tol || n >= kMaxNPerShift) break;
        target = n * 2;
    }
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace

double mvn_rect_prob(const Rectangle& rect, const CovMatrix& sigma, double tol) {
    const int d = sigma.dim();
    if (static_cast<int>(rect.lower.size()) != d || static_cast<int>(rect.upper.size()) != d)
        throw DimensionMismatch("mvn_rect_prob: rectangle/covariance dimension mismatch");
    if (!(tol >= 1e-10 && tol <= 1e-3)) throw OutOfRange("mvn_rect_prob: tol must be in [1e-10, 1e-3]");
    check_symmetric(sigma);

    for (int i = 0; i < d; ++i) {
        if (rect.lower[i] > rect.upper[i]) throw OutOfRange("mvn_rect_prob: lower > upper");
        if (rect.lower[i] == rect.upper[i]) return 0.0;
    }

    // Marginalize out unconstrained coordinates.
    std::vector<int> keep;
    for (int i = 0; i < d; ++i)
        if (!(rect.lower[i] == -kInf && rect.upper[i] == kInf)) keep.push_back(i);
    const int m = static_cast<int>(keep.size());
    if (m == 0) return 1.0;

    if (m == 1) {
        const int i = keep[0];
        const double sd = std::sqrt(sigma(i, i));
        const double lo = rect.lower[i] == -kInf ? 0.0 : norm_cdf(rect.lower[i] / sd);
        const double hi = rect.upper[i] == kInf ? 1.0 : norm_cdf(rect.upper[i] / sd);
        return std::max(hi - lo, 0.0);
    }

    if (m == 2) {
        const int i = keep[0], j = keep[1];
        const double si = std::sqrt(sigma(i, i));
        const double sj = std::sqrt(sigma(j, j));
        const double rho = sigma(i, j) / (si * sj);
        if (std::fabs(rho) < 1.0 - 1e-12) {
            auto std_lo = [](double v, double sd) { return v == -kInf ? -kInf : v / sd; };
            auto std_hi = [](double v, double sd) { return v == kInf ? kInf : v / sd; };
            return std::clamp(bvn_rect(std_lo(rect.lower[i], si), std_hi(rect.upper[i], si),
                                       std_lo(rect.lower[j], sj), std_hi(rect.upper[j], sj), rho),
                              0.0, 1.0);
        }
        // |rho| = 1 falls through to the rank-deficient path.
    }

    // Order variables by marginal interval mass, tightest first.
    std::vector<double> mass(d, 0.0);
    for (int i : keep) {
        const double sd = std::sqrt(sigma(i, i));
        const double lo = rect.lower[i] == -kInf ? 0.0 : norm_cdf(rect.lower[i] / sd);
        const double hi = rect.upper[i] == kInf ? 1.0 : norm_cdf(rect.upper[i] / sd);
        mass[i] = hi - lo;
    }
    std::vector<int> order = keep;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return mass[i] < mass[j]; });

    const GenzProblem prob = factorize(sigma, order, rect.lower, rect.upper);
    if (prob.rank < 0) return 0.0;
    if (prob.rank == 0) return 1.0;
    if (prob.rank == 1) return std::clamp(prob.eval(nullptr), 0.0, 1.0);
    if (prob.deps_only_at_last_level()) {
        if (prob.rank == 2) return quad_rank2(prob, tol);
        if (prob.rank == 3) return quad_rank3(prob, tol);
    }
    return genz_lattice(prob, tol);
}

}  // namespace adjalpha
