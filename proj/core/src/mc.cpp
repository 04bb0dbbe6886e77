#include "adjalpha/mc.hpp"

#include <cmath>

#include "adjalpha/errors.hpp"
#include "adjalpha/normal.hpp"

namespace adjalpha {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

void check_cfg(const McConfig& cfg) {
    if (cfg.replicates < 10'000) throw OutOfRange("McConfig: replicates must be >= 10^4");
    if (cfg.chunk_size == 0) throw OutOfRange("McConfig: chunk_size must be > 0");
}

}  // namespace

McRng::McRng(std::uint64_t seed, std::uint64_t chunk_index)
    : gen_(splitmix64(seed ^ splitmix64(chunk_index))) {}

double McRng::uniform() {
    // 53-bit mantissa, strictly inside (0, 1).
    const std::uint64_t bits = gen_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double McRng::normal() { return norm_quantile(uniform()); }

ModelDraw draw_model(McRng& rng, const EffectSpec& effects) {
    const double z0 = rng.normal();
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    // corr(Y11, Y12) = 0.5 from the shared control arm.
    return ModelDraw{z0 + effects.mu11,
                     0.5 * z0 + std::sqrt(0.75) * z1 + effects.mu12,
                     z2 + effects.mu2};
}

DoseSelection select_dose(double y11, double y12, bool winner_flag) {
    const bool first = winner_flag ? (y11 >= y12) : (y11 < y12);
    return first ? DoseSelection{0, y11} : DoseSelection{1, y12};
}

McEstimate simulate_power(const DesignParams& params, double astar, const EffectSpec& effects,
                          const McConfig& cfg) {
    check_cfg(cfg);
    if (!(astar > 0.0 && astar < 0.5)) throw OutOfRange("simulate: astar in (0, 0.5)");

    const double z = norm_quantile(1.0 - astar);
    const double inv_s1 = 1.0 / std::sqrt(params.t * params.info);
    const double inv_s2 = 1.0 / std::sqrt((1.0 - params.t) * params.info);
    const double sq_t = std::sqrt(params.t);
    const double sq_1t = std::sqrt(1.0 - params.t);

    const std::uint64_t n = cfg.replicates;
    const std::uint64_t chunks = (n + cfg.chunk_size - 1) / cfg.chunk_size;

    std::uint64_t rejections = 0;
    for (std::uint64_t ci = 0; ci < chunks; ++ci) {
        McRng rng(cfg.seed, ci);
        const std::uint64_t lo = ci * cfg.chunk_size;
        const std::uint64_t hi = std::min(n, lo + cfg.chunk_size);
        std::uint64_t count = 0;
        for (std::uint64_t k = lo; k < hi; ++k) {
            const ModelDraw m = draw_model(rng, effects);
            const bool winner = rng.uniform() < params.w;
            const double y1s = select_dose(m.y11, m.y12, winner).y1s;
            const double ds = y1s * inv_s1 - m.y2s * inv_s2;
            bool combine = false;
            switch (params.strategy) {
                case StrategyKind::Conservative: combine = ds < params.c; break;
                case StrategyKind::Aggressive: combine = ds > -params.c; break;
                case StrategyKind::Neutral: combine = std::fabs(ds) < params.c; break;
            }
            const double stat = combine ? sq_t * y1s + sq_1t * m.y2s : m.y2s;
            if (stat > z) ++count;
        }
        rejections += count;
    }

    const double p = static_cast<double>(rejections) / static_cast<double>(n);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return McEstimate{p, se, n, cfg.seed};
}

McEstimate simulate_type_one(const DesignParams& params, double astar, const McConfig& cfg) {
    return simulate_power(params, astar, EffectSpec{}, cfg);
}

}  // namespace adjalpha
