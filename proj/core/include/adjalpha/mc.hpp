#pragma once

#include <cstdint>
#include <random>

#include "adjalpha/trial.hpp"

namespace adjalpha {

struct McConfig {
    std::uint64_t replicates = 1'000'000;
    std::uint64_t seed = 20240901;
    std::uint64_t chunk_size = 1u << 16;  // replicates per deterministic sub-stream
};

struct McEstimate {
    double estimate;
    double std_error;  // binomial: sqrt(p(1-p)/n)
    std::uint64_t replicates;
    std::uint64_t seed;
};

/// Mean shifts of (Y11, Y12, Y2s) in sd units; all zero under the null.
struct EffectSpec {
    double mu11 = 0.0;
    double mu12 = 0.0;
    double mu2 = 0.0;
};

/// Uniform/normal stream for one chunk; normals via inverse-CDF so the
/// stream is identical across standard library implementations.
class McRng {
public:
    McRng(std::uint64_t seed, std::uint64_t chunk_index);

    double uniform();  // (0, 1)
    double normal();

private:
    std::mt19937_64 gen_;
};

struct ModelDraw {
    double y11;
    double y12;
    double y2s;
};

/// (y11, y12) unit-variance with correlation 0.5, y2s independent.
ModelDraw draw_model(McRng& rng, const EffectSpec& effects);

struct DoseSelection {
    int index;    // 0 or 1
    double y1s;
};

/// winner_flag picks max(y11, y12), otherwise min.
DoseSelection select_dose(double y11, double y12, bool winner_flag);

/// Rejection frequency of the full decision procedure under the null.
McEstimate simulate_type_one(const DesignParams& params, double astar, const McConfig& cfg);

/// Rejection frequency under shifted means; zero effects reproduce
/// simulate_type_one bit-for-bit at the same seed.
McEstimate simulate_power(const DesignParams& params, double astar, const EffectSpec& effects,
                          const McConfig& cfg);

}  // namespace adjalpha
