#include <cmath>

#include <benchmark/benchmark.h>

#include "adjalpha/alpha.hpp"
#include "adjalpha/mc.hpp"
#include "adjalpha/mvn.hpp"
#include "adjalpha/normal.hpp"
#include "adjalpha/trial.hpp"

using namespace adjalpha;

namespace {

const double kC = std::log(1.1);
const double kZ = norm_quantile(1.0 - 0.0199);

void bm_bvn(benchmark::State& state) {
    CovMatrix m(2);
    m(0, 0) = m(1, 1) = 1.0;
    m(0, 1) = m(1, 0) = 0.65;
    const Rectangle r{{-0.5, -1.0}, {1.2, 0.8}};
    for (auto _ : state) benchmark::DoNotOptimize(mvn_rect_prob(r, m));
}
BENCHMARK(bm_bvn);

void bm_mvn3(benchmark::State& state) {
    const CovMatrix s3 = sigma3(0.3, 127.5);
    const Rectangle r{{-kInf, -kInf, kZ}, {kC, kC, kInf}};
    for (auto _ : state) benchmark::DoNotOptimize(mvn_rect_prob(r, s3));
}
BENCHMARK(bm_mvn3);

void bm_mvn4_rank_deficient(benchmark::State& state) {
    const CovMatrix s2 = sigma2(0.3, 127.5);
    const Rectangle r = Rectangle::below({kC, kC, kZ, kZ});
    for (auto _ : state) benchmark::DoNotOptimize(mvn_rect_prob(r, s2));
}
BENCHMARK(bm_mvn4_rank_deficient);

void bm_type_one_error(benchmark::State& state) {
    const auto p = DesignParams::make(0.025, StrategyKind::Neutral, kC, 0.3, 127.5, 0.6);
    for (auto _ : state) benchmark::DoNotOptimize(type_one_error(p, 0.0199));
}
BENCHMARK(bm_type_one_error);

void bm_solve_alpha_star(benchmark::State& state) {
    const auto p = DesignParams::make(0.025, StrategyKind::Neutral, kC, 0.3, 127.5, 0.6);
    for (auto _ : state) benchmark::DoNotOptimize(solve_alpha_star(p));
}
BENCHMARK(bm_solve_alpha_star);

void bm_simulate_100k(benchmark::State& state) {
    const auto p = DesignParams::make(0.025, StrategyKind::Neutral, kC, 0.3, 127.5, 0.6);
    McConfig cfg;
    cfg.replicates = 100'000;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_type_one(p, 0.0199, cfg));
}
BENCHMARK(bm_simulate_100k);

}  // namespace

BENCHMARK_MAIN();
