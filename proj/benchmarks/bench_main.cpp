#include <cmath>

#include <benchmark/benchmark.h>

#include "liouville/construct.hpp"
#include "liouville/criterion.hpp"
#include "liouville/quadrature.hpp"
#include "liouville/verify.hpp"

using namespace liouville;

namespace {

const StructureParams kParams{3, 2.0, 1.0};

void BM_IntegrateSingular(benchmark::State& state) {
    const Tolerance tol{1e-10, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            integrate([](double z) { return 1.0 / std::sqrt(z); }, 0.0, 1.0, tol).value);
    }
}
BENCHMARK(BM_IntegrateSingular);

void BM_IntegrateTail(benchmark::State& state) {
    const Tolerance tol{1e-10, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            integrate_to_infinity([](double x) { return x * x * std::pow(1.0 + x, -4.0); }, 0.0, tol)
                .value);
    }
}
BENCHMARK(BM_IntegrateTail);

void BM_CriterionValuePowerLog(benchmark::State& state) {
    const Nonlinearity f = Nonlinearity::power_log(-2.0, kParams);
    for (auto _ : state) benchmark::DoNotOptimize(criterion_value(f, kParams).value);
}
BENCHMARK(BM_CriterionValuePowerLog);

void BM_ClassifyNumericExpr(benchmark::State& state) {
    const Nonlinearity f = parse_nonlinearity("z^3 * log(e + 1/z)^(-2)");
    for (auto _ : state) benchmark::DoNotOptimize(classify(f, kParams).value);
}
BENCHMARK(BM_ClassifyNumericExpr)->Unit(benchmark::kMillisecond);

void BM_ProfileBuild(benchmark::State& state) {
    ProfileOptions opts;
    opts.cache_nodes = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            RadialProfile::build(Nonlinearity::power(4), kParams, 1.0, opts).sup());
    }
}
BENCHMARK(BM_ProfileBuild)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_ProfileValues(benchmark::State& state) {
    const RadialProfile pr = RadialProfile::build(Nonlinearity::power(4), kParams, 1.0);
    const std::vector<double> grid = log_grid(1e-6, 1e6, 200);
    for (auto _ : state) benchmark::DoNotOptimize(pr.values(grid).back());
}
BENCHMARK(BM_ProfileValues)->Unit(benchmark::kMillisecond);

void BM_FindDelta(benchmark::State& state) {
    const StructureParams large{3, 2.0, 4.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(find_delta(Nonlinearity::power(4), large).delta);
    }
}
BENCHMARK(BM_FindDelta)->Unit(benchmark::kMillisecond);

void BM_VerifyProfile(benchmark::State& state) {
    const RadialProfile pr = RadialProfile::build(Nonlinearity::power(4), kParams, 1.0);
    VerifyOptions opts;
    opts.run_delta_limit = false;
    for (auto _ : state) benchmark::DoNotOptimize(verify_profile(pr, opts).overall);
}
BENCHMARK(BM_VerifyProfile)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
