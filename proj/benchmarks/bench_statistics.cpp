#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "taustar/estimators.hpp"

using namespace taustar;

namespace {

PairedSample random_sample(std::size_t n, int levels) {
    std::mt19937_64 gen(42);
    std::uniform_int_distribution<int> val(0, levels - 1);
    PairedSample s;
    for (std::size_t i = 0; i < n; ++i) {
        s.xs.push_back(val(gen));
        s.ys.push_back(val(gen));
    }
    return s;
}

}  // namespace

static void BM_t_star_naive(benchmark::State& state) {
    const auto s = random_sample(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(detail::t_star_v_numerator_naive(s.xs, s.ys));
    }
}
BENCHMARK(BM_t_star_naive)->Arg(12)->Arg(24)->Arg(48);

static void BM_t_star_pattern_counts(benchmark::State& state) {
    const auto s = random_sample(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(detail::t_star_v_numerator(s.xs, s.ys));
    }
}
BENCHMARK(BM_t_star_pattern_counts)->Arg(12)->Arg(24)->Arg(48)->Arg(200)->Arg(1000);

static void BM_t_star_table(benchmark::State& state) {
    const auto s = random_sample(static_cast<std::size_t>(state.range(0)), 8);
    const auto table = detail::tabulate(s);
    for (auto _ : state) {
        benchmark::DoNotOptimize(detail::t_star_table_numerator(table));
    }
}
BENCHMARK(BM_t_star_table)->Arg(24)->Arg(200)->Arg(1000);

static void BM_hoeffding_h(benchmark::State& state) {
    const auto s = random_sample(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hoeffding_h(s));
    }
}
BENCHMARK(BM_hoeffding_h)->Arg(24)->Arg(64)->Arg(256);

static void BM_dewet_pairs(benchmark::State& state) {
    const auto s = random_sample(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(detail::dewet_pair_value(s.xs, s.ys));
    }
}
BENCHMARK(BM_dewet_pairs)->Arg(24)->Arg(64)->Arg(256);
