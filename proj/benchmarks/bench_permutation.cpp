#include <benchmark/benchmark.h>

#include <variant>

#include "taustar/dataio.hpp"
#include "taustar/permutation.hpp"

using namespace taustar;

static void BM_permutation_test(benchmark::State& state, const char* fixture_name,
                                const char* statistic) {
    const auto table = std::get<ContingencyTable>(fixture(fixture_name).payload);
    const PairedSample sample = expand_table(table);
    PermutationOptions opts;
    opts.resamples = static_cast<std::uint64_t>(state.range(0));
    opts.seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(permutation_test(sample, statistic, opts));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK_CAPTURE(BM_permutation_test, table1_taustar_table, "table1", "taustar_table")
    ->Arg(1000);
BENCHMARK_CAPTURE(BM_permutation_test, table1_taustar_counts, "table1", "taustar")->Arg(1000);
BENCHMARK_CAPTURE(BM_permutation_test, table1_dewet, "table1", "dewet")->Arg(1000);
BENCHMARK_CAPTURE(BM_permutation_test, table2_kendall, "table2", "kendall")->Arg(1000);
BENCHMARK_CAPTURE(BM_permutation_test, table2_chisq, "table2", "chisq")->Arg(1000);
