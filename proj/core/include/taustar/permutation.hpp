#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "taustar/estimators.hpp"

namespace taustar {

enum class Sidedness { OneSidedLarge, TwoSidedAbs };
enum class TestMode { Exact, MonteCarlo };

struct TestResult {
    std::string statistic_id;
    double observed = 0.0;
    double p_value = 1.0;
    std::uint64_t resamples = 0;
    std::uint64_t exceed_count = 0;  // resamples with statistic >= observed (after transform)
    std::uint64_t seed = 0;
    TestMode mode = TestMode::MonteCarlo;
    Sidedness sidedness = Sidedness::OneSidedLarge;
};

struct PermutationOptions {
    std::uint64_t resamples = 10000;
    std::uint64_t seed = 0;
    std::optional<Sidedness> sidedness;  // per-statistic default when unset
    unsigned workers = 1;                // 0 = hardware concurrency
};

/// Registered statistics: taustar, taustar_table, kendall, chisq, hoeffding,
/// dewet.
bool statistic_registered(std::string_view name);
std::vector<std::string> registered_statistics();

/// kendall defaults to TwoSidedAbs, everything else to OneSidedLarge.
Sidedness default_sidedness(std::string_view name);

/// The statistic of (xs, ys o perm); perm[i] is the original index of the
/// y-value placed at position i.  Heavy precomputation happens at creation,
/// so one function serves many permutations; create one per worker.
using StatisticFn = std::function<double(std::span<const std::uint32_t>)>;
StatisticFn make_statistic_fn(std::string_view name, const PairedSample& sample);

/// Monte Carlo permutation test; resample b uses the (seed, b) substream, so
/// the result does not depend on the number of workers.
/// p = (1 + exceed_count) / (1 + resamples).
TestResult permutation_test(const PairedSample& sample, std::string_view statistic,
                            const PermutationOptions& options = {});

/// Full enumeration of all n! permutations (n <= 8);
/// p = exceed_count / n!, with the identity permutation counted.
TestResult exact_permutation_test(const PairedSample& sample, std::string_view statistic,
                                  std::optional<Sidedness> sidedness = {});

/// sqrt(p (1 - p) / resamples).
double mc_stderr(double p, std::uint64_t resamples);

}  // namespace taustar
