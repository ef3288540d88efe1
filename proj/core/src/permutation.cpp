#include "taustar/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "taustar/detail/contraction.hpp"
#include "taustar/errors.hpp"
#include "taustar/rng.hpp"

namespace taustar {

namespace {

constexpr std::size_t kMaxTableCategories = 32;
constexpr std::size_t kSignMatrixLimit = 1024;  // n above which kendall skips the n^2 cache

using Perm = std::span<const std::uint32_t>;

StatisticFn make_taustar_fn(const PairedSample& sample) {
    std::size_t dx = 0, dy = 0;
    auto xr = detail::dense_value_ranks(sample.xs, dx);
    auto yr0 = detail::dense_value_ranks(sample.ys, dy);
    const double dn = static_cast<double>(sample.n());
    const double denom = dn * dn * dn * dn;
    return [xr = std::move(xr), yr0 = std::move(yr0), dx, dy, denom,
            yr = std::vector<std::size_t>(sample.n())](Perm perm) mutable {
        for (std::size_t i = 0; i < perm.size(); ++i) yr[i] = yr0[perm[i]];
        return static_cast<double>(detail::t_star_v_numerator_ranks(xr, dx, yr, dy)) / denom;
    };
}

StatisticFn make_taustar_table_fn(const PairedSample& sample) {
    std::size_t dx = 0, dy = 0;
    auto xr = detail::dense_value_ranks(sample.xs, dx);
    auto yr0 = detail::dense_value_ranks(sample.ys, dy);
    if (dx > kMaxTableCategories || dy > kMaxTableCategories) {
        throw resource_error("taustar_table: more than 32 categories per axis");
    }
    std::vector<double> xv(sample.xs.begin(), sample.xs.end());
    std::sort(xv.begin(), xv.end());
    xv.erase(std::unique(xv.begin(), xv.end()), xv.end());
    std::vector<double> yv(sample.ys.begin(), sample.ys.end());
    std::sort(yv.begin(), yv.end());
    yv.erase(std::unique(yv.begin(), yv.end()), yv.end());
    auto kx = detail::a_tensor(xv);
    auto ky = detail::a_tensor(yv);
    const double dn = static_cast<double>(sample.n());
    const double denom = dn * dn * dn * dn;
    return [xr = std::move(xr), yr0 = std::move(yr0), dx, dy, kx = std::move(kx),
            ky = std::move(ky), denom,
            counts = std::vector<std::int64_t>(dx * dy)](Perm perm) mutable {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < perm.size(); ++i) ++counts[xr[i] * dy + yr0[perm[i]]];
        const std::int64_t num =
            detail::contract_quadruple<std::int64_t>(dx, dy, counts.data(), kx.data(), ky.data());
        return static_cast<double>(num) / denom;
    };
}

StatisticFn make_kendall_fn(const PairedSample& sample) {
    const std::size_t n = sample.n();
    const double denom = static_cast<double>(n) * static_cast<double>(n);
    if (n <= kSignMatrixLimit) {
        std::vector<std::int8_t> sx(n * n), sy0(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                sx[i * n + j] = static_cast<std::int8_t>((sample.xs[i] > sample.xs[j]) -
                                                         (sample.xs[i] < sample.xs[j]));
                sy0[i * n + j] = static_cast<std::int8_t>((sample.ys[i] > sample.ys[j]) -
                                                          (sample.ys[i] < sample.ys[j]));
            }
        }
        return [sx = std::move(sx), sy0 = std::move(sy0), n, denom](Perm perm) {
            std::int64_t acc = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::int8_t* sxrow = sx.data() + i * n;
                const std::int8_t* syrow = sy0.data() + static_cast<std::size_t>(perm[i]) * n;
                for (std::size_t j = 0; j < n; ++j) {
                    acc += static_cast<int>(sxrow[j]) * static_cast<int>(syrow[perm[j]]);
                }
            }
            return static_cast<double>(acc) / denom;
        };
    }
    return [xs = sample.xs, ys = sample.ys, n, denom](Perm perm) {
        std::int64_t acc = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const int sx = (xs[i] > xs[j]) - (xs[i] < xs[j]);
                if (sx == 0) continue;
                const double yi = ys[perm[i]], yj = ys[perm[j]];
                acc += sx * ((yi > yj) - (yi < yj));
            }
        }
        return static_cast<double>(acc) / denom;
    };
}

StatisticFn make_chisq_fn(const PairedSample& sample) {
    std::size_t dx = 0, dy = 0;
    auto xr = detail::dense_value_ranks(sample.xs, dx);
    auto yr0 = detail::dense_value_ranks(sample.ys, dy);
    const std::size_t n = sample.n();
    std::vector<std::int64_t> rm(dx, 0), cm(dy, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++rm[xr[i]];
        ++cm[yr0[i]];
    }
    // margins are invariant under permutation, so degeneracy is decided here
    if (dx < 2 || dy < 2) {
        throw degenerate_input_error("chisq: a margin is constant");
    }
    std::vector<double> expected(dx * dy);
    for (std::size_t i = 0; i < dx; ++i) {
        for (std::size_t j = 0; j < dy; ++j) {
            expected[i * dy + j] = static_cast<double>(rm[i]) * static_cast<double>(cm[j]) /
                                   static_cast<double>(n);
        }
    }
    return [xr = std::move(xr), yr0 = std::move(yr0), dx, dy, expected = std::move(expected),
            counts = std::vector<std::int64_t>(dx * dy)](Perm perm) mutable {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < perm.size(); ++i) ++counts[xr[i] * dy + yr0[perm[i]]];
        double chi = 0.0;
        for (std::size_t t = 0; t < counts.size(); ++t) {
            const double d = static_cast<double>(counts[t]) - expected[t];
            chi += d * d / expected[t];
        }
        return chi;
    };
}

StatisticFn make_hoeffding_fn(const PairedSample& sample) {
    const std::size_t n = sample.n();
    const double dn = static_cast<double>(n);
    const double denom = dn * dn * dn * dn * dn;
    return [xs = sample.xs, ys0 = sample.ys, n, denom,
            ys = std::vector<double>(sample.n())](Perm perm) mutable {
        for (std::size_t i = 0; i < n; ++i) ys[i] = ys0[perm[i]];
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::int64_t c12 = 0, c1 = 0, c2 = 0;
            for (std::size_t j = 0; j < n; ++j) {
                const bool lx = xs[j] <= xs[i];
                const bool ly = ys[j] <= ys[i];
                c1 += lx;
                c2 += ly;
                c12 += lx && ly;
            }
            const std::int64_t m = static_cast<std::int64_t>(n) * c12 - c1 * c2;
            sum += static_cast<double>(m) * static_cast<double>(m);
        }
        return sum / denom;
    };
}

StatisticFn make_dewet_fn(const PairedSample& sample) {
    const std::size_t n = sample.n();
    auto gx = detail::midrank_grades(sample.xs);
    auto gy0 = detail::midrank_grades(sample.ys);
    std::vector<double> arow(n, 0.0), brow0(n, 0.0);
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            arow[i] += std::abs(gx[i] - gx[j]);
            brow0[i] += std::abs(gy0[i] - gy0[j]);
        }
        sa += arow[i];
        sb += brow0[i];
    }
    const double dn = static_cast<double>(n);
    return [gx = std::move(gx), gy0 = std::move(gy0), arow = std::move(arow),
            brow0 = std::move(brow0), sa, sb, dn, n,
            gy = std::vector<double>(sample.n())](Perm perm) mutable {
        for (std::size_t i = 0; i < n; ++i) gy[i] = gy0[perm[i]];
        double s11 = 0.0, s10 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double si = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                si += std::abs(gx[i] - gx[j]) * std::abs(gy[i] - gy[j]);
            }
            s11 += si;
            s10 += arow[i] * brow0[perm[i]];
        }
        return (4.0 * dn * dn * s11 + 4.0 * sa * sb - 8.0 * dn * s10) / (dn * dn * dn * dn);
    };
}

double apply_sidedness(double v, Sidedness s) {
    return s == Sidedness::TwoSidedAbs ? std::abs(v) : v;
}

std::vector<std::uint32_t> identity_perm(std::size_t n) {
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    return perm;
}

}  // namespace

bool statistic_registered(std::string_view name) {
    return name == "taustar" || name == "taustar_table" || name == "kendall" ||
           name == "chisq" || name == "hoeffding" || name == "dewet";
}

std::vector<std::string> registered_statistics() {
    return {"taustar", "taustar_table", "kendall", "chisq", "hoeffding", "dewet"};
}

Sidedness default_sidedness(std::string_view name) {
    return name == "kendall" ? Sidedness::TwoSidedAbs : Sidedness::OneSidedLarge;
}

StatisticFn make_statistic_fn(std::string_view name, const PairedSample& sample) {
    validate_sample(sample);
    if (name == "taustar") return make_taustar_fn(sample);
    if (name == "taustar_table") return make_taustar_table_fn(sample);
    if (name == "kendall") return make_kendall_fn(sample);
    if (name == "chisq") return make_chisq_fn(sample);
    if (name == "hoeffding") return make_hoeffding_fn(sample);
    if (name == "dewet") return make_dewet_fn(sample);
    throw std::invalid_argument("unknown statistic: " + std::string(name));
}

TestResult permutation_test(const PairedSample& sample, std::string_view statistic,
                            const PermutationOptions& options) {
    if (options.resamples < 1) throw std::invalid_argument("resamples must be >= 1");
    const Sidedness sidedness =
        options.sidedness.value_or(default_sidedness(statistic));
    const std::size_t n = sample.n();

    StatisticFn fn = make_statistic_fn(statistic, sample);
    const auto identity = identity_perm(n);
    const double observed = fn(identity);
    const double threshold = apply_sidedness(observed, sidedness);

    unsigned workers = options.workers != 0 ? options.workers
                                            : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(
        std::min<std::uint64_t>(workers, options.resamples));

    auto run_range = [&](std::uint64_t begin, std::uint64_t end, StatisticFn& eval) {
        std::uint64_t exceed = 0;
        std::vector<std::uint32_t> perm(n);
        for (std::uint64_t b = begin; b < end; ++b) {
            std::iota(perm.begin(), perm.end(), 0u);
            SubstreamRng rng = SubstreamRng::substream(options.seed, b + 1);
            shuffle_span(std::span<std::uint32_t>(perm), rng);
            if (apply_sidedness(eval(perm), sidedness) >= threshold) ++exceed;
        }
        return exceed;
    };

    std::uint64_t exceed = 0;
    if (workers <= 1) {
        exceed = run_range(0, options.resamples, fn);
    } else {
        std::vector<std::uint64_t> partial(workers, 0);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::uint64_t chunk = (options.resamples + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t begin = w * chunk;
            const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, options.resamples);
            if (begin >= end) break;
            pool.emplace_back([&, w, begin, end] {
                StatisticFn eval = make_statistic_fn(statistic, sample);
                partial[w] = run_range(begin, end, eval);
            });
        }
        for (auto& t : pool) t.join();
        for (std::uint64_t v : partial) exceed += v;
    }

    TestResult result;
    result.statistic_id = std::string(statistic);
    result.observed = observed;
    result.exceed_count = exceed;
    result.resamples = options.resamples;
    result.p_value = static_cast<double>(1 + exceed) / static_cast<double>(1 + options.resamples);
    result.seed = options.seed;
    result.mode = TestMode::MonteCarlo;
    result.sidedness = sidedness;
    return result;
}

TestResult exact_permutation_test(const PairedSample& sample, std::string_view statistic,
                                  std::optional<Sidedness> sidedness_opt) {
    validate_sample(sample);
    const std::size_t n = sample.n();
    if (n > 8) throw resource_error("exact test: n! exceeds 40320 for n > 8");
    const Sidedness sidedness = sidedness_opt.value_or(default_sidedness(statistic));

    StatisticFn fn = make_statistic_fn(statistic, sample);
    const auto identity = identity_perm(n);
    const double observed = fn(identity);
    const double threshold = apply_sidedness(observed, sidedness);

    std::vector<std::uint32_t> perm = identity;
    std::uint64_t total = 0, exceed = 0;
    do {
        ++total;
        if (apply_sidedness(fn(perm), sidedness) >= threshold) ++exceed;
    } while (std::next_permutation(perm.begin(), perm.end()));

    TestResult result;
    result.statistic_id = std::string(statistic);
    result.observed = observed;
    result.exceed_count = exceed;
    result.resamples = total;
    result.p_value = static_cast<double>(exceed) / static_cast<double>(total);
    result.seed = 0;
    result.mode = TestMode::Exact;
    result.sidedness = sidedness;
    return result;
}

double mc_stderr(double p, std::uint64_t resamples) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("mc_stderr: p outside [0, 1]");
    if (resamples < 1) throw std::invalid_argument("mc_stderr: resamples must be >= 1");
    return std::sqrt(p * (1.0 - p) / static_cast<double>(resamples));
}

}  // namespace taustar
