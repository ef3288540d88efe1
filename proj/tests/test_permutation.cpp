#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "taustar/dataio.hpp"
#include "taustar/errors.hpp"
#include "taustar/permutation.hpp"
#include "taustar/rng.hpp"

using namespace taustar;

namespace {

PairedSample random_tied_sample(std::mt19937_64& gen, std::size_t n, int levels) {
    std::uniform_int_distribution<int> val(0, levels - 1);
    PairedSample s;
    for (std::size_t i = 0; i < n; ++i) {
        s.xs.push_back(val(gen));
        s.ys.push_back(val(gen));
    }
    return s;
}

bool results_equal(const TestResult& a, const TestResult& b) {
    return a.statistic_id == b.statistic_id && a.observed == b.observed &&
           a.p_value == b.p_value && a.resamples == b.resamples &&
           a.exceed_count == b.exceed_count && a.seed == b.seed && a.mode == b.mode &&
           a.sidedness == b.sidedness;
}

}  // namespace

TEST_CASE("mc_stderr") {
    CHECK(mc_stderr(0.5, 100) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(mc_stderr(0.0, 12345) == 0.0);
    CHECK(mc_stderr(0.035, 10000) == doctest::Approx(0.0018371173).epsilon(1e-6));
    CHECK_THROWS_AS(mc_stderr(1.5, 10), std::invalid_argument);
    CHECK_THROWS_AS(mc_stderr(0.5, 0), std::invalid_argument);
}

TEST_CASE("constant ys give p = 1") {
    PairedSample s{{1, 2, 3, 4, 5, 6}, {2, 2, 2, 2, 2, 2}};
    PermutationOptions opts;
    opts.resamples = 200;
    const TestResult r = permutation_test(s, "taustar", opts);
    CHECK(r.p_value == 1.0);
    CHECK(r.exceed_count == r.resamples);
    CHECK(r.observed == 0.0);

    const TestResult ex = exact_permutation_test(s, "taustar");
    CHECK(ex.p_value == 1.0);
    CHECK(ex.mode == TestMode::Exact);
}

TEST_CASE("registry") {
    CHECK(statistic_registered("taustar"));
    CHECK(statistic_registered("taustar_table"));
    CHECK(statistic_registered("kendall"));
    CHECK(statistic_registered("chisq"));
    CHECK(statistic_registered("hoeffding"));
    CHECK(statistic_registered("dewet"));
    CHECK_FALSE(statistic_registered("pearson"));
    CHECK(registered_statistics().size() == 6);
    CHECK(default_sidedness("kendall") == Sidedness::TwoSidedAbs);
    CHECK(default_sidedness("taustar") == Sidedness::OneSidedLarge);

    PairedSample s{{1, 2, 3, 4}, {1, 2, 3, 4}};
    CHECK_THROWS_AS(permutation_test(s, "nope"), std::invalid_argument);
}

TEST_CASE("add-one p-value identity and range") {
    std::mt19937_64 gen(3);
    for (const char* name : {"taustar", "kendall", "hoeffding", "dewet"}) {
        const PairedSample s = random_tied_sample(gen, 10, 4);
        PermutationOptions opts;
        opts.resamples = 99;
        opts.seed = 11;
        const TestResult r = permutation_test(s, name, opts);
        CHECK(r.p_value ==
              static_cast<double>(1 + r.exceed_count) / static_cast<double>(1 + r.resamples));
        CHECK(r.p_value > 0.0);
        CHECK(r.p_value <= 1.0);
        CHECK(r.resamples == 99);
    }
}

TEST_CASE("determinism across runs and worker counts") {
    std::mt19937_64 gen(5);
    const PairedSample s = random_tied_sample(gen, 12, 3);
    PermutationOptions one;
    one.resamples = 500;
    one.seed = 123;
    one.workers = 1;
    PermutationOptions four = one;
    four.workers = 4;
    for (const char* name : {"taustar", "taustar_table", "kendall", "dewet", "hoeffding"}) {
        const TestResult a = permutation_test(s, name, one);
        const TestResult b = permutation_test(s, name, one);
        const TestResult c = permutation_test(s, name, four);
        CHECK(results_equal(a, b));
        CHECK(results_equal(a, c));
    }
}

TEST_CASE("taustar and taustar_table agree exactly per permutation") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 5; ++trial) {
        const PairedSample s = random_tied_sample(gen, 14, 4);
        PermutationOptions opts;
        opts.resamples = 300;
        opts.seed = trial;
        const TestResult a = permutation_test(s, "taustar", opts);
        const TestResult b = permutation_test(s, "taustar_table", opts);
        CHECK(a.observed == b.observed);
        CHECK(a.exceed_count == b.exceed_count);
        CHECK(a.p_value == b.p_value);
    }
}

TEST_CASE("registered statistics are invariant under joint relabeling") {
    std::mt19937_64 gen(11);
    const PairedSample s = random_tied_sample(gen, 15, 4);
    std::vector<std::size_t> relabel(s.n());
    std::iota(relabel.begin(), relabel.end(), 0);
    std::shuffle(relabel.begin(), relabel.end(), gen);
    PairedSample shuffled;
    for (std::size_t i : relabel) {
        shuffled.xs.push_back(s.xs[i]);
        shuffled.ys.push_back(s.ys[i]);
    }
    std::vector<std::uint32_t> identity(s.n());
    std::iota(identity.begin(), identity.end(), 0u);
    for (const char* name : {"taustar", "taustar_table", "kendall", "chisq", "hoeffding",
                             "dewet"}) {
        auto f = make_statistic_fn(name, s);
        auto g = make_statistic_fn(name, shuffled);
        CHECK(f(identity) == doctest::Approx(g(identity)).epsilon(1e-12));
    }
}

TEST_CASE("statistic functions match the library estimators at the identity") {
    std::mt19937_64 gen(13);
    const PairedSample s = random_tied_sample(gen, 13, 4);
    std::vector<std::uint32_t> identity(s.n());
    std::iota(identity.begin(), identity.end(), 0u);

    CHECK(make_statistic_fn("taustar", s)(identity) == t_star(s));
    CHECK(make_statistic_fn("taustar_table", s)(identity) ==
          t_star_from_table(tabulate_sample(s)));
    CHECK(make_statistic_fn("kendall", s)(identity) == kendall_t(s));
    CHECK(make_statistic_fn("chisq", s)(identity) ==
          doctest::Approx(pearson_chi_square(tabulate_sample(s))).epsilon(1e-13));
    CHECK(make_statistic_fn("hoeffding", s)(identity) == hoeffding_h(s));
    CHECK(make_statistic_fn("dewet", s)(identity) ==
          doctest::Approx(dewet_d(s)).epsilon(1e-12));
}

TEST_CASE("chisq degeneracy is reported at construction") {
    PairedSample s{{1, 2, 3, 4}, {7, 7, 7, 7}};
    CHECK_THROWS_AS(permutation_test(s, "chisq"), degenerate_input_error);
}

TEST_CASE("exact test enumerations") {
    PairedSample s3{{1, 2, 3}, {1, 2, 3}};
    const TestResult r = exact_permutation_test(s3, "kendall");
    CHECK(r.sidedness == Sidedness::TwoSidedAbs);
    CHECK(r.resamples == 6);
    CHECK(r.exceed_count == 2);  // identity and the full reversal
    CHECK(r.p_value == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    // independent enumeration oracle for the taustar exact test
    PairedSample s4{{1, 2, 3, 4}, {1, 2, 3, 4}};
    const TestResult rt = exact_permutation_test(s4, "taustar");
    std::vector<std::size_t> perm{0, 1, 2, 3};
    std::size_t exceed = 0;
    do {
        PairedSample p = s4;
        for (std::size_t i = 0; i < 4; ++i) p.ys[i] = s4.ys[perm[i]];
        if (t_star(p) >= 13.0 / 32.0) ++exceed;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(rt.resamples == 24);
    CHECK(rt.exceed_count == exceed);
    CHECK(rt.p_value == static_cast<double>(exceed) / 24.0);
    CHECK(rt.p_value >= 1.0 / 24.0);

    PairedSample s9{{1, 2, 3, 4, 5, 6, 7, 8, 9}, {1, 2, 3, 4, 5, 6, 7, 8, 9}};
    CHECK_THROWS_AS(exact_permutation_test(s9, "kendall"), resource_error);
}

TEST_CASE("two-sided transform is applied to both sides") {
    PairedSample anti{{1, 2, 3, 4, 5}, {5, 4, 3, 2, 1}};
    const TestResult two = exact_permutation_test(anti, "kendall", Sidedness::TwoSidedAbs);
    const TestResult one = exact_permutation_test(anti, "kendall", Sidedness::OneSidedLarge);
    CHECK(two.observed < 0.0);
    // perfectly anti-monotone data: extreme under |.|, bottom under identity
    CHECK(two.p_value <= 2.0 / 120.0 + 1e-15);
    CHECK(one.p_value == 1.0);
}

TEST_CASE("null calibration of the Monte Carlo p-value") {
    // independent margins: the rejection rate at level 0.05 stays near 0.05
    const int replicates = 500;
    int rejections = 0;
    for (int rep = 0; rep < replicates; ++rep) {
        SubstreamRng rng = SubstreamRng::substream(2024, static_cast<std::uint64_t>(rep));
        PairedSample s;
        for (int i = 0; i < 16; ++i) {
            s.xs.push_back(rng.uniform01());
            s.ys.push_back(rng.uniform01());
        }
        PermutationOptions opts;
        opts.resamples = 199;
        opts.seed = static_cast<std::uint64_t>(rep);
        const TestResult r = permutation_test(s, "kendall", opts);
        if (r.p_value <= 0.05) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / replicates;
    CHECK(rate >= 0.03);
    CHECK(rate <= 0.07);
}

TEST_CASE("substream shuffles are unbiased and order-independent") {
    // each permutation of 3 elements appears with frequency ~1/6
    std::array<int, 6> counts{};
    auto index_of = [](const std::array<std::uint32_t, 3>& p) {
        int idx = 0;
        std::array<std::uint32_t, 3> ref{0, 1, 2};
        std::array<std::uint32_t, 3> cur = ref;
        do {
            if (cur == p) return idx;
            ++idx;
        } while (std::next_permutation(cur.begin(), cur.end()));
        return -1;
    };
    const int draws = 60000;
    for (int b = 0; b < draws; ++b) {
        std::array<std::uint32_t, 3> perm{0, 1, 2};
        SubstreamRng rng = SubstreamRng::substream(9, static_cast<std::uint64_t>(b));
        shuffle_span(std::span<std::uint32_t>(perm), rng);
        ++counts[static_cast<std::size_t>(index_of(perm))];
    }
    for (int c : counts) {
        CHECK(std::abs(c - draws / 6) < 5 * std::sqrt(draws * (1.0 / 6) * (5.0 / 6)));
    }
}
