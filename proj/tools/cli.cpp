#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include "taustar/dataio.hpp"
#include "taustar/errors.hpp"
#include "taustar/permutation.hpp"
#include "taustar/population.hpp"
#include "taustar/rng.hpp"

namespace taustar::cli {

namespace {

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open file: " + path, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonOpts {
    std::string statistic;
    std::string input;
    std::string input_format = "pairs";
    std::string fixture_name;
    std::string method = "naive";
    std::string output = "human";
    std::uint64_t resamples = 10000;
    std::uint64_t subsample_m = 0;
    std::uint64_t seed = 0;
    std::uint64_t trials = 10000;
};

struct LoadedInput {
    std::optional<PairedSample> sample;
    std::optional<ContingencyTable> table;
    std::optional<JointDistribution> joint;
};

LoadedInput load_input(const CommonOpts& opts, bool want_joint) {
    LoadedInput in;
    if (!opts.fixture_name.empty() && !opts.input.empty()) {
        throw CLI::ValidationError("--input and --fixture are mutually exclusive");
    }
    if (!opts.fixture_name.empty()) {
        Fixture f = fixture(opts.fixture_name);
        if (std::holds_alternative<ContingencyTable>(f.payload)) {
            in.table = std::get<ContingencyTable>(f.payload);
            if (want_joint) {
                in.joint = empirical_joint(*in.table);
            } else {
                in.sample = expand_table(*in.table);
            }
        } else {
            in.joint = std::get<JointDistribution>(f.payload);
            if (!want_joint) {
                throw std::invalid_argument("fixture " + opts.fixture_name +
                                            " is a joint distribution; use the population command");
            }
        }
        return in;
    }
    if (opts.input.empty()) throw CLI::ValidationError("--input or --fixture is required");
    const std::string text = read_file(opts.input);
    if (want_joint) {
        in.joint = parse_joint(text);
        return in;
    }
    if (opts.input_format == "table") {
        in.table = parse_table(text);
        in.sample = expand_table(*in.table);
    } else {
        in.sample = parse_pairs(text);
        in.table = tabulate_sample(*in.sample);
    }
    return in;
}

void emit_pairs(std::ostream& out, const std::string& format,
                const std::vector<std::pair<std::string, std::string>>& fields,
                const std::string& human_prefix) {
    if (format == "machine") {
        bool first = true;
        for (const auto& [k, v] : fields) {
            out << (first ? "" : " ") << k << "=" << v;
            first = false;
        }
        out << "\n";
        return;
    }
    if (!human_prefix.empty()) out << human_prefix << "\n";
    for (const auto& [k, v] : fields) out << "  " << k << ": " << v << "\n";
}

int cmd_stat(const CommonOpts& opts, std::ostream& out) {
    LoadedInput in = load_input(opts, /*want_joint=*/false);
    const PairedSample& sample = *in.sample;

    EstimatorConfig config;
    config.seed = opts.seed;
    if (opts.method == "naive") {
        config.method = EstimatorConfig::Method::Exhaustive;
    } else if (opts.method == "table") {
        config.method = EstimatorConfig::Method::Table;
    } else if (opts.method == "subsample") {
        config.method = EstimatorConfig::Method::Subsample;
        config.subsample_m = opts.subsample_m != 0 ? opts.subsample_m : 100000;
    } else {
        throw CLI::ValidationError("--method must be naive, table or subsample");
    }

    std::string name = opts.statistic;
    if (name == "taustar_table") {
        name = "taustar";
        config.method = EstimatorConfig::Method::Table;
    }

    double value = 0.0;
    if (name == "taustar") {
        value = t_star(sample, config);
    } else if (name == "dewet") {
        value = dewet_d(sample, config);
    } else if (name == "kendall") {
        value = kendall_t(sample);
    } else if (name == "chisq") {
        value = pearson_chi_square(*in.table);
    } else if (name == "hoeffding") {
        value = hoeffding_h(sample);
    } else if (name == "taustar_b") {
        value = t_star_b(sample);
    } else {
        throw CLI::ValidationError("unknown statistic: " + name);
    }

    emit_pairs(out, opts.output,
               {{"subcommand", "stat"},
                {"statistic", opts.statistic},
                {"method", opts.method},
                {"n", std::to_string(sample.n())},
                {"value", fmt12(value)}},
               opts.statistic + " = " + fmt12(value));
    return 0;
}

int cmd_test(const CommonOpts& opts, std::ostream& out) {
    LoadedInput in = load_input(opts, /*want_joint=*/false);
    const PairedSample& sample = *in.sample;

    std::string name = opts.statistic;
    if (opts.method == "table") {
        if (name == "taustar") {
            name = "taustar_table";
        } else if (name != "taustar_table") {
            throw CLI::ValidationError("--method table applies to the taustar statistic");
        }
    } else if (opts.method != "naive") {
        throw CLI::ValidationError("test supports --method naive or table");
    }
    if (!statistic_registered(name)) {
        throw CLI::ValidationError("unknown statistic: " + name);
    }

    PermutationOptions popts;
    popts.resamples = opts.resamples;
    popts.seed = opts.seed;
    const TestResult r = permutation_test(sample, name, popts);

    emit_pairs(out, opts.output,
               {{"subcommand", "test"},
                {"statistic", r.statistic_id},
                {"observed", fmt12(r.observed)},
                {"p_value", fmt12(r.p_value)},
                {"resamples", std::to_string(r.resamples)},
                {"exceed_count", std::to_string(r.exceed_count)},
                {"seed", std::to_string(r.seed)},
                {"mode", r.mode == TestMode::Exact ? "exact" : "monte_carlo"},
                {"sidedness",
                 r.sidedness == Sidedness::TwoSidedAbs ? "two_sided_abs" : "one_sided_large"}},
               "permutation test: " + r.statistic_id);
    return 0;
}

int cmd_population(const CommonOpts& opts, std::ostream& out) {
    LoadedInput in = load_input(opts, /*want_joint=*/true);
    const JointDistribution& joint = *in.joint;
    const double tau = pop_tau_star(joint);
    std::vector<std::pair<std::string, std::string>> fields{
        {"subcommand", "population"},
        {"rows", std::to_string(joint.rows)},
        {"cols", std::to_string(joint.cols)},
        {"tau_star", fmt12(tau)}};
    if (joint.all_real()) {
        const QuadrupleProbs q = pop_quadruple_probs(joint);
        fields.emplace_back("pi_c4", fmt12(q.pi_c4));
        fields.emplace_back("pi_d4", fmt12(q.pi_d4));
        fields.emplace_back("pi_tied", fmt12(q.pi_tied));
    }
    emit_pairs(out, opts.output, fields, "population functionals");
    return 0;
}

int verify_counterexample(const CommonOpts& opts, std::ostream& out) {
    const JointDistribution joint = counterexample_r8();
    const double tau = pop_tau_star(joint);
    const bool negative = tau < 0.0;
    const bool exact = std::abs(tau - (-1.0 / 32.0)) <= 1e-12;
    const bool pass = negative && exact;
    emit_pairs(out, opts.output,
               {{"subcommand", "verify"},
                {"check", "counterexample"},
                {"tau_star", fmt12(tau)},
                {"negative", negative ? "true" : "false"},
                {"expected", fmt12(-1.0 / 32.0)},
                {"halved_normalization_value", fmt12(-1.0 / 64.0)},
                {"pass", pass ? "true" : "false"}},
               std::string("counterexample: tau* = ") + fmt12(tau) +
                   (pass ? "  [pass]" : "  [FAIL]"));
    return pass ? 0 : 1;
}

int verify_mixture(const CommonOpts& opts, std::ostream& out) {
    SubstreamRng rng(opts.seed);
    double min_tau = std::numeric_limits<double>::infinity();
    int cases = 0;
    for (int law = 0; law < 50; ++law) {
        const std::size_t r = 2 + rng.bounded(3);
        const std::size_t c = 2 + rng.bounded(3);
        std::vector<double> rm(r), cm(c);
        double rs = 0.0, cs = 0.0;
        for (auto& v : rm) rs += (v = 0.05 + rng.uniform01());
        for (auto& v : cm) cs += (v = 0.05 + rng.uniform01());
        std::vector<double> probs(r * c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) probs[i * c + j] = (rm[i] / rs) * (cm[j] / cs);
        const JointDistribution base = make_joint(r, c, std::move(probs));
        for (double p : {0.1, 0.5, 0.9}) {
            const JointDistribution mixed = mix_with_point_mass(
                base, static_cast<double>(r) + 1.0, static_cast<double>(c) + 1.0, p);
            min_tau = std::min(min_tau, pop_tau_star(mixed));
            ++cases;
        }
    }
    const bool pass = min_tau > 0.0;
    emit_pairs(out, opts.output,
               {{"subcommand", "verify"},
                {"check", "mixture"},
                {"cases", std::to_string(cases)},
                {"min_tau_star", fmt12(min_tau)},
                {"pass", pass ? "true" : "false"}},
               std::string("mixture: min tau* over 150 mixed laws = ") + fmt12(min_tau) +
                   (pass ? "  [pass]" : "  [FAIL]"));
    return pass ? 0 : 1;
}

int verify_appendix_b(const CommonOpts& opts, std::ostream& out) {
    const SweepReport rep =
        sweep_3x3({1.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, opts.trials,
                  opts.seed);
    const bool pass = rep.min_tau_star >= -1e-12;
    std::string argmin;
    for (std::size_t t = 0; t < rep.argmin_table.probs.size(); ++t) {
        argmin += (t ? "," : "") + fmt12(rep.argmin_table.probs[t]);
    }
    emit_pairs(out, opts.output,
               {{"subcommand", "verify"},
                {"check", "appendix-b"},
                {"trials", std::to_string(rep.trials)},
                {"min_tau_star", fmt12(rep.min_tau_star)},
                {"independence_hits", std::to_string(rep.independence_hits)},
                {"argmin_table", argmin},
                {"pass", pass ? "true" : "false"}},
               std::string("3x3 uniform-marginal sweep: min tau* = ") + fmt12(rep.min_tau_star) +
                   (pass ? "  [pass]" : "  [FAIL]"));
    return pass ? 0 : 1;
}

int verify_identities(const CommonOpts& opts, std::ostream& out) {
    SubstreamRng rng(opts.seed);
    double max_probs_dev = 0.0, max_binary_dev = 0.0, max_sample_dev = 0.0,
           max_factorization_dev = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t r = 2 + rng.bounded(4);
        const std::size_t c = 2 + rng.bounded(4);
        std::vector<double> probs(r * c);
        double sum = 0.0;
        for (auto& p : probs) sum += (p = 0.01 + rng.uniform01());
        for (auto& p : probs) p /= sum;
        const JointDistribution joint = make_joint(r, c, probs);
        const double tau = pop_tau_star(joint);
        max_probs_dev = std::max(max_probs_dev, std::abs(tau - pop_tau_star_from_probs(joint)));
        if (r == 2) {
            max_binary_dev = std::max(max_binary_dev, std::abs(tau - pop_tau_star_binary(joint)));
        }
    }
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 6 + rng.bounded(10);
        PairedSample s;
        for (std::size_t i = 0; i < n; ++i) {
            s.xs.push_back(static_cast<double>(rng.bounded(5)));
            s.ys.push_back(static_cast<double>(rng.bounded(5)));
        }
        const ContingencyTable table = tabulate_sample(s);
        max_sample_dev = std::max(
            max_sample_dev, std::abs(t_star_from_table(table) - pop_tau_star(empirical_joint(table))));
        const double kt = kendall_t(s);
        // sign_s double contraction equals kendall^2
        double contraction = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const int sx = (s.xs[i] > s.xs[k]) - (s.xs[i] < s.xs[k]);
                const int sy = (s.ys[i] > s.ys[k]) - (s.ys[i] < s.ys[k]);
                contraction += sx * sy;
            }
        contraction /= static_cast<double>(n) * static_cast<double>(n);
        max_factorization_dev =
            std::max(max_factorization_dev, std::abs(contraction * contraction - kt * kt));
    }
    const bool pass = max_probs_dev <= 1e-12 && max_binary_dev <= 1e-12 &&
                      max_sample_dev <= 1e-12 && max_factorization_dev <= 1e-12;
    emit_pairs(out, opts.output,
               {{"subcommand", "verify"},
                {"check", "identities"},
                {"max_pattern_identity_dev", fmt12(max_probs_dev)},
                {"max_binary_identity_dev", fmt12(max_binary_dev)},
                {"max_sample_population_dev", fmt12(max_sample_dev)},
                {"max_factorization_dev", fmt12(max_factorization_dev)},
                {"pass", pass ? "true" : "false"}},
               std::string("identities: max deviation = ") +
                   fmt12(std::max({max_probs_dev, max_binary_dev, max_sample_dev,
                                   max_factorization_dev})) +
                   (pass ? "  [pass]" : "  [FAIL]"));
    return pass ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"sign-covariance (t*) independence testing toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string verify_check;

    auto add_common = [&](CLI::App* sub, bool with_stat) {
        if (with_stat) {
            sub->add_option("--statistic", opts.statistic, "statistic name")->required();
        }
        sub->add_option("--input", opts.input, "input file path");
        sub->add_option("--input-format", opts.input_format, "pairs|table (default pairs)")
            ->check(CLI::IsMember({"pairs", "table"}));
        sub->add_option("--fixture", opts.fixture_name, "built-in dataset name")
            ->check(CLI::IsMember(fixture_names()));
        sub->add_option("--seed", opts.seed, "random seed (default 0)");
        sub->add_option("--output", opts.output, "human|machine")
            ->check(CLI::IsMember({"human", "machine"}));
    };

    CLI::App* stat = app.add_subcommand("stat", "print a statistic value");
    add_common(stat, true);
    stat->add_option("--method", opts.method, "naive|table|subsample");
    stat->add_option("--subsample-m", opts.subsample_m, "tuples drawn by the subsample method");

    CLI::App* test = app.add_subcommand("test", "permutation test of independence");
    add_common(test, true);
    test->add_option("--method", opts.method, "naive|table");
    test->add_option("--resamples", opts.resamples, "Monte Carlo resamples (default 10000)");

    CLI::App* population = app.add_subcommand("population", "population functionals of a joint law");
    add_common(population, false);

    CLI::App* verify = app.add_subcommand("verify", "built-in verification checks");
    verify->add_option("check", verify_check, "appendix-b|mixture|counterexample|identities")
        ->required()
        ->check(CLI::IsMember({"appendix-b", "mixture", "counterexample", "identities"}));
    verify->add_option("--trials", opts.trials, "sweep trials (appendix-b, default 10000)");
    verify->add_option("--seed", opts.seed, "random seed (default 0)");
    verify->add_option("--output", opts.output, "human|machine")
        ->check(CLI::IsMember({"human", "machine"}));

    std::vector<const char*> argv;
    argv.push_back("taustar");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (stat->parsed()) return cmd_stat(opts, out);
        if (test->parsed()) return cmd_test(opts, out);
        if (population->parsed()) return cmd_population(opts, out);
        if (verify->parsed()) {
            if (verify_check == "counterexample") return verify_counterexample(opts, out);
            if (verify_check == "mixture") return verify_mixture(opts, out);
            if (verify_check == "appendix-b") return verify_appendix_b(opts, out);
            return verify_identities(opts, out);
        }
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const resource_error& e) {
        err << "resource guard: " << e.what() << "\n";
        return 4;
    } catch (const parse_error& e) {
        err << "data error: " << e.what() << "\n";
        return 3;
    } catch (const degenerate_input_error& e) {
        err << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "data error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

}  // namespace taustar::cli
