#include "taustar/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "taustar/detail/contraction.hpp"
#include "taustar/errors.hpp"
#include "taustar/kernels.hpp"
#include "taustar/rng.hpp"

namespace taustar {

namespace {

constexpr std::size_t kMaxCategories = 32;
constexpr double kProbSumTol = 1e-12;
constexpr double kIndependenceTol = 1e-12;

void check_size(const JointDistribution& joint) {
    if (joint.rows > kMaxCategories || joint.cols > kMaxCategories) {
        throw resource_error("joint distribution limited to " +
                             std::to_string(kMaxCategories) + " categories per axis");
    }
}

void require_real(const JointDistribution& joint, const char* op) {
    if (!joint.all_real()) {
        throw std::invalid_argument(std::string(op) + ": metric-valued joints unsupported");
    }
}

struct LawGrid {
    std::size_t r = 0, c = 0;
    std::vector<double> below;   // (r+1)x(c+1): P(X < x_i, Y < y_j) by rank
    std::vector<double> xbelow;  // P(X < x_i)
    struct Cell {
        std::size_t i, j;
        double p;
    };
    std::vector<Cell> cells;

    double sw(std::size_t i, std::size_t j) const { return below[i * (c + 1) + j]; }
    double nw(std::size_t i, std::size_t j) const {
        return xbelow[i] - below[i * (c + 1) + j + 1];
    }
};

LawGrid build_law_grid(const JointDistribution& joint) {
    LawGrid g;
    g.r = joint.rows;
    g.c = joint.cols;
    g.below.assign((g.r + 1) * (g.c + 1), 0.0);
    for (std::size_t i = 0; i < g.r; ++i) {
        for (std::size_t j = 0; j < g.c; ++j) {
            g.below[(i + 1) * (g.c + 1) + (j + 1)] = joint.at(i, j) +
                                                     g.below[i * (g.c + 1) + (j + 1)] +
                                                     g.below[(i + 1) * (g.c + 1) + j] -
                                                     g.below[i * (g.c + 1) + j];
        }
    }
    g.xbelow.assign(g.r + 1, 0.0);
    for (std::size_t i = 0; i < g.r; ++i) {
        g.xbelow[i + 1] =
            g.xbelow[i] + g.below[(i + 1) * (g.c + 1) + g.c] - g.below[i * (g.c + 1) + g.c];
    }
    for (std::size_t i = 0; i < g.r; ++i) {
        for (std::size_t j = 0; j < g.c; ++j) {
            if (joint.at(i, j) > 0.0) g.cells.push_back({i, j, joint.at(i, j)});
        }
    }
    return g;
}

double strict_cdf(const DiscreteLaw& law, double z, CdfConvention convention) {
    double acc = 0.0;
    for (std::size_t i = 0; i < law.atoms.size(); ++i) {
        if (convention == CdfConvention::Right ? law.atoms[i] <= z : law.atoms[i] < z) {
            acc += law.probs[i];
        }
    }
    return acc;
}

// tau* of a 3x3 table with fixed scores and prebuilt kernel tensor
double tau_star_3x3(const double* probs, const std::int8_t* k3) {
    return detail::contract_quadruple<double>(3, 3, probs, k3, k3);
}

// complete a 3x3 table with the given marginals from its free 2x2 block;
// returns false if any completed cell is negative
bool complete_3x3(const std::array<double, 3>& rm, const std::array<double, 3>& cm,
                  const double free4[4], double out[9]) {
    out[0] = free4[0];
    out[1] = free4[1];
    out[3] = free4[2];
    out[4] = free4[3];
    out[2] = rm[0] - out[0] - out[1];
    out[5] = rm[1] - out[3] - out[4];
    out[6] = cm[0] - out[0] - out[3];
    out[7] = cm[1] - out[1] - out[4];
    out[8] = rm[2] - out[6] - out[7];
    for (int t = 0; t < 9; ++t) {
        if (out[t] < 0.0) return false;
    }
    return true;
}

}  // namespace

std::vector<double> AxisCategories::scores() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(v[0]);
    return out;
}

JointDistribution make_joint(std::size_t rows, std::size_t cols, std::vector<double> probs,
                             std::vector<double> row_scores, std::vector<double> col_scores) {
    JointDistribution j;
    j.rows = rows;
    j.cols = cols;
    j.probs = std::move(probs);
    if (row_scores.empty()) {
        for (std::size_t i = 0; i < rows; ++i) row_scores.push_back(static_cast<double>(i + 1));
    }
    if (col_scores.empty()) {
        for (std::size_t i = 0; i < cols; ++i) col_scores.push_back(static_cast<double>(i + 1));
    }
    j.row_values.real = true;
    j.row_values.dim = 1;
    for (double s : row_scores) j.row_values.values.push_back({s});
    j.col_values.real = true;
    j.col_values.dim = 1;
    for (double s : col_scores) j.col_values.values.push_back({s});
    validate_joint(j);
    return j;
}

JointDistribution make_joint_metric_rows(std::size_t rows, std::size_t cols,
                                         std::vector<double> probs,
                                         std::vector<std::vector<double>> row_points,
                                         std::vector<double> col_scores) {
    JointDistribution j;
    j.rows = rows;
    j.cols = cols;
    j.probs = std::move(probs);
    j.row_values.real = false;
    j.row_values.dim = row_points.empty() ? 0 : row_points.front().size();
    j.row_values.values = std::move(row_points);
    if (col_scores.empty()) {
        for (std::size_t i = 0; i < cols; ++i) col_scores.push_back(static_cast<double>(i + 1));
    }
    j.col_values.real = true;
    j.col_values.dim = 1;
    for (double s : col_scores) j.col_values.values.push_back({s});
    validate_joint(j);
    return j;
}

void validate_joint(const JointDistribution& joint) {
    if (joint.rows == 0 || joint.cols == 0) {
        throw std::invalid_argument("joint distribution: r and c must be >= 1");
    }
    if (joint.probs.size() != joint.rows * joint.cols) {
        throw std::invalid_argument("joint distribution: probability size mismatch");
    }
    double sum = 0.0;
    for (double p : joint.probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("joint distribution: probabilities must be >= 0");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbSumTol) {
        throw std::invalid_argument("joint distribution: probabilities must sum to 1");
    }
    auto check_axis = [](const AxisCategories& axis, std::size_t count, const char* which) {
        if (axis.size() != count) {
            throw std::invalid_argument(std::string("joint distribution: ") + which +
                                        " category count mismatch");
        }
        for (const auto& v : axis.values) {
            if (v.size() != axis.dim || axis.dim == 0) {
                throw std::invalid_argument(std::string("joint distribution: ") + which +
                                            " dimension mismatch");
            }
            for (double z : v) {
                if (!std::isfinite(z)) {
                    throw std::invalid_argument(std::string("joint distribution: ") + which +
                                                " has a non-finite value");
                }
            }
        }
        if (axis.real) {
            if (axis.dim != 1) {
                throw std::invalid_argument(std::string("joint distribution: real ") + which +
                                            " must be one-dimensional");
            }
            for (std::size_t i = 1; i < axis.size(); ++i) {
                if (axis.values[i][0] <= axis.values[i - 1][0]) {
                    throw std::invalid_argument(std::string("joint distribution: ") + which +
                                                " scores must be strictly increasing");
                }
            }
        } else {
            for (std::size_t i = 0; i < axis.size(); ++i) {
                for (std::size_t j = i + 1; j < axis.size(); ++j) {
                    if (axis.values[i] == axis.values[j]) {
                        throw std::invalid_argument(std::string("joint distribution: ") + which +
                                                    " points must be pairwise distinct");
                    }
                }
            }
        }
    };
    check_axis(joint.row_values, joint.rows, "row");
    check_axis(joint.col_values, joint.cols, "column");
}

DiscreteLaw make_discrete_law(std::vector<double> atoms, std::vector<double> probs) {
    if (atoms.size() != probs.size() || atoms.empty()) {
        throw std::invalid_argument("discrete law: atoms/probs size mismatch");
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (!std::isfinite(atoms[i])) throw std::invalid_argument("discrete law: non-finite atom");
        if (!(probs[i] >= 0.0)) throw std::invalid_argument("discrete law: negative probability");
        if (i > 0 && atoms[i] <= atoms[i - 1]) {
            throw std::invalid_argument("discrete law: atoms must be strictly increasing");
        }
    }
    const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::abs(sum - 1.0) > kProbSumTol) {
        throw std::invalid_argument("discrete law: probabilities must sum to 1");
    }
    return DiscreteLaw{std::move(atoms), std::move(probs)};
}

namespace detail {

std::vector<std::int8_t> axis_a_tensor(const AxisCategories& axis) {
    const std::size_t k = axis.size();
    if (axis.real) {
        std::vector<double> s;
        s.reserve(k);
        for (const auto& v : axis.values) s.push_back(v[0]);
        return a_tensor(s);
    }
    std::vector<std::int8_t> out(k * k * k * k);
    std::size_t t = 0;
    for (std::size_t i1 = 0; i1 < k; ++i1)
        for (std::size_t i2 = 0; i2 < k; ++i2)
            for (std::size_t i3 = 0; i3 < k; ++i3)
                for (std::size_t i4 = 0; i4 < k; ++i4, ++t) {
                    out[t] = static_cast<std::int8_t>(
                        a_kernel_metric(axis.values[i1], axis.values[i2], axis.values[i3],
                                        axis.values[i4]));
                }
    return out;
}

PatternProbs expectation_patterns(const JointDistribution& joint) {
    const LawGrid g = build_law_grid(joint);
    PatternProbs out;
    for (const auto& a : g.cells) {
        for (const auto& b : g.cells) {
            const std::size_t mi = std::min(a.i, b.i);
            const double w = a.p * b.p;
            const double s = g.sw(mi, std::min(a.j, b.j));
            out.e1 += w * s * s;
            const double q = g.nw(mi, std::max(a.j, b.j));
            out.e2 += w * q * q;
        }
    }
    for (const auto& b2 : g.cells) {
        for (const auto& b3 : g.cells) {
            if (!(b2.i < b3.i && b2.j > b3.j)) continue;
            double inner = 0.0;
            for (const auto& b4 : g.cells) {
                if (b4.i > b2.i && b4.j > b3.j) {
                    inner += b4.p * g.sw(std::min(b3.i, b4.i), std::min(b2.j, b4.j));
                }
            }
            out.e3 += b2.p * b3.p * inner;
        }
    }
    return out;
}

}  // namespace detail

double pop_tau_star(const JointDistribution& joint) {
    validate_joint(joint);
    check_size(joint);
    const auto kx = detail::axis_a_tensor(joint.row_values);
    const auto ky = detail::axis_a_tensor(joint.col_values);
    return detail::contract_quadruple<double>(joint.rows, joint.cols, joint.probs.data(),
                                              kx.data(), ky.data());
}

double pop_tau_star_from_probs(const JointDistribution& joint) {
    validate_joint(joint);
    require_real(joint, "pop_tau_star_from_probs");
    check_size(joint);
    const auto pat = detail::expectation_patterns(joint);
    return 4.0 * (pat.e1 + pat.e2) - 8.0 * pat.e3;
}

double pop_tau_star_binary(const JointDistribution& joint) {
    validate_joint(joint);
    if (joint.rows != 2) {
        throw std::invalid_argument("pop_tau_star_binary: exactly two rows required");
    }
    if (!joint.row_values.real) {
        throw std::invalid_argument("pop_tau_star_binary: real row scores required");
    }
    require_real(joint, "pop_tau_star_binary");
    const std::size_t c = joint.cols;
    double p = 0.0, q = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
        p += joint.at(0, j);
        q += joint.at(1, j);
    }
    if (p == 0.0 || q == 0.0) return 0.0;  // X constant: independent of Y
    std::vector<double> u(c), v(c);
    for (std::size_t j = 0; j < c; ++j) {
        u[j] = joint.at(0, j) / p;
        v[j] = joint.at(1, j) / q;
    }
    // strict CDFs by category rank
    std::vector<double> gu(c + 1, 0.0), gv(c + 1, 0.0);
    for (std::size_t j = 0; j < c; ++j) {
        gu[j + 1] = gu[j] + u[j];
        gv[j + 1] = gv[j] + v[j];
    }
    double p1 = 0.0, p2 = 0.0, p3 = 0.0;
    for (std::size_t a = 0; a < c; ++a) {
        for (std::size_t b = 0; b < c; ++b) {
            const std::size_t m = std::min(a, b);
            p1 += v[a] * v[b] * gu[m] * gu[m];  // P(U1,U2 < V1,V2)
            p2 += u[a] * u[b] * gv[m] * gv[m];  // P(V1,V2 < U1,U2)
            p3 += u[a] * v[b] * gu[m] * gv[m];  // P(U1,V1 < U2,V2)
        }
    }
    return 4.0 * p * p * q * q * (p1 + p2 - 2.0 * p3);
}

QuadrupleProbs pop_quadruple_probs(const JointDistribution& joint) {
    validate_joint(joint);
    require_real(joint, "pop_quadruple_probs");
    check_size(joint);
    const auto pat = detail::expectation_patterns(joint);
    QuadrupleProbs out;
    out.pi_c4 = 6.0 * (pat.e1 + pat.e2);
    out.pi_d4 = 24.0 * pat.e3;
    out.pi_tied = std::max(0.0, 1.0 - out.pi_c4 - out.pi_d4);
    return out;
}

double pop_cvm_c_alpha(const DiscreteLaw& g, const DiscreteLaw& h, double alpha,
                       CdfConvention convention) {
    if (g.atoms.empty() || h.atoms.empty()) {
        throw std::invalid_argument("pop_cvm_c_alpha: laws must be nonempty");
    }
    std::vector<double> atoms;
    atoms.reserve(g.atoms.size() + h.atoms.size());
    std::merge(g.atoms.begin(), g.atoms.end(), h.atoms.begin(), h.atoms.end(),
               std::back_inserter(atoms));
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    auto mass_at = [](const DiscreteLaw& law, double z) {
        const auto it = std::lower_bound(law.atoms.begin(), law.atoms.end(), z);
        if (it != law.atoms.end() && *it == z) {
            return law.probs[static_cast<std::size_t>(it - law.atoms.begin())];
        }
        return 0.0;
    };
    double acc = 0.0;
    for (double z : atoms) {
        const double gz = strict_cdf(g, z, convention);
        const double hz = strict_cdf(h, z, convention);
        const double f = alpha * mass_at(g, z) + (1.0 - alpha) * mass_at(h, z);
        acc += (gz - hz) * (gz - hz) * f;
    }
    return acc;
}

JointDistribution mix_with_point_mass(const JointDistribution& joint, double x0, double y0,
                                      double p) {
    validate_joint(joint);
    require_real(joint, "mix_with_point_mass");
    if (!(p > 0.0 && p <= 1.0)) {
        throw std::invalid_argument("mix_with_point_mass: p must lie in (0, 1]");
    }
    if (!std::isfinite(x0) || !std::isfinite(y0)) {
        throw std::invalid_argument("mix_with_point_mass: point must be finite");
    }
    auto extend = [](const AxisCategories& axis, double v, std::size_t& index) {
        std::vector<double> scores = axis.scores();
        const auto it = std::lower_bound(scores.begin(), scores.end(), v);
        index = static_cast<std::size_t>(it - scores.begin());
        const bool fresh = it == scores.end() || *it != v;
        if (fresh) scores.insert(scores.begin() + static_cast<std::ptrdiff_t>(index), v);
        return std::make_pair(scores, fresh);
    };
    std::size_t xi = 0, yj = 0;
    const auto [row_scores, row_fresh] = extend(joint.row_values, x0, xi);
    const auto [col_scores, col_fresh] = extend(joint.col_values, y0, yj);
    const std::size_t r = row_scores.size();
    const std::size_t c = col_scores.size();
    std::vector<double> probs(r * c, 0.0);
    for (std::size_t i = 0; i < joint.rows; ++i) {
        const std::size_t ri = i + (row_fresh && i >= xi ? 1 : 0);
        for (std::size_t j = 0; j < joint.cols; ++j) {
            const std::size_t cj = j + (col_fresh && j >= yj ? 1 : 0);
            probs[ri * c + cj] += p * joint.at(i, j);
        }
    }
    probs[xi * c + yj] += 1.0 - p;
    return make_joint(r, c, std::move(probs), row_scores, col_scores);
}

JointDistribution counterexample_r8() {
    std::vector<std::vector<double>> points(8, std::vector<double>(8, 0.0));
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            if (i == j) {
                points[i][j] = 3.0;
            } else if ((i < 4 && j < 4) || (i >= 4 && j >= 4)) {
                points[i][j] = -1.0;
            }
        }
    }
    std::vector<double> probs(8 * 2, 0.0);
    for (std::size_t i = 0; i < 8; ++i) probs[i * 2 + (i < 4 ? 0 : 1)] = 1.0 / 8.0;
    return make_joint_metric_rows(8, 2, std::move(probs), std::move(points), {0.0, 1.0});
}

SweepReport sweep_3x3(const std::array<double, 3>& row_marginals,
                      const std::array<double, 3>& col_marginals, std::uint64_t trials,
                      std::uint64_t seed) {
    auto check_marginals = [](const std::array<double, 3>& m, const char* which) {
        double sum = 0.0;
        for (double v : m) {
            if (!(v > 0.0)) {
                throw std::invalid_argument(std::string("sweep_3x3: ") + which +
                                            " marginals must be positive");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw std::invalid_argument(std::string("sweep_3x3: ") + which +
                                        " marginals must sum to 1");
        }
    };
    check_marginals(row_marginals, "row");
    check_marginals(col_marginals, "column");
    if (trials < 1) throw std::invalid_argument("sweep_3x3: trials must be >= 1");

    const std::vector<double> scores{1.0, 2.0, 3.0};
    const auto k3 = detail::a_tensor(scores);

    auto report_table = [&](const double p[9]) {
        return make_joint(3, 3, std::vector<double>(p, p + 9), scores, scores);
    };

    SweepReport report;
    report.trials = trials;
    double best[9];
    double best_tau = std::numeric_limits<double>::infinity();

    auto consider = [&](const double p[9], double tau) {
        if (tau < best_tau) {
            best_tau = tau;
            std::copy(p, p + 9, best);
        }
    };

    // trial 0: the product table (the known independence point)
    double table[9];
    double free4[4];
    for (std::uint64_t t = 0; t < trials; ++t) {
        if (t == 0) {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) table[i * 3 + j] = row_marginals[i] * col_marginals[j];
        } else {
            SubstreamRng rng = SubstreamRng::substream(seed, t);
            for (;;) {
                free4[0] = rng.uniform01() * std::min(row_marginals[0], col_marginals[0]);
                free4[1] = rng.uniform01() * std::min(row_marginals[0], col_marginals[1]);
                free4[2] = rng.uniform01() * std::min(row_marginals[1], col_marginals[0]);
                free4[3] = rng.uniform01() * std::min(row_marginals[1], col_marginals[1]);
                if (complete_3x3(row_marginals, col_marginals, free4, table)) break;
            }
        }
        const double tau = tau_star_3x3(table, k3.data());
        if (std::abs(tau) <= kIndependenceTol) ++report.independence_hits;
        consider(table, tau);
    }

    // local descent from the worst case over the free 2x2 block
    SubstreamRng rng = SubstreamRng::substream(seed, trials + 1);
    double step = 0.05;
    double current[9];
    std::copy(best, best + 9, current);
    for (int iter = 0; iter < 400; ++iter) {
        for (int k = 0; k < 4; ++k) {
            static constexpr int kFree[4] = {0, 1, 3, 4};
            free4[k] = current[kFree[k]] + step * (2.0 * rng.uniform01() - 1.0);
        }
        if (complete_3x3(row_marginals, col_marginals, free4, table)) {
            const double tau = tau_star_3x3(table, k3.data());
            if (tau < best_tau) {
                consider(table, tau);
                std::copy(table, table + 9, current);
            }
        }
        if (iter % 50 == 49) step *= 0.5;
    }

    report.min_tau_star = best_tau;
    report.argmin_table = report_table(best);
    return report;
}

JointDistribution empirical_joint(const ContingencyTable& table) {
    validate_table(table, true);
    const std::int64_t n = table.total();
    if (n < 1) throw std::invalid_argument("empirical_joint: empty table");
    std::vector<double> probs(table.counts.size());
    for (std::size_t t = 0; t < probs.size(); ++t) {
        probs[t] = static_cast<double>(table.counts[t]) / static_cast<double>(n);
    }
    return make_joint(table.rows, table.cols, std::move(probs), table.row_scores,
                      table.col_scores);
}

}  // namespace taustar
