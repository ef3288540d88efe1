#include "taustar/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "taustar/detail/contraction.hpp"
#include "taustar/errors.hpp"
#include "taustar/rng.hpp"

namespace taustar {

namespace {

constexpr std::size_t kMaxContractionCategories = 32;

// all four strict inequalities p < r, p < s, q < r, q < s
inline bool pair_below(double p, double q, double r, double s) {
    return p < r && p < s && q < r && q < s;
}

inline int a_fast(double z1, double z2, double z3, double z4) {
    return static_cast<int>(pair_below(z1, z2, z3, z4)) +
           static_cast<int>(pair_below(z3, z4, z1, z2)) -
           static_cast<int>(pair_below(z1, z3, z2, z4)) -
           static_cast<int>(pair_below(z2, z4, z1, z3));
}

inline double h_fast(double z1, double z2, double z3, double z4) {
    return std::abs(z1 - z2) + std::abs(z3 - z4) - std::abs(z1 - z3) - std::abs(z2 - z4);
}

double quadruple_denominator(std::size_t n, EstimatorConfig::Normalization norm) {
    const double dn = static_cast<double>(n);
    if (norm == EstimatorConfig::Normalization::V) return dn * dn * dn * dn;
    return dn * (dn - 1.0) * (dn - 2.0) * (dn - 3.0);
}

void check_quadruple_config(const PairedSample& sample, const EstimatorConfig& config) {
    validate_sample(sample);
    if (config.normalization == EstimatorConfig::Normalization::U && sample.n() < 4) {
        throw std::invalid_argument("U-normalization requires n >= 4");
    }
    if (config.method == EstimatorConfig::Method::Subsample && config.subsample_m == 0) {
        throw std::invalid_argument("Subsample requires m >= 1");
    }
}

void check_contraction_size(const ContingencyTable& table) {
    if (table.rows > kMaxContractionCategories || table.cols > kMaxContractionCategories) {
        throw resource_error("table contraction limited to " +
                             std::to_string(kMaxContractionCategories) +
                             " categories per axis");
    }
}

// ranks of each value in the sorted unique values of the input
std::vector<std::size_t> dense_ranks(std::span<const double> values,
                                     std::size_t& distinct_out) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    distinct_out = sorted.size();
    std::vector<std::size_t> ranks(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        ranks[i] = static_cast<std::size_t>(
            std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin());
    }
    return ranks;
}

struct SampleGrid {
    std::size_t dx = 0, dy = 0;
    std::vector<std::int64_t> below;  // (dx+1)x(dy+1): #{x-rank < i, y-rank < j}
    std::vector<std::int64_t> xbelow;  // #{x-rank < i}
    struct Cell {
        std::size_t ix, iy;
        std::int64_t cnt;
    };
    std::vector<Cell> cells;

    std::int64_t sw(std::size_t i, std::size_t j) const { return below[i * (dy + 1) + j]; }
    // #{x-rank < i, y-rank > j}
    std::int64_t nw(std::size_t i, std::size_t j) const {
        return xbelow[i] - below[i * (dy + 1) + j + 1];
    }
};

SampleGrid build_grid_from_ranks(std::span<const std::size_t> xr, std::size_t dx,
                                 std::span<const std::size_t> yr, std::size_t dy) {
    SampleGrid g;
    g.dx = dx;
    g.dy = dy;
    std::vector<std::int64_t> counts(g.dx * g.dy, 0);
    for (std::size_t i = 0; i < xr.size(); ++i) ++counts[xr[i] * g.dy + yr[i]];
    g.below.assign((g.dx + 1) * (g.dy + 1), 0);
    for (std::size_t i = 0; i < g.dx; ++i) {
        for (std::size_t j = 0; j < g.dy; ++j) {
            g.below[(i + 1) * (g.dy + 1) + (j + 1)] =
                counts[i * g.dy + j] + g.below[i * (g.dy + 1) + (j + 1)] +
                g.below[(i + 1) * (g.dy + 1) + j] - g.below[i * (g.dy + 1) + j];
        }
    }
    g.xbelow.assign(g.dx + 1, 0);
    for (std::size_t i = 0; i < g.dx; ++i) {
        g.xbelow[i + 1] = g.xbelow[i] + g.below[(i + 1) * (g.dy + 1) + g.dy] -
                          g.below[i * (g.dy + 1) + g.dy];
    }
    for (std::size_t i = 0; i < g.dx; ++i) {
        for (std::size_t j = 0; j < g.dy; ++j) {
            if (counts[i * g.dy + j] > 0) g.cells.push_back({i, j, counts[i * g.dy + j]});
        }
    }
    return g;
}

std::vector<double> grades_from_margin(std::span<const std::int64_t> margin,
                                       std::int64_t total) {
    std::vector<double> grades(margin.size());
    std::int64_t before = 0;
    for (std::size_t i = 0; i < margin.size(); ++i) {
        grades[i] = static_cast<double>(2 * before + margin[i]) /
                    (2.0 * static_cast<double>(total));
        before += margin[i];
    }
    return grades;
}

std::vector<std::int64_t> row_margins(const ContingencyTable& t) {
    std::vector<std::int64_t> m(t.rows, 0);
    for (std::size_t i = 0; i < t.rows; ++i)
        for (std::size_t j = 0; j < t.cols; ++j) m[i] += t.at(i, j);
    return m;
}

std::vector<std::int64_t> col_margins(const ContingencyTable& t) {
    std::vector<std::int64_t> m(t.cols, 0);
    for (std::size_t i = 0; i < t.rows; ++i)
        for (std::size_t j = 0; j < t.cols; ++j) m[j] += t.at(i, j);
    return m;
}

double subsample_quadruple(const PairedSample& sample, const EstimatorConfig& config,
                           bool grade_kernel) {
    const std::size_t n = sample.n();
    std::span<const double> xs(sample.xs);
    std::span<const double> ys(sample.ys);
    std::vector<double> gx, gy;
    if (grade_kernel) {
        gx = detail::midrank_grades(xs);
        gy = detail::midrank_grades(ys);
        xs = gx;
        ys = gy;
    }
    SubstreamRng rng(config.seed);
    const bool distinct = config.normalization == EstimatorConfig::Normalization::U;
    double acc = 0.0;
    std::size_t idx[4];
    for (std::uint64_t t = 0; t < config.subsample_m; ++t) {
        for (;;) {
            for (auto& v : idx) v = static_cast<std::size_t>(rng.bounded(n));
            if (!distinct) break;
            if (idx[0] != idx[1] && idx[0] != idx[2] && idx[0] != idx[3] &&
                idx[1] != idx[2] && idx[1] != idx[3] && idx[2] != idx[3]) {
                break;
            }
        }
        if (grade_kernel) {
            acc += h_fast(xs[idx[0]], xs[idx[1]], xs[idx[2]], xs[idx[3]]) *
                   h_fast(ys[idx[0]], ys[idx[1]], ys[idx[2]], ys[idx[3]]);
        } else {
            acc += a_fast(xs[idx[0]], xs[idx[1]], xs[idx[2]], xs[idx[3]]) *
                   a_fast(ys[idx[0]], ys[idx[1]], ys[idx[2]], ys[idx[3]]);
        }
    }
    return acc / static_cast<double>(config.subsample_m);
}

std::int64_t t_star_u_numerator_naive(std::span<const double> xs,
                                      std::span<const double> ys) {
    const std::size_t n = xs.size();
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                for (std::size_t l = 0; l < n; ++l) {
                    if (l == i || l == j || l == k) continue;
                    const int ax = a_fast(xs[i], xs[j], xs[k], xs[l]);
                    if (ax == 0) continue;
                    acc += ax * a_fast(ys[i], ys[j], ys[k], ys[l]);
                }
            }
        }
    return acc;
}

double dewet_naive(std::span<const double> xs, std::span<const double> ys,
                   EstimatorConfig::Normalization norm) {
    const std::vector<double> u = detail::midrank_grades(xs);
    const std::vector<double> w = detail::midrank_grades(ys);
    const std::size_t n = u.size();
    const bool distinct = norm == EstimatorConfig::Normalization::U;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (distinct && j == i) continue;
            for (std::size_t k = 0; k < n; ++k) {
                if (distinct && (k == i || k == j)) continue;
                for (std::size_t l = 0; l < n; ++l) {
                    if (distinct && (l == i || l == j || l == k)) continue;
                    acc += h_fast(u[i], u[j], u[k], u[l]) * h_fast(w[i], w[j], w[k], w[l]);
                }
            }
        }
    return acc / quadruple_denominator(n, norm);
}

}  // namespace

PairedSample make_sample(std::vector<double> xs, std::vector<double> ys) {
    PairedSample s{std::move(xs), std::move(ys)};
    validate_sample(s);
    return s;
}

void validate_sample(const PairedSample& sample) {
    if (sample.xs.size() != sample.ys.size()) {
        throw std::invalid_argument("paired sample: xs and ys differ in length");
    }
    if (sample.xs.empty()) throw std::invalid_argument("paired sample: n must be >= 1");
    for (double v : sample.xs)
        if (!std::isfinite(v)) throw std::invalid_argument("paired sample: non-finite x");
    for (double v : sample.ys)
        if (!std::isfinite(v)) throw std::invalid_argument("paired sample: non-finite y");
}

std::int64_t ContingencyTable::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

ContingencyTable make_table(std::size_t rows, std::size_t cols,
                            std::vector<std::int64_t> counts,
                            std::vector<double> row_scores,
                            std::vector<double> col_scores) {
    ContingencyTable t;
    t.rows = rows;
    t.cols = cols;
    t.counts = std::move(counts);
    if (row_scores.empty()) {
        for (std::size_t i = 0; i < rows; ++i) row_scores.push_back(static_cast<double>(i + 1));
    }
    if (col_scores.empty()) {
        for (std::size_t j = 0; j < cols; ++j) col_scores.push_back(static_cast<double>(j + 1));
    }
    t.row_scores = std::move(row_scores);
    t.col_scores = std::move(col_scores);
    validate_table(t, true);
    return t;
}

void validate_table(const ContingencyTable& table, bool strict_scores) {
    if (table.rows == 0 || table.cols == 0) {
        throw std::invalid_argument("contingency table: r and c must be >= 1");
    }
    if (table.counts.size() != table.rows * table.cols) {
        throw std::invalid_argument("contingency table: counts size mismatch");
    }
    for (std::int64_t v : table.counts) {
        if (v < 0) throw std::invalid_argument("contingency table: negative count");
    }
    if (table.row_scores.size() != table.rows || table.col_scores.size() != table.cols) {
        throw std::invalid_argument("contingency table: score size mismatch");
    }
    auto check_scores = [&](const std::vector<double>& s, const char* which) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!std::isfinite(s[i])) {
                throw std::invalid_argument(std::string("contingency table: non-finite ") + which);
            }
            if (i > 0) {
                if (strict_scores ? s[i] <= s[i - 1] : s[i] < s[i - 1]) {
                    throw std::invalid_argument(std::string("contingency table: ") + which +
                                                (strict_scores ? " must be strictly increasing"
                                                               : " must be non-decreasing"));
                }
            }
        }
    };
    check_scores(table.row_scores, "row scores");
    check_scores(table.col_scores, "col scores");
}

namespace detail {

ContingencyTable tabulate(const PairedSample& sample) {
    validate_sample(sample);
    std::size_t dx = 0, dy = 0;
    const auto xr = dense_ranks(sample.xs, dx);
    const auto yr = dense_ranks(sample.ys, dy);
    ContingencyTable t;
    t.rows = dx;
    t.cols = dy;
    t.counts.assign(dx * dy, 0);
    for (std::size_t i = 0; i < sample.n(); ++i) ++t.at(xr[i], yr[i]);
    std::vector<double> xv(sample.xs.begin(), sample.xs.end());
    std::sort(xv.begin(), xv.end());
    xv.erase(std::unique(xv.begin(), xv.end()), xv.end());
    std::vector<double> yv(sample.ys.begin(), sample.ys.end());
    std::sort(yv.begin(), yv.end());
    yv.erase(std::unique(yv.begin(), yv.end()), yv.end());
    t.row_scores = std::move(xv);
    t.col_scores = std::move(yv);
    return t;
}

std::vector<double> midrank_grades(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> grades(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        // #{< v} = i, #{<= v} = j
        const double g = static_cast<double>(i + j) / (2.0 * static_cast<double>(n));
        for (std::size_t k = i; k < j; ++k) grades[order[k]] = g;
        i = j;
    }
    return grades;
}

std::vector<std::int8_t> a_tensor(std::span<const double> values) {
    const std::size_t k = values.size();
    std::vector<std::int8_t> out(k * k * k * k);
    std::size_t t = 0;
    for (std::size_t i1 = 0; i1 < k; ++i1)
        for (std::size_t i2 = 0; i2 < k; ++i2)
            for (std::size_t i3 = 0; i3 < k; ++i3)
                for (std::size_t i4 = 0; i4 < k; ++i4, ++t) {
                    out[t] = static_cast<std::int8_t>(
                        a_fast(values[i1], values[i2], values[i3], values[i4]));
                }
    return out;
}

std::vector<double> h_tensor(std::span<const double> values) {
    const std::size_t k = values.size();
    std::vector<double> out(k * k * k * k);
    std::size_t t = 0;
    for (std::size_t i1 = 0; i1 < k; ++i1)
        for (std::size_t i2 = 0; i2 < k; ++i2)
            for (std::size_t i3 = 0; i3 < k; ++i3)
                for (std::size_t i4 = 0; i4 < k; ++i4, ++t) {
                    out[t] = h_fast(values[i1], values[i2], values[i3], values[i4]);
                }
    return out;
}

std::vector<std::size_t> dense_value_ranks(std::span<const double> values,
                                           std::size_t& distinct_out) {
    return dense_ranks(values, distinct_out);
}

// Quadrant pattern counts over ordered index tuples (repetition allowed):
//   N1 = #{x_i,x_j < x_k,x_l  and  y_i,y_j < y_k,y_l}
//   N2 = #{x_i,x_j < x_k,x_l  and  y_i,y_j > y_k,y_l}
//   N3 = #{x_i,x_j < x_k,x_l  and  y_i,y_k < y_j,y_l}
// The V-form numerator is 4*N1 + 4*N2 - 8*N3: expanding a*a in indicator
// form gives sixteen pattern terms, and each maps onto N1, N2 or N3 by an
// index bijection.
std::int64_t t_star_v_numerator_ranks(std::span<const std::size_t> xr, std::size_t dx,
                                      std::span<const std::size_t> yr, std::size_t dy) {
    const SampleGrid g = build_grid_from_ranks(xr, dx, yr, dy);
    std::int64_t n1 = 0, n2 = 0, n3 = 0;
    for (const auto& a : g.cells) {
        for (const auto& b : g.cells) {
            const std::size_t mi = std::min(a.ix, b.ix);
            const std::int64_t w = a.cnt * b.cnt;
            const std::int64_t s = g.sw(mi, std::min(a.iy, b.iy));
            n1 += w * s * s;
            const std::int64_t q = g.nw(mi, std::max(a.iy, b.iy));
            n2 += w * q * q;
        }
    }
    // roles: b2 = small-x large-y corner, b3 = large-x small-y corner,
    // inner sum over the large-x large-y corner; the remaining corner count
    // comes from the prefix grid.
    for (const auto& b2 : g.cells) {
        for (const auto& b3 : g.cells) {
            if (!(b2.ix < b3.ix && b2.iy > b3.iy)) continue;
            std::int64_t inner = 0;
            for (const auto& b4 : g.cells) {
                if (b4.ix > b2.ix && b4.iy > b3.iy) {
                    inner += b4.cnt * g.sw(std::min(b3.ix, b4.ix), std::min(b2.iy, b4.iy));
                }
            }
            n3 += b2.cnt * b3.cnt * inner;
        }
    }
    return 4 * n1 + 4 * n2 - 8 * n3;
}

std::int64_t t_star_v_numerator(std::span<const double> xs, std::span<const double> ys) {
    std::size_t dx = 0, dy = 0;
    const auto xr = dense_ranks(xs, dx);
    const auto yr = dense_ranks(ys, dy);
    return t_star_v_numerator_ranks(xr, dx, yr, dy);
}

std::int64_t t_star_v_numerator_naive(std::span<const double> xs,
                                      std::span<const double> ys) {
    const std::size_t n = xs.size();
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l) {
                    const int ax = a_fast(xs[i], xs[j], xs[k], xs[l]);
                    if (ax == 0) continue;
                    acc += ax * a_fast(ys[i], ys[j], ys[k], ys[l]);
                }
    return acc;
}

std::int64_t t_star_table_numerator(const ContingencyTable& table) {
    const auto kx = a_tensor(table.row_scores);
    const auto ky = a_tensor(table.col_scores);
    return contract_quadruple<std::int64_t>(table.rows, table.cols, table.counts.data(),
                                            kx.data(), ky.data());
}

double dewet_pair_value(std::span<const double> xs, std::span<const double> ys) {
    const std::vector<double> u = midrank_grades(xs);
    const std::vector<double> w = midrank_grades(ys);
    const std::size_t n = u.size();
    // n^4 D = 4 n^2 S11 + 4 SA*SB - 8 n S10, from expanding h*h into the
    // sixteen |u_a - u_b| |w_c - w_d| index-overlap patterns
    double s11 = 0.0, sa = 0.0, sb = 0.0, s10 = 0.0;
    std::vector<double> arow(n, 0.0), brow(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double ai = 0.0, bi = 0.0, si = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double du = std::abs(u[i] - u[j]);
            const double dw = std::abs(w[i] - w[j]);
            ai += du;
            bi += dw;
            si += du * dw;
        }
        arow[i] = ai;
        brow[i] = bi;
        sa += ai;
        sb += bi;
        s11 += si;
    }
    for (std::size_t i = 0; i < n; ++i) s10 += arow[i] * brow[i];
    const double dn = static_cast<double>(n);
    return (4.0 * dn * dn * s11 + 4.0 * sa * sb - 8.0 * dn * s10) / (dn * dn * dn * dn);
}

}  // namespace detail

double t_star(const PairedSample& sample, const EstimatorConfig& config) {
    check_quadruple_config(sample, config);
    const std::size_t n = sample.n();
    switch (config.method) {
        case EstimatorConfig::Method::Exhaustive: {
            if (config.normalization == EstimatorConfig::Normalization::V) {
                return static_cast<double>(
                           detail::t_star_v_numerator_naive(sample.xs, sample.ys)) /
                       quadruple_denominator(n, config.normalization);
            }
            return static_cast<double>(t_star_u_numerator_naive(sample.xs, sample.ys)) /
                   quadruple_denominator(n, config.normalization);
        }
        case EstimatorConfig::Method::Table: {
            if (config.normalization != EstimatorConfig::Normalization::V) {
                throw std::invalid_argument("table method evaluates the V form only");
            }
            return t_star_from_table(detail::tabulate(sample));
        }
        case EstimatorConfig::Method::Subsample:
            return subsample_quadruple(sample, config, /*grade_kernel=*/false);
    }
    throw std::logic_error("unreachable");
}

double t_star_from_table(const ContingencyTable& table) {
    validate_table(table, false);
    if (table.total() < 1) throw std::invalid_argument("t_star_from_table: empty table");
    check_contraction_size(table);
    const double dn = static_cast<double>(table.total());
    return static_cast<double>(detail::t_star_table_numerator(table)) / (dn * dn * dn * dn);
}

double table_quadruple_contraction(const ContingencyTable& table, KernelId kernel) {
    validate_table(table, false);
    if (table.total() < 1) throw std::invalid_argument("table contraction: empty table");
    check_contraction_size(table);
    const double dn = static_cast<double>(table.total());
    const double denom = dn * dn * dn * dn;
    if (kernel == KernelId::SignA) {
        return static_cast<double>(detail::t_star_table_numerator(table)) / denom;
    }
    const auto rg = grades_from_margin(row_margins(table), table.total());
    const auto cg = grades_from_margin(col_margins(table), table.total());
    const auto kx = detail::h_tensor(rg);
    const auto ky = detail::h_tensor(cg);
    std::vector<double> weights(table.counts.begin(), table.counts.end());
    return detail::contract_quadruple<double>(table.rows, table.cols, weights.data(),
                                              kx.data(), ky.data()) /
           denom;
}

double t_star_b(const PairedSample& sample) {
    validate_sample(sample);
    const std::size_t n = sample.n();
    const double denom = quadruple_denominator(n, EstimatorConfig::Normalization::V);
    const double txx =
        static_cast<double>(detail::t_star_v_numerator(sample.xs, sample.xs)) / denom;
    const double tyy =
        static_cast<double>(detail::t_star_v_numerator(sample.ys, sample.ys)) / denom;
    if (txx <= 0.0 || tyy <= 0.0) {
        throw degenerate_input_error("t_star_b: a margin is constant");
    }
    const double txy =
        static_cast<double>(detail::t_star_v_numerator(sample.xs, sample.ys)) / denom;
    return txy / std::sqrt(txx * tyy);
}

double kendall_t(const PairedSample& sample) {
    validate_sample(sample);
    const std::size_t n = sample.n();
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const int sx = (sample.xs[i] > sample.xs[j]) - (sample.xs[i] < sample.xs[j]);
            if (sx == 0) continue;
            const int sy = (sample.ys[i] > sample.ys[j]) - (sample.ys[i] < sample.ys[j]);
            acc += sx * sy;
        }
    }
    return static_cast<double>(acc) / (static_cast<double>(n) * static_cast<double>(n));
}

double pearson_chi_square(const ContingencyTable& table) {
    validate_table(table, false);
    const auto rm = row_margins(table);
    const auto cm = col_margins(table);
    for (std::int64_t v : rm) {
        if (v == 0) throw degenerate_input_error("chi-square: zero row margin");
    }
    for (std::int64_t v : cm) {
        if (v == 0) throw degenerate_input_error("chi-square: zero column margin");
    }
    const double n = static_cast<double>(table.total());
    double chi = 0.0;
    for (std::size_t i = 0; i < table.rows; ++i) {
        for (std::size_t j = 0; j < table.cols; ++j) {
            const double expected = static_cast<double>(rm[i]) * static_cast<double>(cm[j]) / n;
            const double d = static_cast<double>(table.at(i, j)) - expected;
            chi += d * d / expected;
        }
    }
    return chi;
}

double hoeffding_h(const PairedSample& sample) {
    validate_sample(sample);
    const std::size_t n = sample.n();
    const auto& x = sample.xs;
    const auto& y = sample.ys;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t c12 = 0, c1 = 0, c2 = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const bool lx = x[j] <= x[i];
            const bool ly = y[j] <= y[i];
            c1 += lx;
            c2 += ly;
            c12 += lx && ly;
        }
        const std::int64_t m = static_cast<std::int64_t>(n) * c12 - c1 * c2;
        sum += static_cast<double>(m) * static_cast<double>(m);
    }
    const double dn = static_cast<double>(n);
    return sum / (dn * dn * dn * dn * dn);
}

double hoeffding_h_oracle(const PairedSample& sample) {
    validate_sample(sample);
    const std::size_t n = sample.n();
    if (n < 5) throw std::invalid_argument("hoeffding_h_oracle: n >= 5 required");
    const auto& x = sample.xs;
    const auto& y = sample.ys;
    auto phix = [&](std::size_t a, std::size_t b, std::size_t c) {
        return static_cast<int>(x[a] >= x[b]) - static_cast<int>(x[a] >= x[c]);
    };
    auto phiy = [&](std::size_t a, std::size_t b, std::size_t c) {
        return static_cast<int>(y[a] >= y[b]) - static_cast<int>(y[a] >= y[c]);
    };
    std::int64_t acc = 0;
    for (std::size_t i1 = 0; i1 < n; ++i1)
        for (std::size_t i2 = 0; i2 < n; ++i2)
            for (std::size_t i3 = 0; i3 < n; ++i3) {
                const int p23 = phix(i1, i2, i3) * phiy(i1, i2, i3);
                if (p23 == 0) continue;
                for (std::size_t i4 = 0; i4 < n; ++i4)
                    for (std::size_t i5 = 0; i5 < n; ++i5) {
                        acc += p23 * phix(i1, i4, i5) * phiy(i1, i4, i5);
                    }
            }
    const double dn = static_cast<double>(n);
    return static_cast<double>(acc) / (4.0 * dn * dn * dn * dn * dn);
}

double dewet_d(const PairedSample& sample, const EstimatorConfig& config) {
    check_quadruple_config(sample, config);
    switch (config.method) {
        case EstimatorConfig::Method::Exhaustive:
            return dewet_naive(sample.xs, sample.ys, config.normalization);
        case EstimatorConfig::Method::Table: {
            if (config.normalization != EstimatorConfig::Normalization::V) {
                throw std::invalid_argument("table method evaluates the V form only");
            }
            return table_quadruple_contraction(detail::tabulate(sample), KernelId::GradeH);
        }
        case EstimatorConfig::Method::Subsample:
            return subsample_quadruple(sample, config, /*grade_kernel=*/true);
    }
    throw std::logic_error("unreachable");
}

double cvm_statistic(std::span<const double> u, std::span<const double> v) {
    if (u.empty() || v.empty()) {
        throw std::invalid_argument("cvm_statistic: both samples must be nonempty");
    }
    for (double z : u)
        if (!std::isfinite(z)) throw std::invalid_argument("cvm_statistic: non-finite input");
    for (double z : v)
        if (!std::isfinite(z)) throw std::invalid_argument("cvm_statistic: non-finite input");
    std::vector<double> su(u.begin(), u.end());
    std::vector<double> sv(v.begin(), v.end());
    std::sort(su.begin(), su.end());
    std::sort(sv.begin(), sv.end());
    std::vector<double> pooled;
    pooled.reserve(su.size() + sv.size());
    std::merge(su.begin(), su.end(), sv.begin(), sv.end(), std::back_inserter(pooled));
    const double nu = static_cast<double>(su.size());
    const double nv = static_cast<double>(sv.size());
    const double total = nu + nv;
    double acc = 0.0;
    std::size_t iu = 0, iv = 0, ip = 0;
    while (ip < pooled.size()) {
        const double z = pooled[ip];
        std::size_t jp = ip;
        while (jp < pooled.size() && pooled[jp] == z) ++jp;
        while (iu < su.size() && su[iu] <= z) ++iu;
        while (iv < sv.size() && sv[iv] <= z) ++iv;
        const double g = static_cast<double>(iu) / nu;
        const double h = static_cast<double>(iv) / nv;
        const double w = static_cast<double>(jp - ip) / total;
        acc += (g - h) * (g - h) * w;
        ip = jp;
    }
    return acc;
}

}  // namespace taustar
