#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "taustar/kernels.hpp"

namespace taustar {

/// n paired observations (x_i, y_i); the unit of every sample statistic.
struct PairedSample {
    std::vector<double> xs;
    std::vector<double> ys;

    std::size_t n() const noexcept { return xs.size(); }
};

PairedSample make_sample(std::vector<double> xs, std::vector<double> ys);
void validate_sample(const PairedSample& sample);

/// Evaluation strategy for the quadruple statistics t* and D.
struct EstimatorConfig {
    enum class Method { Exhaustive, Table, Subsample };
    enum class Normalization { V, U };

    Method method = Method::Exhaustive;
    Normalization normalization = Normalization::V;
    std::uint64_t seed = 0;         // used by Subsample only
    std::uint64_t subsample_m = 0;  // number of index tuples drawn
};

/// r x c nonnegative counts with ordered category scores.
struct ContingencyTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::int64_t> counts;  // row-major
    std::vector<double> row_scores;
    std::vector<double> col_scores;

    std::int64_t at(std::size_t i, std::size_t j) const { return counts[i * cols + j]; }
    std::int64_t& at(std::size_t i, std::size_t j) { return counts[i * cols + j]; }
    std::int64_t total() const;
};

ContingencyTable make_table(std::size_t rows, std::size_t cols,
                            std::vector<std::int64_t> counts,
                            std::vector<double> row_scores = {},
                            std::vector<double> col_scores = {});

/// strict_scores: require strictly increasing scores (parsing/tabulation);
/// statistic evaluation accepts merely non-decreasing scores, since the
/// kernels handle tied values natively.
void validate_table(const ContingencyTable& table, bool strict_scores = true);

/// The sign-covariance statistic t*: the average of
/// a(x_i,x_j,x_k,x_l) * a(y_i,y_j,y_k,y_l) over index quadruples.
/// V averages over all n^4 tuples, U over tuples of distinct indices.
double t_star(const PairedSample& sample, const EstimatorConfig& config = {});

/// V-form t* evaluated on tabulated data by contracting cell quadruples;
/// equals t_star(expanded sample, V) exactly.  Cost independent of n.
double t_star_from_table(const ContingencyTable& table);

/// Shared contraction engine: SignA applies the a kernel to row/column
/// scores, GradeH applies the h kernel to the marginal mid-grades of the
/// expanded sample.
double table_quadruple_contraction(const ContingencyTable& table, KernelId kernel);

/// Normalized statistic t*(x,y) / sqrt(t*(x,x) t*(y,y)), in [-1, 1].
double t_star_b(const PairedSample& sample);

/// (1/n^2) sum_{i,j} sign(x_i - x_j) sign(y_i - y_j).
double kendall_t(const PairedSample& sample);

/// Pearson chi-square of the table; requires positive margins.
double pearson_chi_square(const ContingencyTable& table);

/// Plug-in H: mean of (F12 - F1 F2)^2 at the data points, with "<=" empirical
/// distribution functions.
double hoeffding_h(const PairedSample& sample);

/// Literal five-index evaluation (1/4) n^-5 sum phi phi phi phi.
/// Algebraically equal to hoeffding_h; kept as an independent route.
/// O(n^5) -- intended for small n.
double hoeffding_h_oracle(const PairedSample& sample);

/// The D statistic: quadruple average of h(grades of x) * h(grades of y),
/// with mid-distribution grades F(v) = (#{<v} + #{<=v}) / 2n.
double dewet_d(const PairedSample& sample, const EstimatorConfig& config = {});

/// Two-sample Cramer-von Mises: sum over pooled atoms of (G - H)^2 weighted
/// by the pooled empirical mass.
double cvm_statistic(std::span<const double> u, std::span<const double> v);

namespace detail {

/// Distinct sorted x-values as row scores, distinct sorted y-values as
/// column scores, counts by co-occurrence.
ContingencyTable tabulate(const PairedSample& sample);

/// Mid-distribution grades (#{< v} + #{<= v}) / (2n), one per input value.
std::vector<double> midrank_grades(std::span<const double> values);

/// a-kernel over all value quadruples, flattened row-major k^4 tensor.
std::vector<std::int8_t> a_tensor(std::span<const double> values);
std::vector<double> h_tensor(std::span<const double> values);

/// Integer numerator of the V-form t*: sum over all n^4 tuples of a*a.
/// Computed from quadrant pattern counts (exact identity 4*N1 + 4*N2 - 8*N3);
/// O(n^2 + cells^3) instead of O(n^4).
std::int64_t t_star_v_numerator(std::span<const double> xs, std::span<const double> ys);

/// Same, from dense value ranks (xr[i] in [0, dx)); saves re-ranking when one
/// margin is permuted repeatedly.
std::int64_t t_star_v_numerator_ranks(std::span<const std::size_t> xr, std::size_t dx,
                                      std::span<const std::size_t> yr, std::size_t dy);

/// Dense ranks of each value among the sorted distinct input values.
std::vector<std::size_t> dense_value_ranks(std::span<const double> values,
                                           std::size_t& distinct_out);

/// Same numerator by the literal quadruple loop.
std::int64_t t_star_v_numerator_naive(std::span<const double> xs, std::span<const double> ys);

/// Integer numerator of the table-path t* (counts contraction).
std::int64_t t_star_table_numerator(const ContingencyTable& table);

/// Pair-sum evaluation of the V-form D statistic;
/// matches the quadruple loop to floating-point accuracy.
double dewet_pair_value(std::span<const double> xs, std::span<const double> ys);

}  // namespace detail

}  // namespace taustar
