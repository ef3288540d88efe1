#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "taustar/estimators.hpp"

namespace taustar {

/// Ordered categories of one axis: real scores (dim 1, strictly increasing)
/// or pairwise-distinct points in R^m.
struct AxisCategories {
    bool real = true;
    std::size_t dim = 1;
    std::vector<std::vector<double>> values;

    std::size_t size() const noexcept { return values.size(); }
    double score(std::size_t i) const { return values[i][0]; }
    std::vector<double> scores() const;
};

/// Finite discrete joint law on r x c category pairs.
struct JointDistribution {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> probs;  // row-major, sums to 1
    AxisCategories row_values;
    AxisCategories col_values;

    double at(std::size_t i, std::size_t j) const { return probs[i * cols + j]; }
    double& at(std::size_t i, std::size_t j) { return probs[i * cols + j]; }
    bool all_real() const noexcept { return row_values.real && col_values.real; }
};

JointDistribution make_joint(std::size_t rows, std::size_t cols, std::vector<double> probs,
                             std::vector<double> row_scores = {},
                             std::vector<double> col_scores = {});
JointDistribution make_joint_metric_rows(std::size_t rows, std::size_t cols,
                                         std::vector<double> probs,
                                         std::vector<std::vector<double>> row_points,
                                         std::vector<double> col_scores = {});
void validate_joint(const JointDistribution& joint);

/// Probabilities that four iid draws form a concordant / discordant / tied
/// quadruple (atoms may repeat).
struct QuadrupleProbs {
    double pi_c4 = 0.0;
    double pi_d4 = 0.0;
    double pi_tied = 0.0;
};

/// Result of the fixed-marginal nonnegativity sweep.
struct SweepReport {
    std::uint64_t trials = 0;
    double min_tau_star = 0.0;
    JointDistribution argmin_table;
    std::uint64_t independence_hits = 0;  // trials with |tau*| <= 1e-12
};

/// A discrete law on the reals (atoms strictly increasing).
struct DiscreteLaw {
    std::vector<double> atoms;
    std::vector<double> probs;
};
DiscreteLaw make_discrete_law(std::vector<double> atoms, std::vector<double> probs);

enum class CdfConvention { Left, Right };  // P(. < z) vs P(. <= z)

/// tau* = E a(X1..X4) a(Y1..Y4), by exact contraction over cell quadruples.
/// This kernel expectation is the authoritative definition throughout.
double pop_tau_star(const JointDistribution& joint);

/// tau* through the calibrated pattern probabilities: 4(E1 + E2) - 8 E3 with
///   E1 = P(X1,X2 < X3,X4 and Y1,Y2 < Y3,Y4)
///   E2 = P(X1,X2 < X3,X4 and Y1,Y2 > Y3,Y4)
///   E3 = P(X1,X2 < X3,X4 and Y1,Y3 < Y2,Y4)
/// Equals pop_tau_star on every real-valued joint.
double pop_tau_star_from_probs(const JointDistribution& joint);

/// Binary-X reduction: 4 p^2 (1-p)^2 [P(U1,U2<V1,V2) + P(V1,V2<U1,U2)
/// - 2 P(U1,V1<U2,V2)] with U = (Y | X = row 1), V = (Y | X = row 2).
double pop_tau_star_binary(const JointDistribution& joint);

/// Exact concordance / discordance / tie probabilities for real-valued
/// joints; Pi_C4 = 6(E1 + E2), Pi_D4 = 24 E3.
QuadrupleProbs pop_quadruple_probs(const JointDistribution& joint);

/// C_alpha = sum over atoms of (G - H)^2 d(alpha G + (1 - alpha) H), with the
/// chosen CDF convention.  alpha may be any real.
double pop_cvm_c_alpha(const DiscreteLaw& g, const DiscreteLaw& h, double alpha,
                       CdfConvention convention = CdfConvention::Right);

/// Mixture law: existing probabilities scaled by p, mass 1 - p at (x0, y0);
/// categories extended as needed.  Real-valued joints only.
JointDistribution mix_with_point_mass(const JointDistribution& joint, double x0, double y0,
                                      double p);

/// The 8-atom joint with X in R^8 (within-group distance sqrt(32), cross-group
/// sqrt(24)) and binary real Y; its tau* is negative (-1/32 by enumeration).
JointDistribution counterexample_r8();

/// Random search plus local descent for the minimum tau* over 3x3 joints with
/// the given marginals.  Trial 0 is the product table.  Deterministic for a
/// given (marginals, trials, seed).
SweepReport sweep_3x3(const std::array<double, 3>& row_marginals,
                      const std::array<double, 3>& col_marginals, std::uint64_t trials,
                      std::uint64_t seed);

/// Joint law p_ij = counts_ij / n with the table's scores.
JointDistribution empirical_joint(const ContingencyTable& table);

namespace detail {

struct PatternProbs {
    double e1 = 0.0, e2 = 0.0, e3 = 0.0;
};

/// Exact E1, E2, E3 for a real-valued joint via prefix sums over the grid.
PatternProbs expectation_patterns(const JointDistribution& joint);

/// a-kernel tensor over the categories of one axis (indicator form for real
/// axes, Euclidean sign form for metric axes).
std::vector<std::int8_t> axis_a_tensor(const AxisCategories& axis);

}  // namespace detail

}  // namespace taustar
