#pragma once

#include <array>
#include <span>

namespace taustar {

/// Geometry of a set of four planar points.
///
/// Concordant: some vertical and horizontal axis pair strictly separates the
/// set so that two opposing open quadrants hold two points each.
/// Discordant: some axis pair strictly separates the set with exactly one
/// point in every open quadrant.  Tied: neither.
enum class QuadrupleClass { Concordant, Discordant, Tied };

/// Kernel selector for the table-contraction engine.
enum class KernelId { SignA, GradeH };

struct PlanarPoint {
    double x;
    double y;
};

/// sign((z1 - z3) * (z2 - z4)), in {-1, 0, +1}.
int sign_s(double z1, double z2, double z3, double z4);

/// The four-point sign kernel behind t* and tau*, in indicator form:
///
///   a = I(z1,z2 < z3,z4) + I(z1,z2 > z3,z4)
///     - I(z1,z3 < z2,z4) - I(z1,z3 > z2,z4)
///
/// where I(p,q < r,s) requires all four strict inequalities.  Equivalently
/// sign(|z1-z3| + |z2-z4| - |z1-z2| - |z3-z4|).  Any tie across the compared
/// pairs yields 0.
int a_kernel(double z1, double z2, double z3, double z4);

/// Metric-space extension of a_kernel for points in R^m with the Euclidean
/// distance: sign(d13 + d24 - d12 - d34).  For m == 1 this is evaluated via
/// the indicator form and agrees with a_kernel exactly, ties included.
int a_kernel_metric(std::span<const double> p1, std::span<const double> p2,
                    std::span<const double> p3, std::span<const double> p4);

/// |z1-z2| + |z3-z4| - |z1-z3| - |z2-z4|  (grade kernel of the D statistic).
double h_kernel(double z1, double z2, double z3, double z4);

/// I(z1 >= z2) - I(z1 >= z3), in {-1, 0, +1}.
int phi_kernel(double z1, double z2, double z3);

/// Classify four planar points by exhaustive search over strict 2-2 x-splits.
QuadrupleClass classify_quadruple(const std::array<PlanarPoint, 4>& points);

}  // namespace taustar
