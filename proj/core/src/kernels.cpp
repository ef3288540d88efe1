#include "taustar/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace taustar {

namespace {

void require_finite(std::initializer_list<double> zs) {
    for (double z : zs) {
        if (!std::isfinite(z)) {
            throw std::invalid_argument("kernel input must be finite");
        }
    }
}

// all four strict inequalities p < r, p < s, q < r, q < s
inline bool pair_below(double p, double q, double r, double s) {
    return p < r && p < s && q < r && q < s;
}

inline int a_indicator(double z1, double z2, double z3, double z4) {
    return static_cast<int>(pair_below(z1, z2, z3, z4)) +
           static_cast<int>(pair_below(z3, z4, z1, z2)) -
           static_cast<int>(pair_below(z1, z3, z2, z4)) -
           static_cast<int>(pair_below(z2, z4, z1, z3));
}

inline double euclidean(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

int sign_s(double z1, double z2, double z3, double z4) {
    require_finite({z1, z2, z3, z4});
    return sign_of(z1 - z3) * sign_of(z2 - z4);
}

int a_kernel(double z1, double z2, double z3, double z4) {
    require_finite({z1, z2, z3, z4});
    return a_indicator(z1, z2, z3, z4);
}

int a_kernel_metric(std::span<const double> p1, std::span<const double> p2,
                    std::span<const double> p3, std::span<const double> p4) {
    const std::size_t m = p1.size();
    if (m == 0 || p2.size() != m || p3.size() != m || p4.size() != m) {
        throw std::invalid_argument("a_kernel_metric: points must share a dimension >= 1");
    }
    for (auto p : {p1, p2, p3, p4}) {
        for (double v : p) {
            if (!std::isfinite(v)) throw std::invalid_argument("kernel input must be finite");
        }
    }
    if (m == 1) {
        // indicator route keeps exact ties exact; sqrt-based distances would not
        return a_indicator(p1[0], p2[0], p3[0], p4[0]);
    }
    const double d13 = euclidean(p1, p3);
    const double d24 = euclidean(p2, p4);
    const double d12 = euclidean(p1, p2);
    const double d34 = euclidean(p3, p4);
    return sign_of(d13 + d24 - d12 - d34);
}

double h_kernel(double z1, double z2, double z3, double z4) {
    require_finite({z1, z2, z3, z4});
    return std::abs(z1 - z2) + std::abs(z3 - z4) - std::abs(z1 - z3) - std::abs(z2 - z4);
}

int phi_kernel(double z1, double z2, double z3) {
    require_finite({z1, z2, z3});
    return static_cast<int>(z1 >= z2) - static_cast<int>(z1 >= z3);
}

QuadrupleClass classify_quadruple(const std::array<PlanarPoint, 4>& points) {
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw std::invalid_argument("classify_quadruple: coordinates must be finite");
        }
    }
    // the three unordered 2-2 partitions of {0,1,2,3}
    static constexpr int kPartitions[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
    bool concordant = false;
    bool discordant = false;
    for (const auto& part : kPartitions) {
        const PlanarPoint& a = points[part[0]];
        const PlanarPoint& b = points[part[1]];
        const PlanarPoint& c = points[part[2]];
        const PlanarPoint& d = points[part[3]];
        for (int orient = 0; orient < 2; ++orient) {
            const PlanarPoint& lo1 = orient == 0 ? a : c;
            const PlanarPoint& lo2 = orient == 0 ? b : d;
            const PlanarPoint& hi1 = orient == 0 ? c : a;
            const PlanarPoint& hi2 = orient == 0 ? d : b;
            if (std::max(lo1.x, lo2.x) >= std::min(hi1.x, hi2.x)) continue;
            // strict x-split found; check the y-geometry
            const double lo_min = std::min(lo1.y, lo2.y), lo_max = std::max(lo1.y, lo2.y);
            const double hi_min = std::min(hi1.y, hi2.y), hi_max = std::max(hi1.y, hi2.y);
            if (lo_max < hi_min || lo_min > hi_max) concordant = true;
            // a horizontal axis strictly inside both pairs' y-ranges puts one
            // point in each open quadrant
            if (std::max(lo_min, hi_min) < std::min(lo_max, hi_max)) discordant = true;
        }
    }
    if (concordant) return QuadrupleClass::Concordant;
    if (discordant) return QuadrupleClass::Discordant;
    return QuadrupleClass::Tied;
}

}  // namespace taustar
