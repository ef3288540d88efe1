#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace taustar::detail {

// Quadruple contraction
//
//   sum_{a,b,c,d} kx[a,b,c,d] * sum_{j1..j4} ky[j1,j2,j3,j4]
//                 * W[a,j1] W[b,j2] W[c,j3] W[d,j4]
//
// evaluated by contracting one j-index at a time.  This is an exact
// reordering of the multilinear sum; cost O(r c^4 + r^2 c^3 + r^3 c^2 +
// r^4 c) instead of O(r^4 c^4).  With integer weights and an integer
// accumulator every intermediate is exact.
template <typename Acc, typename W, typename KX, typename KY>
Acc contract_quadruple(std::size_t r, std::size_t c, const W* weights,
                       const KX* kx, const KY* ky) {
    const std::size_t c2 = c * c, c3 = c2 * c;
    const std::size_t r2 = r * r, r3 = r2 * r;

    std::vector<Acc> a1(r * c3, Acc(0));  // [a][j2,j3,j4]
    for (std::size_t a = 0; a < r; ++a) {
        Acc* out = a1.data() + a * c3;
        for (std::size_t j1 = 0; j1 < c; ++j1) {
            const Acc w = static_cast<Acc>(weights[a * c + j1]);
            if (w == Acc(0)) continue;
            const KY* src = ky + j1 * c3;
            for (std::size_t t = 0; t < c3; ++t) out[t] += w * static_cast<Acc>(src[t]);
        }
    }

    std::vector<Acc> a2(r2 * c2, Acc(0));  // [a][b][j3,j4]
    for (std::size_t a = 0; a < r; ++a) {
        for (std::size_t b = 0; b < r; ++b) {
            Acc* out = a2.data() + (a * r + b) * c2;
            for (std::size_t j2 = 0; j2 < c; ++j2) {
                const Acc w = static_cast<Acc>(weights[b * c + j2]);
                if (w == Acc(0)) continue;
                const Acc* src = a1.data() + a * c3 + j2 * c2;
                for (std::size_t t = 0; t < c2; ++t) out[t] += w * src[t];
            }
        }
    }
    a1.clear();
    a1.shrink_to_fit();

    std::vector<Acc> a3(r3 * c, Acc(0));  // [a][b][cc][j4]
    for (std::size_t ab = 0; ab < r2; ++ab) {
        for (std::size_t cc = 0; cc < r; ++cc) {
            Acc* out = a3.data() + (ab * r + cc) * c;
            for (std::size_t j3 = 0; j3 < c; ++j3) {
                const Acc w = static_cast<Acc>(weights[cc * c + j3]);
                if (w == Acc(0)) continue;
                const Acc* src = a2.data() + ab * c2 + j3 * c;
                for (std::size_t t = 0; t < c; ++t) out[t] += w * src[t];
            }
        }
    }
    a2.clear();
    a2.shrink_to_fit();

    Acc total(0);
    for (std::size_t abc = 0; abc < r3; ++abc) {
        const Acc* src = a3.data() + abc * c;
        for (std::size_t d = 0; d < r; ++d) {
            const KX k = kx[abc * r + d];
            if (k == KX(0)) continue;
            Acc dot(0);
            const W* wrow = weights + d * c;
            for (std::size_t j4 = 0; j4 < c; ++j4) dot += static_cast<Acc>(wrow[j4]) * src[j4];
            total += static_cast<Acc>(k) * dot;
        }
    }
    return total;
}

}  // namespace taustar::detail
