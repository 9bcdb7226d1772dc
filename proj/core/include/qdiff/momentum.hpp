#pragma once

#include <cmath>
#include <vector>

#include "qdiff/errors.hpp"
#include "qdiff/permutation.hpp"
#include "qdiff/tower_matrix.hpp"
#include "qdiff/vec.hpp"

namespace qdiff {

// Relabelled momenta: given main momenta p_1..p_{k+1} (1-based), transfer
// momenta u_1..u_k with vanishing sum, and the offset xi, the partner line
// carries ptilde = M(sigma) (p - v) with v_l = xi + u_1 + ... + u_{l-1}.
//
// The defining delta constraints are checked on exit:
//   ptilde_{k+1} = p_{k+1} - xi
//   p_{l+1} - p_l - (ptilde_{sigma(l)+1} - ptilde_{sigma(l)}) - u_l = 0 .
inline std::vector<Vec> resolve_tilde(const Permutation& sigma,
                                      const std::vector<Vec>& p,
                                      const std::vector<Vec>& u, const Vec& xi,
                                      double tol = 1e-9) {
    const int k = sigma.k();
    const int n = k + 1;
    if (static_cast<int>(p.size()) != n + 1 || static_cast<int>(u.size()) != k + 1)
        throw ConfigInvalid("resolve_tilde expects 1-based p[1..k+1], u[1..k]");
    const int d = xi.d;

    Vec usum(d);
    for (int l = 1; l <= k; ++l) usum += u[static_cast<size_t>(l)];
    if (norm(usum) > tol)
        throw AuxiliarySumNonzero("transfer momenta must sum to zero");

    std::vector<Vec> v(static_cast<size_t>(n) + 1, Vec(d));
    Vec acc = xi;
    for (int l = 1; l <= n; ++l) {
        v[static_cast<size_t>(l)] = acc;
        if (l <= k) acc += u[static_cast<size_t>(l)];
    }

    const TowerMatrix M = tower_matrix(sigma);
    std::vector<Vec> pt(static_cast<size_t>(n) + 1, Vec(d));
    for (int i = 1; i <= n; ++i) {
        Vec s(d);
        for (int j = 1; j <= n; ++j) {
            const int m = M(i, j);
            if (m == 0) continue;
            const Vec& term = p[static_cast<size_t>(j)];
            const Vec& shift = v[static_cast<size_t>(j)];
            if (m > 0) {
                s += term;
                s -= shift;
            } else {
                s -= term;
                s += shift;
            }
        }
        pt[static_cast<size_t>(i)] = s;
    }

    double scale = 1.0;
    for (int j = 1; j <= n; ++j) scale = std::max(scale, norm(p[static_cast<size_t>(j)]));
    const Vec last_check = pt[static_cast<size_t>(n)] - (p[static_cast<size_t>(n)] - xi);
    if (norm(last_check) > tol * scale)
        throw Error("relabelling failed the boundary constraint");
    for (int l = 1; l <= k; ++l) {
        const int sl = sigma(l);
        const Vec lhs = p[static_cast<size_t>(l + 1)] - p[static_cast<size_t>(l)] -
                        (pt[static_cast<size_t>(sl + 1)] - pt[static_cast<size_t>(sl)]) -
                        u[static_cast<size_t>(l)];
        if (norm(lhs) > tol * scale)
            throw Error("relabelling failed an interior delta constraint");
    }
    return pt;
}

}  // namespace qdiff
