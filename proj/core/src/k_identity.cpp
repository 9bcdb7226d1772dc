#include "qdiff/k_identity.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "qdiff/errors.hpp"
#include "qdiff/quadrature.hpp"

namespace qdiff {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};
constexpr double kPi = 3.14159265358979323846;

cd i_pow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// Globally convergent series around the node mean:
//   DD = e^{-it wbar} sum_{m>=0} (-it)^{m+n-1} h_m(w - wbar) / (m+n-1)!
// with h_m the complete homogeneous symmetric polynomials of the centered
// nodes.  Exact duplicates are just another node configuration here, so the
// confluent (repeated-frequency) limit needs no special casing.
cd dd_taylor(const std::vector<cd>& omega, double t) {
    const std::size_t n = omega.size();
    cd wbar = 0.0;
    for (const cd& w : omega) wbar += w;
    wbar /= static_cast<double>(n);

    const std::size_t max_m = 400;
    // h[m] after processing j nodes holds h_m(w_1..w_j); the update
    // h[m] += w_j h[m-1] appends one node at a time.
    std::vector<cd> h(max_m + 1, cd{0.0, 0.0});
    h[0] = 1.0;
    for (const cd& w : omega) {
        const cd c = w - wbar;
        // h_m(new) = h_m(old) + c * h_{m-1}(new): ascending in-place sweep.
        for (std::size_t m = 1; m <= max_m; ++m) h[m] += c * h[m - 1];
    }

    const cd mit = -kI * t;
    cd pref = 1.0;
    for (std::size_t j = 1; j < n; ++j) pref *= mit / static_cast<double>(j);
    // pref = (-it)^{n-1} / (n-1)!
    cd sum = 0.0;
    for (std::size_t m = 0; m <= max_m; ++m) {
        const cd term = pref * h[m];
        sum += term;
        if (m > 4 && std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
        pref *= mit / static_cast<double>(m + n);
    }
    return std::exp(-kI * t * wbar) * sum;
}

// Two nodes: DD = -i t e^{-it(a+b)/2} sinc(t (a-b)/2), cancellation-free for
// every separation.
cd dd_two(cd a, cd b, double t) {
    const cd m = 0.5 * (a + b);
    const cd u = 0.5 * t * (a - b);
    const cd sinc =
        (std::abs(u) < 1e-8) ? 1.0 - u * u / 6.0 : std::sin(u) / u;
    return -kI * t * std::exp(-kI * t * m) * sinc;
}

// Plain Newton table; adequate when every pairwise gap satisfies
// |t (w_i - w_j)| well above machine precision so the first-level differences
// carry no severe cancellation.
cd dd_newton(const std::vector<cd>& omega, double t) {
    const std::size_t n = omega.size();
    std::vector<cd> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = std::exp(-kI * t * omega[j]);
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t j = 0; j + level < n; ++j) {
            d[j] = (d[j + 1] - d[j]) / (omega[j + level] - omega[j]);
        }
    }
    return d[0];
}

// Opitz fallback: DD equals the (1,n) entry of f(Z) where Z is upper
// bidiagonal with the nodes on the diagonal and ones above it.  Scaling and
// squaring of exp(-it Z) keeps this stable for wide node spreads that still
// contain clustered pairs (the one regime the other formulas do not cover).
cd dd_opitz(const std::vector<cd>& omega, double t) {
    const std::size_t n = omega.size();
    std::vector<cd> A(n * n, cd{0.0, 0.0});
    auto at = [&](std::vector<cd>& M, std::size_t r, std::size_t c) -> cd& {
        return M[r * n + c];
    };
    double norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        at(A, j, j) = -kI * t * omega[j];
        norm = std::max(norm, std::abs(t) * (std::abs(omega[j]) + 1.0));
        if (j + 1 < n) at(A, j, j + 1) = -kI * t;
    }
    int s = 0;
    while (norm > 0.25) {
        norm *= 0.5;
        ++s;
    }
    const double scale = std::ldexp(1.0, -s);
    for (auto& v : A) v *= scale;

    // exp via Taylor on the scaled (norm <= 1/4) triangular matrix.
    std::vector<cd> F(n * n, cd{0.0, 0.0});
    std::vector<cd> P(A);  // running A^k / k!
    for (std::size_t j = 0; j < n; ++j) at(F, j, j) = 1.0;
    for (std::size_t j = 0; j < n * n; ++j) F[j] += P[j];
    std::vector<cd> tmp(n * n);
    for (int k = 2; k <= 24; ++k) {
        std::fill(tmp.begin(), tmp.end(), cd{0.0, 0.0});
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t m = r; m < n; ++m) {
                const cd prm = at(P, r, m);
                if (prm == cd{0.0, 0.0}) continue;
                for (std::size_t c = m; c < n; ++c) at(tmp, r, c) += prm * at(A, m, c);
            }
        for (auto& v : tmp) v /= static_cast<double>(k);
        P.swap(tmp);
        double pmax = 0.0;
        for (const auto& v : P) pmax = std::max(pmax, std::abs(v));
        for (std::size_t j = 0; j < n * n; ++j) F[j] += P[j];
        if (pmax < 1e-20) break;
    }
    for (int q = 0; q < s; ++q) {
        std::fill(tmp.begin(), tmp.end(), cd{0.0, 0.0});
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t m = r; m < n; ++m) {
                const cd frm = at(F, r, m);
                if (frm == cd{0.0, 0.0}) continue;
                for (std::size_t c = m; c < n; ++c) at(tmp, r, c) += frm * at(F, m, c);
            }
        F.swap(tmp);
    }
    // With ones on the superdiagonal of Z, the (1,n) entry of exp(-itZ) is the
    // divided difference times (-it)^{n-1}, because A = -it Z scales the
    // off-diagonal by -it as well.
    cd val = at(F, 0, n - 1);
    cd fix = 1.0;
    for (std::size_t j = 1; j < n; ++j) fix *= -kI * t;
    if (std::abs(fix) == 0.0) return dd_taylor(omega, t);  // t == 0
    return val / fix;
}

}  // namespace

std::complex<double> divided_difference_exp(
    const std::vector<std::complex<double>>& omega, double t) {
    const std::size_t n = omega.size();
    if (n == 0) throw HypothesisViolated("divided_difference_exp: empty node set");
    if (n == 1) return std::exp(-kI * t * omega[0]);
    if (n == 2) return dd_two(omega[0], omega[1], t);
    if (n > 64) throw BudgetExceeded("divided_difference_exp: too many nodes");

    cd mean = 0.0;
    for (const cd& x : omega) mean += x;
    mean /= static_cast<double>(n);
    double max_dev = 0.0;
    for (const cd& x : omega) max_dev = std::max(max_dev, std::abs(x - mean));
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            min_gap = std::min(min_gap, std::abs(omega[i] - omega[j]));

    const double ta = std::abs(t);
    if (ta * max_dev <= 2.0) return dd_taylor(omega, t);
    if (ta * min_gap >= 1e-3) return dd_newton(omega, t);
    return dd_opitz(omega, t);
}

std::complex<double> divided_difference_exp(const std::vector<double>& omega,
                                            double t) {
    std::vector<cd> w(omega.begin(), omega.end());
    return divided_difference_exp(w, t);
}

std::complex<double> simplex_propagator(
    const std::vector<std::complex<double>>& omega, double t) {
    const int n = static_cast<int>(omega.size());
    return i_pow(n - 1) * divided_difference_exp(omega, t);
}

std::complex<double> simplex_propagator_contour(
    const std::vector<std::complex<double>>& omega, double t, double eta) {
    const std::size_t n = omega.size();
    if (n == 0) throw HypothesisViolated("simplex_propagator_contour: empty set");
    if (t <= 0.0)
        throw HypothesisViolated(
            "simplex_propagator_contour: tail expansion needs t > 0");
    if (eta <= 0.0)
        throw HypothesisViolated("simplex_propagator_contour: eta must be positive");
    for (const cd& w : omega)
        if (w.imag() > 1e-12)
            throw HypothesisViolated(
                "simplex_propagator_contour: frequencies must have Im <= 0");

    double wmax = 0.0;
    for (const cd& w : omega) wmax = std::max(wmax, std::abs(w));
    const double A = std::max(2000.0, 50.0 * (1.0 + wmax));

    std::vector<cd> z(n);
    for (std::size_t j = 0; j < n; ++j) z[j] = omega[j] - kI * eta;

    auto rational = [&](double alpha) {
        cd f = 1.0;
        for (const auto& zj : z) f /= (alpha - zj);
        return f;
    };
    auto integrand = [&](double alpha) {
        return std::exp(-kI * alpha * t) * rational(alpha);
    };

    // Break points: geometric shells around each pole footprint plus a uniform
    // grid fine enough that each chunk holds only a few oscillation periods.
    std::vector<double> breaks;
    const double shells[] = {1.0, 4.0, 16.0, 64.0, 256.0, 1024.0};
    for (const cd& w : omega) {
        // Pole depth below the axis controls the footprint width on the axis.
        const double depth = eta + std::abs(w.imag());
        breaks.push_back(w.real());
        for (double s : shells) {
            breaks.push_back(w.real() - s * depth);
            breaks.push_back(w.real() + s * depth);
        }
    }
    const double chunk = std::max(10.0 * kPi / t, 0.05);
    for (double x = -A + chunk; x < A; x += chunk) breaks.push_back(x);

    const CQuadResult main = integrate_c(integrand, -A, A, breaks, 1e-10);

    // Three-term integration-by-parts tails.  With f the rational factor,
    // f' = -f S1 and f'' = f (S1^2 + S2) where S_m = sum_j (alpha - z_j)^{-m}.
    auto tail = [&](double a, double sign) {
        cd S1 = 0.0, S2 = 0.0;
        for (const auto& zj : z) {
            const cd r = 1.0 / (a - zj);
            S1 += r;
            S2 += r * r;
        }
        const cd f = rational(a);
        const cd fp = -f * S1;
        const cd fpp = f * (S1 * S1 + S2);
        const cd it = kI * t;
        return sign * std::exp(-kI * a * t) *
               (f / it + fp / (it * it) + fpp / (it * it * it));
    };
    const cd tails = tail(A, +1.0) + tail(-A, -1.0);

    const cd pref = i_pow(static_cast<int>(n)) * std::exp(eta * t) / (2.0 * kPi);
    return pref * (main.value + tails);
}

double k_identity_check(const std::vector<std::complex<double>>& omega,
                        double t, double eta) {
    const cd lhs = simplex_propagator(omega, t);
    const cd rhs = simplex_propagator_contour(omega, t, eta);
    return std::abs(lhs - rhs);
}

double k_identity_check(const std::vector<double>& omega, double t,
                        double eta) {
    std::vector<cd> w(omega.begin(), omega.end());
    return k_identity_check(w, t, eta);
}

}  // namespace qdiff
