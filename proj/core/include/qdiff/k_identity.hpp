#pragma once

// Time-domain simplex propagator products and their contour representation.
//
// The object of interest is
//
//   K(t; omega_1..omega_n) = \int_{t_1+...+t_n = t, t_j >= 0}
//                            prod_j exp(-i omega_j t_j)  dt
//
// which for pairwise distinct frequencies has the closed "divided difference"
// form
//
//   K = i^{n-1} * sum_j exp(-i t omega_j) / prod_{l != j} (omega_j - omega_l)
//
// (we work with the divided difference DD = K / i^{n-1} throughout and
// reattach phases at the end).  The same quantity equals a contour integral
//
//   K = i^n * e^{eta t} / (2 pi) * \int_R e^{-i alpha t}
//          prod_j (alpha - omega_j + i eta)^{-1}  d alpha
//
// for any eta > 0, provided Im omega_j <= 0 so all poles stay below the real
// axis.  `k_identity_check` evaluates both sides independently (series or
// recursion for the left, adaptive quadrature plus analytic tail corrections
// for the right) and returns the absolute residual.

#include <complex>
#include <vector>

namespace qdiff {

// Divided difference of f(w) = exp(-i t w) over the (possibly complex,
// possibly repeated) nodes `omega`.  Uses, depending on node separation:
//   * the recursive Newton table when nodes are well separated,
//   * a cancellation-free two-node form exp(-it(a+b)/2) * (-it) * sinc(u),
//   * a globally convergent Taylor form around the node mean,
//       DD = e^{-it wbar} sum_m (-it)^{m+n-1} h_m(w - wbar) / (m+n-1)!
//     with h_m the complete homogeneous symmetric polynomials,
//   * the Opitz matrix-exponential identity for wide spreads containing
//     clustered pairs,
// so confluent (repeated-node) limits are taken automatically rather than
// failing; no degenerate-frequency error is ever needed on this side.
std::complex<double> divided_difference_exp(
    const std::vector<std::complex<double>>& omega, double t);
std::complex<double> divided_difference_exp(const std::vector<double>& omega,
                                            double t);

// Full simplex integral K(t; omega) = i^{n-1} * DD (see above).
std::complex<double> simplex_propagator(
    const std::vector<std::complex<double>>& omega, double t);

// Contour side: i^n e^{eta t} / (2 pi) \int e^{-i alpha t}
// prod (alpha - omega_j + i eta)^{-1} d alpha, integrated adaptively over
// [-A, A] with A = max(2000, 50 (1 + max|omega|)) and the two infinite tails
// restored by a three-term integration-by-parts expansion (the oscillatory
// factor is integrated exactly; derivatives of the rational factor come from
// the power sums S_m = sum_j (A - z_j)^{-m}).  Requires t > 0, eta > 0 and
// Im omega_j <= 0.
std::complex<double> simplex_propagator_contour(
    const std::vector<std::complex<double>>& omega, double t, double eta);

// | closed form - contour |, the acceptance quantity.
double k_identity_check(const std::vector<std::complex<double>>& omega,
                        double t, double eta);
double k_identity_check(const std::vector<double>& omega, double t, double eta);

}  // namespace qdiff
