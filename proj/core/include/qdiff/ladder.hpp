#pragma once

// Ladder-diagram values at small collision number and the free Wigner term.
//
// The renormalized ladder value is
//
//   V(t, k) = lambda^{2k} \int dp_1..dp_{k+1} |psi0_hat(p_1)|^2
//             prod_{j=1}^{k} |Bhat(p_{j+1} - p_j)|^2
//             |K(t; omega(p_1), .., omega(p_{k+1}))|^2
//
// with omega(p) = e(p) + lambda^2 Theta(e(p)) the renormalized dispersion and
// K the simplex propagator (see k_identity.hpp); the two contour variables of
// the double-propagator representation have been reduced by exact residue
// evaluation, which also cancels the e^{2 eta t} regularization factor.
// Spherical symmetry of all profiles reduces the 3(k+1)-dimensional momentum
// integral to k+1 radii and k relative polar cosines, making k <= 2 tractable
// with tensor Gauss-Legendre quadrature.

#include <complex>
#include <functional>

#include "qdiff/radial_profile.hpp"
#include "qdiff/self_energy.hpp"

namespace qdiff {

struct LadderOptions {
    int radial_nodes = 48;   // Gauss-Legendre nodes per radial direction
    int angular_nodes = 24;  // nodes per polar cosine
    double r_max = 8.0;      // radial truncation (profiles are Schwartz)
    unsigned workers = 1;
};

// V(t, k) as above.  k <= 2 only (the quadrature dimension is 2k+1);
// throws BudgetExceeded for k >= 3 and HypothesisViolated for d != 3.
std::complex<double> ladder_value(double t, int k, const Dispersion& disp,
                                  const RadialProfile& psi0_hat,
                                  const LadderOptions& opts = {});

// Separable test observable O(xi, v) = xi_part(|xi|) * v_part(|v|),
// radial in the velocity slot and Schwartz in the dual (xi) slot.
struct Observable {
    std::function<double(double)> xi_part;
    std::function<double(double)> v_part;
};

// Free (zero-collision) term of the Wigner pairing at kinetic scale eps:
//
//   W(t, eps, O) = \int dxi dv e^{i t eps v.xi} e^{2 t lambda^2 Im Theta(v)}
//                  O(xi, v) conj(W0_hat)(eps xi, v)
//
// where W0_hat(xi, v) = psi0_hat(v + xi/2) conj(psi0_hat)(v - xi/2) is the
// x -> xi Fourier transform of the Wigner function of the initial state.
// At t = 0 this is exactly the pairing <O, W0^eps>.
std::complex<double> free_term_W(double t, double eps, const Dispersion& disp,
                                 const RadialProfile& psi0_hat,
                                 const Observable& obs,
                                 const LadderOptions& opts = {});

}  // namespace qdiff
