#pragma once

// Discrete Wigner transform on periodic grids, with exact marginal identities.
//
// For psi on an N-point grid (spacing h) the transform is evaluated through
// the doubled "half-step" grid psi~ obtained by trigonometric interpolation
// (zero-padding the spectrum to 2N).  With
//
//   c^{(j)}_m = conj(psi~_{2j+m}) psi~_{2j-m},   m = -N/2 .. N/2,
//
// the Wigner matrix on velocities v_n = n/(N h) is
//
//   W[j][n] = h * Re sum_m w_m c^{(j)}_m e^{2 pi i n m / N},
//
// with trapezoidal end weights w_{+-N/2} = 1/2 (all other w_m = 1).  This
// discretization is chosen so that both marginals are identities of the DFT,
// not approximations:
//
//   sum_n W[j][n] dv      = |psi_j|^2            (dv = 1/(N h)),
//   sum_j W[j][n] h       = |psi_hat(v_n)|^2,
//
// where psi_hat(v) = h sum_j e^{-2 pi i v x_j} psi_j, so normalization and
// both densities are reproduced to FFT round-off.  In d = 2 the construction
// tensorizes (products of end weights, 2D zero-padding).
//
// The kinetic rescaling W_eps(X, v) = eps^{-d} W(X/eps, v) only relabels the
// position axis (X_j = eps x_j) and scales the values; velocity marginals are
// unchanged.

#include <complex>
#include <functional>
#include <vector>

#include "qdiff/ladder.hpp"  // Observable: separable O(xi, v) test functions
#include "qdiff/wavefunction.hpp"

namespace qdiff {

// Wigner function on the phase-space grid (X, v).  Values are stored with the
// space multi-index outer and the velocity multi-index inner:
//   d = 1: value[j*N + n]
//   d = 2: value[((j1*N + j2)*N + n1)*N + n2]
// where j indexes X ascending and n indexes v ascending (n = -N/2 .. N/2-1).
struct WignerFunction {
    int d = 1;
    int N = 0;
    double eps = 1.0;          // kinetic space rescaling
    double h = 0.0;            // spacing of the underlying psi grid
    std::vector<double> X;     // N positions per axis: eps * x_j
    std::vector<double> v;     // N velocities per axis: n/(N h)
    std::vector<double> value; // N^{2d} values

    double dX() const { return eps * h; }
    double dv() const { return 1.0 / (N * h); }

    // sum value * dX^d * dv^d  (equals ||psi||^2 exactly).
    double mass() const;
    // Integrate out velocity: N^d values on the X grid (= eps^{-d}|psi(X/eps)|^2).
    std::vector<double> marginal_x() const;
    // Integrate out position: N^d values on the v grid (= |psi_hat(v)|^2).
    std::vector<double> marginal_v() const;
};

// Discrete Wigner transform of psi, rescaled by eps.  d must be 1 or 2.
// Throws GridTooCoarse when more than 1e-8 of the spectral mass lies outside
// the central half-band |n| <= N/4: beyond that the half-step products alias
// and the velocity marginal identity degrades (the position marginal and the
// total mass remain exact).
WignerFunction wigner(const WaveFunction& psi, double eps = 1.0);

// |psi_hat(v_n)|^2 on the DFT velocity grid, n ascending from -N/2 to N/2-1
// per axis (N^d values, row major).  Independent of the Wigner construction;
// used as the oracle for the velocity marginal.
std::vector<double> momentum_density(const WaveFunction& psi);

// L2-continuity check for the Wigner transform.  For psi = psi1 + psi2 and a
// separable observable O(xi, v) = xi_part(|xi|) v_part(|v|), compares the
// pairings <O, W_psi> and <O, W_psi1> computed in the Fourier-position
// picture W_hat(xi, v) = conj(psi_hat(v - xi/2)) psi_hat(v + xi/2):
//
//   lhs = |<O, W_psi> - <O, W_psi1>|
//   rhs = 2 (integral_xi sup_v |O|) sqrt((||psi1||^2 + ||psi2||^2) ||psi2||^2)
//
// holds is lhs <= rhs.  The xi grid is xi_m = 2 m dv so that v +- xi/2 lands
// on the velocity grid.
struct WignerContinuityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;        // lhs / rhs (0 when rhs = 0)
    double norm1 = 0.0;        // ||psi1||^2
    double norm2 = 0.0;        // ||psi2||^2
    bool holds = false;
};

WignerContinuityReport wigner_continuity_check(const WaveFunction& psi1,
                                               const WaveFunction& psi2,
                                               const Observable& obs);

}  // namespace qdiff
