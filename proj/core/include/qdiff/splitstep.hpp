#pragma once

// Strang split-step propagator for i d/dt psi = (-(2 pi)^{-2}/2 Laplacian + lambda V) psi
// on a periodic box, plus the Poisson bump potential it is driven by.
//
// With the e^{-2 pi i p.x} Fourier convention the kinetic symbol is
// e(p) = |p|^2 / 2 on momenta p = n/L, matching the dispersion used by the
// collision and ladder modules.  One step of size dt is
//
//   psi  <-  e^{-i lambda V dt/2} F^{-1} e^{-i e(p) dt} F e^{-i lambda V dt/2} psi,
//
// which is exactly unitary for every dt and second-order accurate in dt.
//
// The potential is a Poisson cloud of identical radial bumps with signed unit
// weights: V(x) = sum_g w_g B(x - y_g), with M ~ Poisson(L^d) centers uniform
// in the box, w_g = +-1 with equal probability, and default bump
// B(x) = (2 pi)^{d/2} exp(-2 pi^2 |x|^2), whose Fourier transform is the
// Gaussian collision profile e^{-|p|^2/2} shared with the scattering modules.

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "qdiff/vec.hpp"
#include "qdiff/wavefunction.hpp"

namespace qdiff {

struct PoissonPotential {
    int d = 1;
    double L = 0.0;                      // box edge; the box is [-L/2, L/2)^d
    std::vector<Vec> centers;            // M ~ Poisson(L^d) points
    std::vector<double> weights;         // signed unit weights (+1 or -1)
    std::function<double(double)> bump;  // radial position-space profile B(r)

    // Periodic evaluation (nearest-image distance per axis; the default bump
    // is negligible beyond r ~ 1, so one image suffices for L >= 4).
    double operator()(const Vec& x) const;
};

// Default bump profile for dimension d: B(r) = (2 pi)^{d/2} exp(-2 pi^2 r^2).
std::function<double(double)> gaussian_bump(int d);

// Draw the Poisson cloud: M ~ Poisson(L^d), uniform centers, signed unit
// weights.  Deterministic in (seed); the default bump is attached.
PoissonPotential sample_poisson_potential(int d, double L, std::uint64_t seed);

// V sampled on the N^d grid of a wave function with x0 = -L/2, h = L/N.
std::vector<double> potential_on_grid(const PoissonPotential& V, int N);

// Propagate psi0 over time t in steps of (approximately) dt: the step count
// is ceil(t/dt) and the actual step is t/nsteps.  The wave-function grid must
// tile the potential's box ([-L/2, L/2)^d with h = L/N).  Throws StepTooLarge
// when the phase advanced per step by the potential (lambda ||V||_inf dt) or
// by the kinetic bandwidth (d/(8 h^2) dt) exceeds 1.5 radians; beyond that
// the splitting is still unitary but no longer resolves the dynamics.
WaveFunction evolve_splitstep(const WaveFunction& psi0, const PoissonPotential& V,
                              double lambda, double t, double dt);

// Free propagator (lambda = 0), evaluated exactly in Fourier space in a
// single step; the oracle for the free-case check.
WaveFunction evolve_free(const WaveFunction& psi0, double t);

// (psi, |x|^2 psi) / ||psi||^2 with coordinates measured from the box center.
double mean_square_displacement(const WaveFunction& psi);

}  // namespace qdiff
