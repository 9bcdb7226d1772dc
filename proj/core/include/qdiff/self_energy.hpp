#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "qdiff/quadrature.hpp"
#include "qdiff/radial_profile.hpp"
#include "qdiff/vec.hpp"

namespace qdiff {

// Regularized point singularity |||q||| = eta + min(|q|, 1).  Not a norm,
// but it satisfies the triangle inequality.
inline double trinorm(double eta, double qnorm) {
    return eta + std::min(qnorm, 1.0);
}
inline double trinorm(double eta, const Vec& q) { return trinorm(eta, norm(q)); }

// Scaling parameters shared by the propagator estimates.
struct PropagatorParams {
    int d = 3;
    double lambda = 0.3;
    double kappa = 0.05;
    double delta = 0.01;
    double eta = 0.0;  // 0 -> defaulted to lambda^{2+kappa}

    double eta_value() const;
    double zeta() const;    // momentum cutoff lambda^{-kappa-3delta}
    // Lemma window lambda^{2+4kappa} <= eta <= lambda^2.
    bool eta_in_window() const;
};

// Angular surface factor S(e) = int_{S^{d-1}} |Bhat(sqrt(2e)(phi_r - phi))|^2 dphi.
double angular_S(double e, const RadialProfile& profile, int d);

// Same by plain Monte Carlo on the sphere (oracle for tests).
double angular_S_mc(double e, const RadialProfile& profile, int d, int n,
                    uint64_t seed);

// Co-area weight g(e) = (2e)^{d/2-1} S(e).
double coarea_weight(double e, const RadialProfile& profile, int d);

struct SelfEnergyValue {
    double alpha = 0;
    Cplx value{0, 0};
    double epsilon = 0;   // regularization used; 0 means the boundary limit
    double re_error = 0;  // quadrature error estimate of the real part
};

// Theta_eps(alpha) = int_0^inf g(e)/(alpha - e + i eps) de for eps > 0;
// the boundary value eps = 0 uses the principal value for the real part and
// the closed form -pi g(alpha) (alpha > 0) for the imaginary part.
SelfEnergyValue theta(double alpha, double epsilon, const RadialProfile& profile,
                      int d);

// Closed-form imaginary part of the boundary value: -pi (2a)^{d/2-1} S(a).
double theta_im_closed(double alpha, const RadialProfile& profile, int d);

// Renormalized dispersion omega(p) = e(p) + lambda^2 Theta(e(p)) tabulated
// over an energy grid: logarithmic below e = 1, linear above, cubic
// (monotone Hermite) interpolation in between.
class DispersionTable {
public:
    DispersionTable(const PropagatorParams& params, const RadialProfile& profile,
                    double e_max = 0.0, int n_points = 2048, unsigned workers = 1);

    Cplx Theta(double e) const;          // interpolated boundary value
    Cplx omega_of_energy(double e) const { return Cplx(e, 0) + lam2_ * Theta(e); }
    Cplx omega_r(double r) const { return omega_of_energy(0.5 * r * r); }
    Cplx omega(const Vec& p) const { return omega_of_energy(kinetic_energy(p)); }

    double e_max() const { return e_max_; }
    double e_min() const { return e_min_; }
    int size() const { return static_cast<int>(grid_.size()); }
    const std::vector<double>& grid() const { return grid_; }
    Cplx node_value(int i) const { return val_[static_cast<size_t>(i)]; }

private:
    double e_min_ = 1e-6, e_max_ = 0;
    double lam2_ = 0;
    std::vector<double> grid_;   // increasing energies
    std::vector<Cplx> val_;      // Theta at the nodes
    std::vector<Cplx> slope_;    // Hermite slopes
};

// A dispersion table bundled with its parameters (the unit every consumer
// of omega(p) passes around).
struct Dispersion {
    PropagatorParams params;
    RadialProfile profile;
    std::shared_ptr<const DispersionTable> table;

    static Dispersion make(const PropagatorParams& params,
                           const RadialProfile& profile, double e_max = 0.0,
                           int n_points = 2048, unsigned workers = 1);
    Cplx omega(const Vec& p) const { return table->omega(p); }
    Cplx omega_r(double r) const { return table->omega_r(r); }
};

}  // namespace qdiff
