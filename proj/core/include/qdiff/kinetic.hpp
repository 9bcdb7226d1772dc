#pragma once

// Momentum-jump process on a fixed energy shell and its diffusive limit.
//
// A particle on the shell e(p) = e travels with velocity p/(2 pi) for an
// Exp(sigma0(e)) waiting time, then picks a new momentum on the same shell
// with angular density proportional to |Bhat(p' - p)|^2.  The direction
// process mixes exponentially; its velocity autocorrelation decays at rate
// sigma0 - sigma1, giving the closed-form diffusion constant
//
//   D_e = 2e / ((2 pi)^2 d (sigma0(e) - sigma1(e)))
//
// which the Monte Carlo paths must reproduce, and against which the position
// distribution at large times is tested (heat kernel variance and
// per-coordinate normality).

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qdiff/radial_profile.hpp"
#include "qdiff/vec.hpp"

namespace qdiff {

// Shell restriction of a radial function:
// [h](e) = (2e)^{d/2-1} \int_{S^{d-1}} h(sqrt(2e) phi) dphi; for radial h the
// sphere integral is |S^{d-1}| h(sqrt(2e)).
double coarea_bracket(const std::function<double(double)>& h_radial, double e,
                      int d);

double sphere_surface(int d);  // |S^{d-1}|

struct SigmaMoments {
    double sigma0 = 0;  // total collision rate on the shell
    double sigma1 = 0;  // first angular moment (rate times mean cosine)
};

// sigma_m(e) = 2 pi (2e)^{d/2-1} int |Bhat(sqrt(2e)(phi - phi'))|^2 (phi.phi')^m dphi.
SigmaMoments sigma_moments(double e, const RadialProfile& profile, int d);

struct EnergyShellState {
    double e = 0;
    Vec direction;  // unit vector
    Vec momentum() const;                  // sqrt(2e) * direction
    Vec velocity() const;                  // momentum / (2 pi)
};

struct Trajectory {
    double e = 0;
    int d = 3;
    uint64_t seed = 0;
    double t_max = 0;
    std::vector<double> jump_times;  // strictly increasing, in (0, t_max)
    std::vector<Vec> directions;     // per segment; size = jump_times.size() + 1

    Vec direction_at(double t) const;
    // X(t) = (1/2pi) int_0^t p(s) ds, piecewise linear.
    Vec position_at(double t) const;
};

// Simulate one path.  Waiting times are Exp(sigma0(e)); post-jump directions
// are drawn by rejection from the uniform sphere with acceptance
// |Bhat(sqrt(2e)|phi - phi'|)|^2 / max.  Deterministic in (seed).
Trajectory sample_jump_chain(double e, double t_max, uint64_t seed,
                             const RadialProfile& profile, int d);

struct AutocorrCurve {
    std::vector<double> lag;
    std::vector<double> value;   // E[p(t).p(0)], value at lag 0 equals 2e
    std::vector<double> sterr;   // standard error per lag
    double fitted_rate = 0;      // least-squares slope of -log(value/2e)
    double predicted_rate = 0;   // sigma0 - sigma1
    double fit_residual = 0;     // max relative deviation from the prediction
};

AutocorrCurve autocorrelation(double e, const std::vector<double>& lags,
                              int n_traj, uint64_t seed,
                              const RadialProfile& profile, int d,
                              unsigned workers = 1);

enum class DiffusionMode { ClosedForm, MonteCarlo };

struct ValueWithError {
    double value = 0;
    double error = 0;  // one standard error (0 for closed form)
};

ValueWithError diffusion_constant(double e, const RadialProfile& profile, int d,
                                  DiffusionMode mode, int n_traj = 100000,
                                  uint64_t seed = 1, unsigned workers = 1);

struct HeatCompareReport {
    double e = 0, T = 0;
    int d = 3, n_traj = 0;
    double D = 0;                // closed-form diffusion constant
    double var_expected = 0;     // 2 D T per coordinate
    double var_per_coord = 0;    // empirical, averaged over coordinates
    double var_rel_err = 0;
    double msd = 0, msd_expected = 0;
    double ks_stat_max = 0;      // worst coordinate vs N(0, 2DT)
    double ks_p_min = 0;
    double mean_jumps = 0;
};

HeatCompareReport heat_compare(double e, double T, int n_traj, uint64_t seed,
                               const RadialProfile& profile, int d,
                               unsigned workers = 1);

std::string to_json(const HeatCompareReport& r);

// Asymptotic Kolmogorov-Smirnov p-value for statistic `stat` on n samples.
double ks_p_value(double stat, int n);

// KS statistic of samples against a supplied CDF.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

}  // namespace qdiff
