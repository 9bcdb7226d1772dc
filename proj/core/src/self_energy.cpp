#include "qdiff/self_energy.hpp"

#include <algorithm>
#include <cmath>

#include "qdiff/errors.hpp"
#include "qdiff/parallel.hpp"
#include "qdiff/rng.hpp"

namespace qdiff {

double PropagatorParams::eta_value() const {
    return eta > 0 ? eta : std::pow(lambda, 2.0 + kappa);
}

double PropagatorParams::zeta() const { return std::pow(lambda, -kappa - 3.0 * delta); }

bool PropagatorParams::eta_in_window() const {
    const double e = eta_value();
    return e >= std::pow(lambda, 2.0 + 4.0 * kappa) * (1 - 1e-12) &&
           e <= lambda * lambda * (1 + 1e-12);
}

// Surface measure of S^{d-1}.
static double sphere_area(int d) {
    return 2.0 * std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0);
}

double angular_S(double e, const RadialProfile& profile, int d) {
    if (e < 0) throw ConfigInvalid("angular_S needs e >= 0");
    const double r = std::sqrt(2.0 * e);
    if (d == 1) {
        // S^0 = two points: angle 0 and pi.
        return profile.squared(0.0) + profile.squared(2.0 * r);
    }
    // chord distance between unit vectors at polar angle th: sqrt(2-2cos th)
    const double ring = (d == 2) ? 2.0 : sphere_area(d - 1);
    const auto integrand = [&](double c) {
        const double chord = std::sqrt(std::max(0.0, 2.0 - 2.0 * c));
        const double w = (d == 3) ? 1.0 : std::pow(1.0 - c * c, (d - 3) / 2.0);
        return profile.squared(r * chord) * w;
    };
    // integrate over c = cos(th) in [-1, 1]; split near c=1 where the kernel peaks
    const QuadResult q = integrate_split(integrand, -1.0, 1.0,
                                         {0.0, 0.9, 0.99, 0.999}, 1e-11);
    return ring * q.value;
}

double angular_S_mc(double e, const RadialProfile& profile, int d, int n,
                    uint64_t seed) {
    RngStream rng(seed, 0);
    const double r = std::sqrt(2.0 * e);
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        const Vec phi = rng.sphere(d);
        Vec ref(d);
        ref[0] = 1.0;
        sum += profile.squared(r * norm(ref - phi));
    }
    return sphere_area(d) * sum / n;
}

double coarea_weight(double e, const RadialProfile& profile, int d) {
    return std::pow(2.0 * e, d / 2.0 - 1.0) * angular_S(e, profile, d);
}

double theta_im_closed(double alpha, const RadialProfile& profile, int d) {
    if (alpha <= 0) return 0.0;
    return -M_PI * coarea_weight(alpha, profile, d);
}

namespace {

// Reusable sampled version of g(e) = (2e)^{d/2-1} S(e): S is smooth but each
// evaluation costs an adaptive angular quadrature, so the Theta integrals
// read S from a dense Hermite-interpolated table instead.
class CoareaTable {
public:
    CoareaTable(const RadialProfile& profile, int d, double e_max)
        : d_(d), e_max_(e_max) {
        // Finite-difference slopes make the Hermite interpolant O(h^3), so the
        // linear section keeps a fixed spacing instead of a fixed count; 0.04
        // holds the interpolation error of S near 1e-7 however far e_max goes.
        const int n_log = 1024;
        const int n_lin = std::clamp(
            static_cast<int>(std::ceil((e_max_ - 1.0) / 0.04)), 1024, 20000);
        grid_.reserve(n_log + n_lin);
        for (int i = 0; i < n_log; ++i) {
            const double t = static_cast<double>(i) / (n_log - 1);
            grid_.push_back(e_lo_ * std::pow(1.0 / e_lo_, t));  // e_lo .. 1
        }
        for (int i = 1; i <= n_lin; ++i)
            grid_.push_back(1.0 + (e_max_ - 1.0) * i / n_lin);
        s_.resize(grid_.size());
        for (size_t i = 0; i < grid_.size(); ++i)
            s_[i] = angular_S(grid_[i], profile, d);
        slope_ = hermite_slopes(grid_, s_);
        s0_ = angular_S(0.0, profile, d);
    }

    double S(double e) const {
        if (e <= e_lo_) {
            // S is Lipschitz at 0; linear blend to the exact S(0).
            const double s_lo = s_.front();
            return s0_ + (s_lo - s0_) * (e / e_lo_);
        }
        if (e >= e_max_) return s_.back() * std::pow(e_max_ / e, (d_ - 1) / 2.0);
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), e);
        const size_t i = static_cast<size_t>(it - grid_.begin()) - 1;
        const double h = grid_[i + 1] - grid_[i];
        const double t = (e - grid_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * s_[i] + (t3 - 2 * t2 + t) * h * slope_[i] +
               (-2 * t3 + 3 * t2) * s_[i + 1] + (t3 - t2) * h * slope_[i + 1];
    }

    double g(double e) const {
        return std::pow(2.0 * e, d_ / 2.0 - 1.0) * S(e);
    }

    static std::vector<double> hermite_slopes(const std::vector<double>& x,
                                              const std::vector<double>& y) {
        const size_t n = x.size();
        std::vector<double> m(n);
        for (size_t i = 0; i < n; ++i) {
            if (i == 0)
                m[i] = (y[1] - y[0]) / (x[1] - x[0]);
            else if (i == n - 1)
                m[i] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
            else {
                const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
                // weighted three-point slope (Fritsch-Butland flavour)
                m[i] = (hr * (y[i] - y[i - 1]) / hl + hl * (y[i + 1] - y[i]) / hr) /
                       (hl + hr);
            }
        }
        return m;
    }

private:
    int d_;
    double e_lo_ = 1e-8;
    double e_max_;
    double s0_ = 0;
    std::vector<double> grid_, s_, slope_;
};

double profile_e_cut(const RadialProfile& profile) {
    // |Bhat(r)|^2 below ~1e-22 for r > 7*scale on the default profiles.
    const double r_cut = 7.0 * profile.decay_scale + 2.0;
    return 0.5 * r_cut * r_cut;
}

}  // namespace

SelfEnergyValue theta(double alpha, double epsilon, const RadialProfile& profile,
                      int d) {
    if (d < 3) throw HypothesisViolated("self-energy implemented for d >= 3");
    if (epsilon < 0) throw ConfigInvalid("epsilon must be >= 0");
    SelfEnergyValue out;
    out.alpha = alpha;
    out.epsilon = epsilon;

    const double e_cut = std::max(profile_e_cut(profile), 4.0 * std::fabs(alpha) + 1.0);
    CoareaTable tab(profile, d, e_cut);
    const auto g = [&](double e) { return tab.g(e); };

    if (epsilon == 0.0) {
        double re;
        if (alpha > 0) {
            re = principal_value_halfline(g, alpha, 1e-9);
            out.value = Cplx(re, theta_im_closed(alpha, profile, d));
        } else {
            // no singularity: alpha - e < 0 on the whole range
            const QuadResult body = integrate_split(
                [&](double e) { return g(e) / (alpha - e); }, 0.0, e_cut,
                {1e-4, 1e-2, 0.1, 1.0, 10.0}, 1e-10);
            const QuadResult tail = integrate_to_inf(
                [&](double e) { return g(e) / (alpha - e); }, e_cut, 1e-9);
            out.value = Cplx(body.value + tail.value, 0.0);
            out.re_error = body.error;
        }
        return out;
    }

    // eps > 0: Lorentzian-smoothed integrals, refined around e = alpha.
    std::vector<double> breaks = {1e-4, 1e-2, 0.1, 1.0, 10.0};
    if (alpha > 0) {
        for (double s : {1.0, 4.0, 16.0, 64.0, 256.0}) {
            breaks.push_back(alpha - s * epsilon);
            breaks.push_back(alpha + s * epsilon);
        }
        breaks.push_back(alpha);
    }
    const QuadResult re = integrate_split(
        [&](double e) {
            const double den = (alpha - e) * (alpha - e) + epsilon * epsilon;
            return g(e) * (alpha - e) / den;
        },
        0.0, e_cut, breaks, 1e-10);
    const QuadResult re_tail = integrate_to_inf(
        [&](double e) {
            const double den = (alpha - e) * (alpha - e) + epsilon * epsilon;
            return g(e) * (alpha - e) / den;
        },
        e_cut, 1e-9);
    const QuadResult im = integrate_split(
        [&](double e) {
            const double den = (alpha - e) * (alpha - e) + epsilon * epsilon;
            return -epsilon * g(e) / den;
        },
        0.0, e_cut, breaks, 1e-10);
    const QuadResult im_tail = integrate_to_inf(
        [&](double e) {
            const double den = (alpha - e) * (alpha - e) + epsilon * epsilon;
            return -epsilon * g(e) / den;
        },
        e_cut, 1e-9);
    out.value = Cplx(re.value + re_tail.value, im.value + im_tail.value);
    out.re_error = re.error + re_tail.error;
    return out;
}

// ---- DispersionTable -------------------------------------------------------

DispersionTable::DispersionTable(const PropagatorParams& params,
                                 const RadialProfile& profile, double e_max,
                                 int n_points, unsigned workers) {
    lam2_ = params.lambda * params.lambda;
    const double zeta = params.zeta();
    e_max_ = e_max > 0 ? e_max : std::max({8.0, 0.5 * zeta * zeta * 1.2, 2.0});
    const int n = std::max(n_points, 64);
    const int n_log = n / 2, n_lin = n - n_log;
    grid_.clear();
    for (int i = 0; i < n_log; ++i) {
        const double t = static_cast<double>(i) / (n_log - 1);
        grid_.push_back(e_min_ * std::pow(1.0 / e_min_, t));
    }
    for (int i = 1; i <= n_lin; ++i)
        grid_.push_back(1.0 + (e_max_ - 1.0) * i / n_lin);

    // One shared coarea table for all nodes (profile evaluations dominate).
    const double e_cut = std::max(profile_e_cut(profile), 4.0 * e_max_ + 1.0);
    CoareaTable gtab(profile, params.d, e_cut);
    const auto g = [&](double e) { return gtab.g(e); };

    val_.assign(grid_.size(), Cplx(0, 0));
    run_indexed_tasks(grid_.size(), workers, [&](size_t i) {
        const double a = grid_[i];
        const double re = principal_value_halfline(g, a, 1e-9);
        const double im = -M_PI * gtab.g(a);
        val_[i] = Cplx(re, im);
    });

    slope_.resize(grid_.size());
    const size_t n_sz = grid_.size();
    for (size_t i = 0; i < n_sz; ++i) {
        if (i == 0)
            slope_[i] = (val_[1] - val_[0]) / (grid_[1] - grid_[0]);
        else if (i == n_sz - 1)
            slope_[i] = (val_[n_sz - 1] - val_[n_sz - 2]) /
                        (grid_[n_sz - 1] - grid_[n_sz - 2]);
        else {
            const double hl = grid_[i] - grid_[i - 1], hr = grid_[i + 1] - grid_[i];
            slope_[i] = ((val_[i] - val_[i - 1]) * (hr / hl) +
                         (val_[i + 1] - val_[i]) * (hl / hr)) /
                        (hl + hr);
        }
    }
}

Cplx DispersionTable::Theta(double e) const {
    if (e > e_max_ * (1 + 1e-12))
        throw OutOfTable("dispersion table queried beyond its energy range");
    if (e <= grid_.front()) return val_.front();  // Theta is continuous at 0
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), e);
    size_t i = static_cast<size_t>(it - grid_.begin());
    if (i == 0) i = 1;
    if (i >= grid_.size()) i = grid_.size() - 1;
    --i;
    const double h = grid_[i + 1] - grid_[i];
    const double t = (e - grid_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * val_[i] + (t3 - 2 * t2 + t) * h * slope_[i] +
           (-2 * t3 + 3 * t2) * val_[i + 1] + (t3 - t2) * h * slope_[i + 1];
}

Dispersion Dispersion::make(const PropagatorParams& params,
                            const RadialProfile& profile, double e_max,
                            int n_points, unsigned workers) {
    Dispersion d;
    d.params = params;
    d.profile = profile;
    d.table = std::make_shared<DispersionTable>(params, profile, e_max, n_points,
                                                workers);
    return d;
}

}  // namespace qdiff
