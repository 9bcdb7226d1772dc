#include "qdiff/ladder.hpp"

#include <cmath>
#include <vector>

#include "qdiff/errors.hpp"
#include "qdiff/k_identity.hpp"
#include "qdiff/parallel.hpp"
#include "qdiff/quadrature.hpp"

namespace qdiff {

namespace {

using cd = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;

struct Grid1 {
    std::vector<double> x, w;
};

Grid1 mapped_radial(int n, double r_max) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    Grid1 g;
    g.x.resize(static_cast<size_t>(n));
    g.w.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        g.x[static_cast<size_t>(i)] = 0.5 * r_max * (x[static_cast<size_t>(i)] + 1.0);
        g.w[static_cast<size_t>(i)] = 0.5 * r_max * w[static_cast<size_t>(i)];
    }
    return g;
}

Grid1 cosine_nodes(int n) {
    Grid1 g;
    gauss_legendre(n, g.x, g.w);
    return g;
}

}  // namespace

std::complex<double> ladder_value(double t, int k, const Dispersion& disp,
                                  const RadialProfile& psi0_hat,
                                  const LadderOptions& opts) {
    if (k < 0) throw HypothesisViolated("ladder_value: k must be >= 0");
    if (k >= 3)
        throw BudgetExceeded("ladder_value: quadrature dimension too large for k >= 3");
    const int d = disp.params.d;
    if (d != 3)
        throw HypothesisViolated("ladder_value: spherical reduction implemented for d = 3");

    const double lam2 = disp.params.lambda * disp.params.lambda;
    const double sphere_full = 4.0 * kPi;  // S^2 area
    const double ring = 2.0 * kPi;         // azimuthal circle per relative angle

    const Grid1 rad = mapped_radial(opts.radial_nodes, opts.r_max);
    const Grid1 ang = cosine_nodes(opts.angular_nodes);
    const size_t nr = rad.x.size();
    const size_t nc = ang.x.size();

    // Renormalized dispersion at the radial nodes (shared by every slot).
    std::vector<cd> omega(nr);
    for (size_t i = 0; i < nr; ++i) omega[i] = disp.omega_r(rad.x[i]);

    const auto& bhat = disp.profile;

    if (k == 0) {
        double sum = 0.0;
        for (size_t i = 0; i < nr; ++i) {
            const double r = rad.x[i];
            const double psi2 = psi0_hat.f(r) * psi0_hat.f(r);
            // |e^{-it omega}|^2 = e^{2 t Im(lambda^2 Theta)}
            const double damp = std::exp(2.0 * t * omega[i].imag());
            sum += rad.w[i] * r * r * psi2 * damp;
        }
        return cd{sphere_full * sum, 0.0};
    }

    if (k == 1) {
        // V = lam^2 S2 S1 int r1^2 r2^2 psi0^2(r1) B^2(q) |K2|^2 dr1 dr2 dc
        std::vector<double> partial(nr, 0.0);
        run_indexed_tasks(nr, opts.workers, [&](size_t i1) {
            const double r1 = rad.x[i1];
            const double psi2 = psi0_hat.f(r1) * psi0_hat.f(r1);
            if (psi2 == 0.0) return;
            double acc = 0.0;
            for (size_t i2 = 0; i2 < nr; ++i2) {
                const double r2 = rad.x[i2];
                const cd K = simplex_propagator({omega[i1], omega[i2]}, t);
                const double kk = std::norm(K);
                double angsum = 0.0;
                for (size_t ic = 0; ic < nc; ++ic) {
                    const double c = ang.x[ic];
                    const double q2 = r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * c;
                    const double b = bhat.f(std::sqrt(std::max(q2, 0.0)));
                    angsum += ang.w[ic] * b * b;
                }
                acc += rad.w[i2] * r2 * r2 * kk * angsum;
            }
            partial[i1] = rad.w[i1] * r1 * r1 * psi2 * acc;
        });
        double sum = 0.0;
        for (double v : partial) sum += v;
        return cd{lam2 * sphere_full * ring * sum, 0.0};
    }

    // k == 2:
    // V = lam^4 S2 S1^2 int r1^2 r2^2 r3^2 psi0^2(r1) B^2(q12) B^2(q23)
    //     |K3|^2 dr1 dr2 dr3 dc12 dc23
    // Pre-tabulate the angular B-factors: A[i][j] = int B^2(q(ri,rj,c)) dc.
    std::vector<double> bfac(nr * nr, 0.0);
    for (size_t i = 0; i < nr; ++i)
        for (size_t j = 0; j < nr; ++j) {
            double s = 0.0;
            for (size_t ic = 0; ic < nc; ++ic) {
                const double c = ang.x[ic];
                const double q2 =
                    rad.x[i] * rad.x[i] + rad.x[j] * rad.x[j] - 2.0 * rad.x[i] * rad.x[j] * c;
                const double b = bhat.f(std::sqrt(std::max(q2, 0.0)));
                s += ang.w[ic] * b * b;
            }
            bfac[i * nr + j] = s;
        }

    std::vector<double> partial(nr, 0.0);
    run_indexed_tasks(nr, opts.workers, [&](size_t i1) {
        const double r1 = rad.x[i1];
        const double psi2 = psi0_hat.f(r1) * psi0_hat.f(r1);
        if (psi2 == 0.0) return;
        double acc = 0.0;
        for (size_t i2 = 0; i2 < nr; ++i2) {
            const double w12 = bfac[i1 * nr + i2] * rad.w[i2] * rad.x[i2] * rad.x[i2];
            if (w12 == 0.0) continue;
            for (size_t i3 = 0; i3 < nr; ++i3) {
                const cd K = simplex_propagator({omega[i1], omega[i2], omega[i3]}, t);
                acc += w12 * bfac[i2 * nr + i3] * rad.w[i3] * rad.x[i3] * rad.x[i3] *
                       std::norm(K);
            }
        }
        partial[i1] = rad.w[i1] * r1 * r1 * psi2 * acc;
    });
    double sum = 0.0;
    for (double v : partial) sum += v;
    return cd{lam2 * lam2 * sphere_full * ring * ring * sum, 0.0};
}

std::complex<double> free_term_W(double t, double eps, const Dispersion& disp,
                                 const RadialProfile& psi0_hat,
                                 const Observable& obs,
                                 const LadderOptions& opts) {
    const int d = disp.params.d;
    if (d != 3)
        throw HypothesisViolated("free_term_W: spherical reduction implemented for d = 3");

    const double sphere_full = 4.0 * kPi;
    const double ring = 2.0 * kPi;

    const Grid1 rad = mapped_radial(opts.radial_nodes, opts.r_max);
    const Grid1 ang = cosine_nodes(opts.angular_nodes);
    const size_t nr = rad.x.size();
    const size_t nc = ang.x.size();

    std::vector<cd> partial(nr, cd{0.0, 0.0});
    run_indexed_tasks(nr, opts.workers, [&](size_t iv) {
        const double rv = rad.x[iv];
        const double ov = obs.v_part(rv);
        if (ov == 0.0) {
            partial[iv] = cd{0.0, 0.0};
            return;
        }
        const double damp = std::exp(2.0 * t * disp.omega_r(rv).imag());
        cd acc{0.0, 0.0};
        for (size_t ix = 0; ix < nr; ++ix) {
            const double rx = rad.x[ix];
            const double ox = obs.xi_part(rx);
            if (ox == 0.0) continue;
            cd angsum{0.0, 0.0};
            for (size_t ic = 0; ic < nc; ++ic) {
                const double c = ang.x[ic];
                // |v +- eps xi / 2|
                const double cross = eps * rv * rx * c;
                const double quart = 0.25 * eps * eps * rx * rx;
                const double rp = std::sqrt(std::max(rv * rv + cross + quart, 0.0));
                const double rm = std::sqrt(std::max(rv * rv - cross + quart, 0.0));
                const double w0 = psi0_hat.f(rp) * psi0_hat.f(rm);
                const cd phase = std::exp(cd{0.0, t * eps * rv * rx * c});
                angsum += ang.w[ic] * phase * w0;
            }
            acc += rad.w[ix] * rx * rx * ox * angsum;
        }
        partial[iv] = rad.w[iv] * rv * rv * ov * damp * acc;
    });
    cd sum{0.0, 0.0};
    for (const cd& v : partial) sum += v;
    return sphere_full * ring * sum;
}

}  // namespace qdiff
