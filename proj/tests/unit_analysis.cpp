// Unit tests for the analytic layer: quadrature helpers, the simplex
// propagator and its contour identity, the self-energy and dispersion table,
// the calibrated propagator estimates, and the ladder / free-term integrals.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <complex>
#include <vector>

#include "qdiff/errors.hpp"
#include "qdiff/estimates.hpp"
#include "qdiff/k_identity.hpp"
#include "qdiff/ladder.hpp"
#include "qdiff/quadrature.hpp"
#include "qdiff/self_energy.hpp"

using namespace qdiff;
using std::complex;

namespace {

// Shared dispersion tables (built once; the self-energy quadrature per node
// dominates the cost).
const Dispersion& main_disp() {
    static const Dispersion d = Dispersion::make(
        PropagatorParams{}, RadialProfile::gaussian(), 80.0, 4096, 1);
    return d;
}

// Nearly free dispersion: lambda so small that omega(p) = e(p) to round-off,
// used to isolate the oscillatory factor of the free Wigner term.  e_max
// covers the default ladder radial cutoff r_max = 8 (e = 32).
const Dispersion& free_disp() {
    PropagatorParams p;
    p.lambda = 1e-8;
    static const Dispersion d =
        Dispersion::make(p, RadialProfile::gaussian(), 40.0, 512, 1);
    return d;
}

// Direct simplex quadrature for n = 2 and n = 3 (independent oracle).
Cplx simplex_direct2(Cplx w1, Cplx w2, double t) {
    const Cplx mi(0.0, -1.0);
    return integrate_c(
               [&](double s) {
                   return std::exp(mi * (w1 * s + w2 * (t - s)));
               },
               0.0, t, 1e-12)
        .value;
}

Cplx simplex_direct3(Cplx w1, Cplx w2, Cplx w3, double t) {
    const Cplx mi(0.0, -1.0);
    return integrate_c(
               [&](double s1) {
                   return std::exp(mi * w1 * s1) *
                          integrate_c(
                              [&](double s2) {
                                  return std::exp(mi * (w2 * s2 +
                                                        w3 * (t - s1 - s2)));
                              },
                              0.0, t - s1, 1e-12)
                              .value;
               },
               0.0, t, 1e-10)
        .value;
}

// Closed-form angular factor of the Gaussian form factor in d = 3:
// S(e) = 2 pi (1 - exp(-8e)) / (4e).
double gaussian_S3(double e) {
    if (e < 1e-12) return 4.0 * M_PI;
    return 2.0 * M_PI * (1.0 - std::exp(-8.0 * e)) / (4.0 * e);
}

}  // namespace

TEST_CASE("quadrature basics") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0).value ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(integrate_to_inf([](double x) { return std::exp(-x); }, 0.0).value ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(integrate_to_inf([](double x) { return 1.0 / (x * x); }, 1.0).value ==
          doctest::Approx(1.0).epsilon(1e-9));

    // Complex integrand: int_0^1 e^{ix} dx = sin(1) + i(1 - cos(1)).
    const Cplx z =
        integrate_c([](double x) { return std::exp(Cplx(0.0, x)); }, 0.0, 1.0)
            .value;
    CHECK(z.real() == doctest::Approx(std::sin(1.0)).epsilon(1e-12));
    CHECK(z.imag() == doctest::Approx(1.0 - std::cos(1.0)).epsilon(1e-12));

    // Breakpoint-assisted integration across a kink.
    const double kink =
        integrate_split([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0,
                        {0.3})
            .value;
    CHECK(kink == doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-12));

    // Gauss-Legendre: n nodes are exact through degree 2n - 1.
    std::vector<double> x, w;
    gauss_legendre(6, x, w);
    double s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], 10);
    CHECK(s == doctest::Approx(2.0 / 11.0).epsilon(1e-13));
}

TEST_CASE("principal value against the exponential-integral closed form") {
    // PV int_0^inf e^{-e} / (alpha - e) de = e^{-alpha} Ei(alpha).
    for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
        const double pv = principal_value_halfline(
            [](double e) { return std::exp(-e); }, alpha);
        const double exact = std::exp(-alpha) * boost::math::expint(alpha);
        CHECK(pv == doctest::Approx(exact).epsilon(1e-8));
    }
}

TEST_CASE("simplex propagator closed forms") {
    const Cplx mi(0.0, -1.0);
    SUBCASE("single node") {
        const Cplx w(1.3, -0.2);
        const Cplx k = simplex_propagator({w}, 2.0);
        CHECK(std::abs(k - std::exp(mi * w * 2.0)) < 1e-14);
    }
    SUBCASE("repeated nodes integrate the bare simplex volume") {
        const double t = 1.7, a = 0.9;
        const Cplx k2 = simplex_propagator({Cplx(a, 0), Cplx(a, 0)}, t);
        CHECK(std::abs(k2 - t * std::exp(mi * a * t)) < 1e-12);
        const Cplx k3 =
            simplex_propagator({Cplx(a, 0), Cplx(a, 0), Cplx(a, 0)}, t);
        CHECK(std::abs(k3 - 0.5 * t * t * std::exp(mi * a * t)) < 1e-12);
    }
    SUBCASE("direct quadrature oracle, n = 2") {
        const Cplx w1(0.4, -0.05), w2(-1.1, -0.3);
        for (double t : {0.5, 3.0, 12.0}) {
            const Cplx k = simplex_propagator({w1, w2}, t);
            CHECK(std::abs(k - simplex_direct2(w1, w2, t)) < 1e-9);
        }
    }
    SUBCASE("direct quadrature oracle, n = 3") {
        const Cplx w1(0.8, 0.0), w2(-0.6, -0.1), w3(2.2, -0.02);
        for (double t : {0.7, 4.0}) {
            const Cplx k = simplex_propagator({w1, w2, w3}, t);
            CHECK(std::abs(k - simplex_direct3(w1, w2, w3, t)) < 1e-7);
        }
    }
    SUBCASE("near-confluent nodes stay finite and continuous") {
        const double t = 5.0;
        const Cplx a(1.0, -0.1);
        const Cplx base = simplex_propagator({a, a, Cplx(2.0, 0.0)}, t);
        const Cplx near =
            simplex_propagator({a, a + Cplx(1e-11, 0), Cplx(2.0, 0.0)}, t);
        CHECK(std::abs(base - near) < 1e-6 * (1.0 + std::abs(base)));
    }
    SUBCASE("node budget") {
        std::vector<Cplx> w(65, Cplx(0.0, 0.0));
        CHECK_THROWS_AS(divided_difference_exp(w, 1.0), BudgetExceeded);
    }
}

TEST_CASE("contour identity") {
    SUBCASE("well separated real frequencies") {
        const std::vector<double> w = {-1.5, 0.3, 2.0};
        for (double t : {1.0, 5.0})
            for (double eta : {1e-2, 1e-3})
                CHECK(k_identity_check(w, t, eta) < 1e-6);
    }
    SUBCASE("complex frequencies in the lower half plane") {
        const std::vector<Cplx> w = {Cplx(0.8, -0.02), Cplx(-0.4, -0.25),
                                     Cplx(1.9, 0.0), Cplx(0.81, -0.02)};
        for (double t : {1.0, 5.0}) CHECK(k_identity_check(w, t, 1e-2) < 1e-6);
    }
    SUBCASE("hypotheses are enforced") {
        const std::vector<Cplx> up = {Cplx(0.0, 0.1)};
        CHECK_THROWS_AS(simplex_propagator_contour(up, 1.0, 1e-2),
                        HypothesisViolated);
        const std::vector<Cplx> ok = {Cplx(0.0, -0.1)};
        CHECK_THROWS_AS(simplex_propagator_contour(ok, -1.0, 1e-2),
                        HypothesisViolated);
        CHECK_THROWS_AS(simplex_propagator_contour(ok, 1.0, 0.0),
                        HypothesisViolated);
    }
}

TEST_CASE("angular factor and co-area weight") {
    const RadialProfile g = RadialProfile::gaussian();
    SUBCASE("gaussian closed form in d = 3") {
        for (double e : {0.05, 0.25, 1.0, 4.0, 20.0})
            CHECK(angular_S(e, g, 3) ==
                  doctest::Approx(gaussian_S3(e)).epsilon(1e-9));
    }
    SUBCASE("constant profile integrates the sphere surface") {
        const RadialProfile c = RadialProfile::constant(0.7);
        CHECK(angular_S(3.0, c, 3) ==
              doctest::Approx(0.49 * 4.0 * M_PI).epsilon(1e-10));
        CHECK(angular_S(3.0, c, 4) ==
              doctest::Approx(0.49 * 2.0 * M_PI * M_PI).epsilon(1e-10));
    }
    SUBCASE("Monte Carlo oracle") {
        for (double e : {0.25, 1.0, 4.0}) {
            const double mc = angular_S_mc(e, g, 3, 40000, 11);
            CHECK(std::abs(mc - gaussian_S3(e)) < 0.05 * gaussian_S3(e));
        }
    }
    SUBCASE("co-area weight definition") {
        const double e = 1.7;
        CHECK(coarea_weight(e, g, 3) ==
              doctest::Approx(std::sqrt(2.0 * e) * angular_S(e, g, 3)));
    }
}

TEST_CASE("self-energy boundary value") {
    const RadialProfile g = RadialProfile::gaussian();
    SUBCASE("imaginary part closed form") {
        for (double a : {0.3, 1.0, 2.5}) {
            CHECK(theta_im_closed(a, g, 3) ==
                  doctest::Approx(-M_PI * std::sqrt(2.0 * a) * gaussian_S3(a))
                      .epsilon(1e-9));
            const SelfEnergyValue v = theta(a, 0.0, g, 3);
            CHECK(v.value.imag() ==
                  doctest::Approx(theta_im_closed(a, g, 3)).epsilon(1e-12));
        }
    }
    SUBCASE("regularized values converge to the boundary value") {
        const double a = 1.2;
        const SelfEnergyValue v0 = theta(a, 0.0, g, 3);
        const SelfEnergyValue v3 = theta(a, 1e-3, g, 3);
        const SelfEnergyValue v2 = theta(a, 1e-2, g, 3);
        CHECK(std::abs(v3.value.imag() - v0.value.imag()) <
              1e-3 * std::abs(v0.value.imag()));
        CHECK(std::abs(v3.value - v0.value) < std::abs(v2.value - v0.value));
        // The smoothing error of the real part is first order in eps:
        // Re Theta_eps - Re Theta_0 = pi g'(alpha) eps + O(eps^2 log eps),
        // with g the co-area density (pair the Lorentzian-minus-PV kernel
        // around the shell).  Check the measured deviation against that law.
        const double h = 1e-4;
        const double gp =
            (coarea_weight(a + h, g, 3) - coarea_weight(a - h, g, 3)) / (2 * h);
        const double predicted = M_PI * gp * 1e-3;
        CHECK(std::abs((v3.value.real() - v0.value.real()) - predicted) <
              0.25 * std::abs(predicted));
    }
}

TEST_CASE("dispersion table") {
    const Dispersion& D = main_disp();
    const RadialProfile g = RadialProfile::gaussian();
    SUBCASE("interpolation matches direct evaluation") {
        for (double e : {1.3e-4, 0.011, 0.37, 0.93, 1.08, 2.71, 9.4, 33.0, 71.0}) {
            const Cplx direct = theta(e, 0.0, g, 3).value;
            const Cplx interp = D.table->Theta(e);
            CHECK(std::abs(interp - direct) < 3e-6 * (1.0 + std::abs(direct)));
        }
    }
    SUBCASE("imaginary part is nonpositive and omega is consistent") {
        const double lam2 = D.params.lambda * D.params.lambda;
        for (double r : {0.1, 0.5, 1.0, 3.0, 8.0}) {
            const double e = 0.5 * r * r;
            const Cplx om = D.omega_r(r);
            CHECK(D.table->omega_of_energy(e) == om);
            CHECK(om.imag() <= 0.0);
            // omega = e + lambda^2 Theta(e) by definition; the shift is O(1)
            // at lambda = 0.3 near e = 0, so closeness to the kinetic energy
            // is only meaningful once e dominates lambda^2 |Theta|.
            CHECK(om.real() ==
                  doctest::Approx(e + lam2 * D.table->Theta(e).real())
                      .epsilon(1e-12));
            if (e >= 4.0) CHECK(om.real() == doctest::Approx(e).epsilon(0.05));
        }
    }
    SUBCASE("out-of-range queries throw") {
        CHECK_THROWS_AS(D.table->Theta(1e4), OutOfTable);
    }
    SUBCASE("square-root modulus of continuity is stable under refinement") {
        auto max_quotient = [&](int n) {
            double worst = 0;
            for (int i = 0; i < n; ++i) {
                const double a = 0.02 + (5.0 - 0.02) * i / n;
                const double b = a + (5.0 - 0.02) / n;
                const double q = std::abs(D.table->Theta(b) - D.table->Theta(a)) /
                                 std::sqrt(b - a);
                worst = std::max(worst, q);
            }
            return worst;
        };
        const double coarse = max_quotient(40);
        const double fine = max_quotient(80);
        CHECK(coarse > 0.0);
        CHECK(fine <= 2.0 * coarse);
    }
}

TEST_CASE("propagator estimate calibration") {
    const Dispersion& D = main_disp();
    SUBCASE("log estimate") {
        const Lemma33Report r = lemma33_check(D, Lemma33Case::LogEst);
        CHECK(r.max_ratio > 0.0);
        CHECK(r.stable);
    }
    SUBCASE("interpolation exponents") {
        const Lemma33Report r2 = lemma33_check(D, Lemma33Case::TwoAInt, 0.5);
        CHECK(r2.max_ratio > 0.0);
        CHECK(r2.stable);
        const Lemma33Report r3 = lemma33_check(D, Lemma33Case::ThreeAInt, 0.5);
        CHECK(r3.max_ratio > 0.0);
        CHECK(r3.stable);
    }
    SUBCASE("ladder gain") {
        const Lemma33Report r = lemma33_check(D, Lemma33Case::LadderInt);
        CHECK(r.max_ratio > 0.0);
        CHECK(r.stable);
    }
    SUBCASE("window violation is rejected") {
        PropagatorParams bad;
        bad.eta = 2.0 * bad.lambda * bad.lambda;  // above the upper edge
        const Dispersion Dbad =
            Dispersion::make(bad, RadialProfile::gaussian(), 4.0, 64, 1);
        CHECK_THROWS_AS(lemma33_check(Dbad, Lemma33Case::LogEst),
                        HypothesisViolated);
    }
}

TEST_CASE("appendix integrals") {
    PropagatorParams p;  // eta = lambda^{2+kappa}
    Vec q(0.0, 0.0, 0.45), r(0.3, 0.2, 0.0);
    const AppendixReport rep = appendix_integrals(q, r, p);
    CHECK(rep.I1 > 0.0);
    CHECK(rep.I2 > 0.0);
    CHECK(rep.J > 0.0);
    CHECK(rep.I2 > rep.I1);  // the extra 1/|||p - r||| can only increase it
    CHECK(rep.ratio1 > 0.0);
    CHECK(rep.ratio2 > 0.0);
    CHECK(rep.ratioJ > 0.0);
    CHECK(rep.stable);

    // Smaller eta strengthens every singularity.
    PropagatorParams tighter = p;
    tighter.eta = 1e-4;
    const AppendixReport rep2 = appendix_integrals(q, r, tighter);
    CHECK(rep2.I1 > rep.I1);
    CHECK(rep2.I2 > rep.I2);
    CHECK(rep2.J > rep.J);
    // I1 grows like |log eta|^2: bounded by the shape ratio staying O(1).
    CHECK(rep2.ratio1 < 10.0 * rep.ratio1 + 10.0);
}

TEST_CASE("weighted sup norm") {
    // max_r (1 + r^2)^3 exp(-r^2/2) = 216 e^{-5/2} at r^2 = 5.
    const double n = weighted_sup_norm(RadialProfile::gaussian(), 3);
    CHECK(n == doctest::Approx(216.0 * std::exp(-2.5)).epsilon(1e-2));
}

TEST_CASE("ladder values") {
    const Dispersion& D = main_disp();
    const RadialProfile psi0 = RadialProfile::initial_state(3);
    SUBCASE("zero collisions, zero time: exactly the state norm") {
        const Cplx v = ladder_value(0.0, 0, D, psi0);
        CHECK(std::abs(v - Cplx(1.0, 0.0)) < 1e-8);
    }
    SUBCASE("zero collisions, positive time: damped mass") {
        const Cplx v = ladder_value(2.0, 0, D, psi0);
        CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(v.real() > 0.0);
        CHECK(v.real() < 1.0);
        // Independent adaptive quadrature of the same radial integrand,
        // exp(2 t Im omega(r)) at t = 2; psi0^2 = e^{-2r^2} is below 1e-125
        // by r = 12, which also keeps omega_r inside the tabulated range.
        const double direct =
            integrate(
                [&](double r) {
                    return 4.0 * M_PI * r * r * psi0.squared(r) *
                           std::exp(4.0 * D.omega_r(r).imag());
                },
                0.0, 12.0, 1e-10)
                .value;
        CHECK(v.real() == doctest::Approx(direct).epsilon(1e-6));
    }
    SUBCASE("one collision at time zero vanishes") {
        const Cplx v = ladder_value(0.0, 1, D, psi0);
        CHECK(std::abs(v) < 1e-12);
    }
    SUBCASE("one collision: real, nonnegative, below unit mass") {
        const Cplx v = ladder_value(1.0, 1, D, psi0);
        CHECK(std::abs(v.imag()) < 1e-10 * (1.0 + std::abs(v.real())));
        CHECK(v.real() >= 0.0);
        CHECK(v.real() < 1.0);
    }
    SUBCASE("budget and dimension guards") {
        CHECK_THROWS_AS(ladder_value(1.0, 3, D, psi0), BudgetExceeded);
        PropagatorParams p2;
        p2.d = 2;
        Dispersion D2 = D;
        D2.params = p2;
        CHECK_THROWS_AS(ladder_value(1.0, 0, D2, psi0), HypothesisViolated);
    }
}

TEST_CASE("free Wigner term") {
    const RadialProfile psi0 = RadialProfile::initial_state(3);
    Observable obs;
    obs.xi_part = [](double x) { return std::exp(-x * x); };
    obs.v_part = [](double) { return 1.0; };

    SUBCASE("time zero: gaussian pairing closed form") {
        // <O, W0^eps> = (pi / (1 + eps^2/2))^{3/2} for this observable.
        for (double eps : {0.2, 0.5, 1.0}) {
            const Cplx w = free_term_W(0.0, eps, main_disp(), psi0, obs);
            const double exact = std::pow(M_PI / (1.0 + 0.5 * eps * eps), 1.5);
            CHECK(w.real() == doctest::Approx(exact).epsilon(1e-6));
            CHECK(std::abs(w.imag()) < 1e-8);
        }
    }
    SUBCASE("free streaming: oscillatory factor closed form") {
        // With omega = e the damping disappears and
        // W(t) = (pi / (1 + eps^2/2 + t^2 eps^2 / 8))^{3/2}.
        const double eps = 0.4;
        for (double t : {0.8, 2.5}) {
            const Cplx w = free_term_W(t, eps, free_disp(), psi0, obs);
            const double exact = std::pow(
                M_PI / (1.0 + 0.5 * eps * eps + 0.125 * t * t * eps * eps),
                1.5);
            CHECK(w.real() == doctest::Approx(exact).epsilon(1e-5));
            CHECK(std::abs(w.imag()) < 1e-7);
        }
    }
    SUBCASE("collisional damping shrinks the free term") {
        const double eps = 0.4;
        const Cplx w0 = free_term_W(0.0, eps, main_disp(), psi0, obs);
        const Cplx wt = free_term_W(1.5, eps, main_disp(), psi0, obs);
        const Cplx wt_free = free_term_W(1.5, eps, free_disp(), psi0, obs);
        CHECK(std::abs(wt) < std::abs(w0));
        CHECK(std::abs(wt) < std::abs(wt_free) + 1e-12);
    }
}
