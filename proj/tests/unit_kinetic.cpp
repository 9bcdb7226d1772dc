// Unit tests for the randomness layer and the momentum-jump kinetics: Philox
// known answers, stream determinism, sampler distributions, collision-rate
// moments, jump chains, velocity autocorrelation, the diffusion constant and
// the heat-kernel comparison.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qdiff/errors.hpp"
#include "qdiff/kinetic.hpp"
#include "qdiff/radial_profile.hpp"
#include "qdiff/rng.hpp"

using namespace qdiff;

namespace {

// Closed-form shell moments of the Gaussian form factor in d = 3:
//   S(e)      = 2 pi (1 - exp(-8e)) / (4e)
//   sigma_0   = 2 pi sqrt(2e) S(e)
//   sigma_1   = (2 pi)^2 sqrt(2e) [ (1 + exp(-8e))/(4e) - (1 - exp(-8e))/(16 e^2) ]
double sigma0_exact(double e) {
    return 2.0 * M_PI * std::sqrt(2.0 * e) * 2.0 * M_PI *
           (1.0 - std::exp(-8.0 * e)) / (4.0 * e);
}
double sigma1_exact(double e) {
    const double em = std::exp(-8.0 * e);
    const double bracket = (1.0 + em) / (4.0 * e) - (1.0 - em) / (16.0 * e * e);
    return 4.0 * M_PI * M_PI * std::sqrt(2.0 * e) * bracket;
}

}  // namespace

TEST_CASE("Philox 4x32-10 known answers") {
    using P = Philox4x32;
    {
        const P::ctr_t out = P::block({0, 0, 0, 0}, {0, 0});
        CHECK(out[0] == 0x6627e8d5u);
        CHECK(out[1] == 0xe169c58du);
        CHECK(out[2] == 0xbc57ac4cu);
        CHECK(out[3] == 0x9b00dbd8u);
    }
    {
        const uint32_t f = 0xffffffffu;
        const P::ctr_t out = P::block({f, f, f, f}, {f, f});
        CHECK(out[0] == 0x408f276du);
        CHECK(out[1] == 0x41c83b0eu);
        CHECK(out[2] == 0xa20bc7c6u);
        CHECK(out[3] == 0x6d5451fdu);
    }
    {
        const P::ctr_t out = P::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                                       0x03707344u},
                                      {0xa4093822u, 0x299f31d0u});
        CHECK(out[0] == 0xd16cfe09u);
        CHECK(out[1] == 0x94fdccebu);
        CHECK(out[2] == 0x5001e420u);
        CHECK(out[3] == 0x24126ea1u);
    }
}

TEST_CASE("stream layout and determinism") {
    // The stream id occupies the upper counter words, the seed is the key.
    RngStream a(42, 5);
    const Philox4x32::ctr_t block = Philox4x32::block({0, 0, 5, 0}, {42, 0});
    CHECK(a.next_u32() == block[0]);
    CHECK(a.next_u32() == block[1]);
    CHECK(a.next_u32() == block[2]);
    CHECK(a.next_u32() == block[3]);
    const Philox4x32::ctr_t block1 = Philox4x32::block({1, 0, 5, 0}, {42, 0});
    CHECK(a.next_u32() == block1[0]);

    RngStream b(42, 5), c(42, 6), d(43, 5);
    const uint64_t vb = b.next_u64();
    CHECK(vb == RngStream(42, 5).next_u64());
    CHECK(vb != c.next_u64());
    CHECK(vb != d.next_u64());
}

TEST_CASE("sampler distributions") {
    RngStream rng(2024, 0);
    const int n = 20000;

    SUBCASE("uniform bounds and mean") {
        double m = 0;
        for (int i = 0; i < n; ++i) {
            const double u = rng.uniform();
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
            m += u;
        }
        CHECK(std::abs(m / n - 0.5) < 4.0 / std::sqrt(12.0 * n));
        const double v = rng.uniform(2.0, 5.0);
        CHECK(v >= 2.0);
        CHECK(v < 5.0);
        CHECK(rng.uniform_pos() > 0.0);
    }
    SUBCASE("exponential moments") {
        double m = 0, m2 = 0;
        for (int i = 0; i < n; ++i) {
            const double x = rng.exponential(3.0);
            m += x;
            m2 += x * x;
        }
        m /= n;
        m2 /= n;
        CHECK(std::abs(m - 1.0 / 3.0) < 4.0 / (3.0 * std::sqrt(n)));
        CHECK(std::abs(m2 - 2.0 / 9.0) < 10.0 / (9.0 * std::sqrt(n)));
    }
    SUBCASE("normal moments") {
        double m = 0, m2 = 0;
        for (int i = 0; i < n; ++i) {
            const double x = rng.normal();
            m += x;
            m2 += x * x;
        }
        CHECK(std::abs(m / n) < 4.0 / std::sqrt(n));
        CHECK(std::abs(m2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
    }
    SUBCASE("poisson moments") {
        const double mean = 9.3;
        double m = 0, m2 = 0;
        for (int i = 0; i < n; ++i) {
            const double x = static_cast<double>(rng.poisson(mean));
            m += x;
            m2 += x * x;
        }
        m /= n;
        CHECK(std::abs(m - mean) < 4.0 * std::sqrt(mean / n));
        CHECK(std::abs(m2 / n - m * m - mean) < 0.1 * mean);
        CHECK(rng.poisson(0.0) == 0);
    }
    SUBCASE("sphere and ball") {
        Vec mean3(3);
        for (int i = 0; i < 4000; ++i) {
            const Vec u = rng.sphere(3);
            CHECK(norm(u) == doctest::Approx(1.0).epsilon(1e-12));
            mean3 += u;
        }
        CHECK(norm(mean3) / 4000.0 < 0.05);
        const Vec s1 = rng.sphere(1);
        CHECK(std::abs(s1[0]) == 1.0);
        double rsum = 0;
        for (int i = 0; i < 4000; ++i) {
            const Vec x = rng.ball(3, 2.0);
            CHECK(norm(x) <= 2.0);
            rsum += norm(x);
        }
        CHECK(rsum / 4000.0 == doctest::Approx(1.5).epsilon(0.03));
    }
    SUBCASE("one sphere coordinate is uniform in d = 3") {
        std::vector<double> cosines(3000);
        for (double& c : cosines) c = rng.sphere(3)[2];
        const double stat = ks_statistic(
            cosines, [](double x) { return 0.5 * (x + 1.0); });
        CHECK(ks_p_value(stat, 3000) > 0.01);
    }
}

TEST_CASE("KS machinery sanity") {
    RngStream rng(7, 1);
    std::vector<double> u(2000);
    for (double& x : u) x = rng.uniform();
    auto unif_cdf = [](double x) { return std::min(std::max(x, 0.0), 1.0); };
    const double good = ks_statistic(u, unif_cdf);
    CHECK(ks_p_value(good, 2000) > 0.01);
    // A shifted sample must be rejected decisively.
    for (double& x : u) x = 0.8 * x + 0.2;
    const double bad = ks_statistic(u, unif_cdf);
    CHECK(ks_p_value(bad, 2000) < 1e-6);
    // Monotone in the statistic.
    CHECK(ks_p_value(0.5, 100) < ks_p_value(0.1, 100));
}

TEST_CASE("co-area bracket") {
    // int_0^inf [h](e) de = int h(|p|) d^3 p = 4 pi int r^2 h(r) dr.
    auto h = [](double r) { return std::exp(-r * r); };
    double lhs = 0.0;
    {
        // Integrate the bracket over energies (integrand ~ sqrt(e) e^{-2e}).
        double acc = 0.0;
        const int n = 4000;
        const double emax = 25.0;
        for (int i = 0; i < n; ++i) {
            const double e = (i + 0.5) * emax / n;
            acc += coarea_bracket(h, e, 3) * emax / n;
        }
        lhs = acc;
    }
    // 4 pi int_0^inf r^2 e^{-r^2} dr = 4 pi * sqrt(pi)/4 = pi^{3/2}
    const double rhs = 4.0 * M_PI * std::sqrt(M_PI) / 4.0;
    CHECK(lhs == doctest::Approx(std::pow(M_PI, 1.5)).epsilon(1e-3));
    CHECK(rhs == doctest::Approx(std::pow(M_PI, 1.5)).epsilon(1e-9));
    CHECK(sphere_surface(3) == doctest::Approx(4.0 * M_PI));
    CHECK(sphere_surface(2) == doctest::Approx(2.0 * M_PI));
}

TEST_CASE("collision-rate moments") {
    const RadialProfile g = RadialProfile::gaussian();
    SUBCASE("gaussian closed forms") {
        for (double e : {0.25, 1.0, 4.0}) {
            const SigmaMoments sm = sigma_moments(e, g, 3);
            CHECK(sm.sigma0 == doctest::Approx(sigma0_exact(e)).epsilon(1e-9));
            CHECK(sm.sigma1 == doctest::Approx(sigma1_exact(e)).epsilon(1e-9));
        }
        // Spot values.
        CHECK(sigma_moments(1.0, g, 3).sigma0 ==
              doctest::Approx(13.953).epsilon(1e-3));
        CHECK(sigma_moments(1.0, g, 3).sigma1 ==
              doctest::Approx(10.475).epsilon(1e-3));
        const SigmaMoments s4 = sigma_moments(4.0, g, 3);
        CHECK(s4.sigma0 - s4.sigma1 == doctest::Approx(0.4355).epsilon(2e-3));
        const SigmaMoments sq = sigma_moments(0.25, g, 3);
        CHECK(sq.sigma0 == doctest::Approx(24.14).epsilon(2e-3));
        CHECK(sq.sigma0 - sq.sigma1 == doctest::Approx(16.58).epsilon(2e-3));
    }
    SUBCASE("isotropic kernel has vanishing first moment") {
        const SigmaMoments sm = sigma_moments(1.0, RadialProfile::constant(), 3);
        CHECK(sm.sigma1 == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(sm.sigma0 == doctest::Approx(2.0 * M_PI * std::sqrt(2.0) * 4.0 *
                                           M_PI));
    }
}

TEST_CASE("jump chain structure") {
    const RadialProfile g = RadialProfile::gaussian();
    const double e = 1.0, T = 12.0;
    const SigmaMoments sm = sigma_moments(e, g, 3);

    SUBCASE("single path") {
        const Trajectory tr = sample_jump_chain(e, T, 4, g, 3);
        CHECK(tr.directions.size() == tr.jump_times.size() + 1);
        for (size_t i = 0; i + 1 < tr.jump_times.size(); ++i)
            CHECK(tr.jump_times[i] < tr.jump_times[i + 1]);
        for (const Vec& u : tr.directions)
            CHECK(norm(u) == doctest::Approx(1.0).epsilon(1e-12));
        if (!tr.jump_times.empty()) {
            CHECK(tr.jump_times.front() > 0.0);
            CHECK(tr.jump_times.back() < T);
        }
        // Deterministic in the seed.
        const Trajectory tr2 = sample_jump_chain(e, T, 4, g, 3);
        CHECK(tr2.jump_times == tr.jump_times);
        // position_at integrates the velocity sqrt(2e)/(2 pi) piecewise.
        const Vec x = tr.position_at(T);
        CHECK(norm(x) <= std::sqrt(2.0 * e) / (2.0 * M_PI) * T * (1.0 + 1e-12));
    }
    SUBCASE("waiting times are Exp(sigma0)") {
        std::vector<double> waits;
        for (uint64_t s = 0; s < 40; ++s) {
            const Trajectory tr = sample_jump_chain(e, T, 100 + s, g, 3);
            double prev = 0.0;
            for (double t : tr.jump_times) {
                waits.push_back(t - prev);
                prev = t;
            }
        }
        REQUIRE(waits.size() > 2000);
        const double s0 = sm.sigma0;
        const double stat = ks_statistic(
            waits, [s0](double x) { return 1.0 - std::exp(-s0 * x); });
        CHECK(ks_p_value(stat, static_cast<int>(waits.size())) > 1e-3);
    }
    SUBCASE("direction decorrelation") {
        const double rate = sm.sigma0 - sm.sigma1;
        const double lag = 3.0 / rate;
        const int n = 4000;
        double corr = 0.0;
        for (uint64_t s = 0; s < static_cast<uint64_t>(n); ++s) {
            const Trajectory tr = sample_jump_chain(e, lag, 500 + s, g, 3);
            corr += dot(tr.directions.front(), tr.direction_at(lag));
        }
        corr /= n;
        CHECK(std::abs(corr - std::exp(-3.0)) < 4.0 * 0.577 / std::sqrt(n));
    }
}

TEST_CASE("velocity autocorrelation decays at sigma0 - sigma1") {
    const RadialProfile g = RadialProfile::gaussian();
    const double e = 1.0;
    const SigmaMoments sm = sigma_moments(e, g, 3);
    const double rate = sm.sigma0 - sm.sigma1;
    std::vector<double> lags;
    for (int i = 0; i <= 8; ++i) lags.push_back(i * 0.125 / rate);
    const AutocorrCurve c = autocorrelation(e, lags, 6000, 31, g, 3, 1);
    CHECK(c.value[0] == doctest::Approx(2.0 * e).epsilon(1e-12));
    CHECK(c.predicted_rate == doctest::Approx(rate));
    CHECK(std::abs(c.fitted_rate - rate) < 0.15 * rate);
    CHECK(c.fit_residual < 0.12);
    CHECK_THROWS_AS(autocorrelation(e, lags, 10, 31, g, 3, 1),
                    InsufficientSamples);
}

TEST_CASE("diffusion constant") {
    const RadialProfile g = RadialProfile::gaussian();
    const double e = 1.0;
    const ValueWithError closed =
        diffusion_constant(e, g, 3, DiffusionMode::ClosedForm);
    const double rate = sigma0_exact(e) - sigma1_exact(e);
    CHECK(closed.value ==
          doctest::Approx(2.0 * e / (4.0 * M_PI * M_PI * 3.0 * rate))
              .epsilon(1e-9));
    CHECK(closed.error == 0.0);

    const ValueWithError mc =
        diffusion_constant(e, g, 3, DiffusionMode::MonteCarlo, 20000, 11, 1);
    CHECK(mc.error > 0.0);
    CHECK(std::abs(mc.value - closed.value) < 3.5 * mc.error);
    CHECK(mc.error < 0.05 * closed.value);

    SUBCASE("bit-identical across worker counts and repeats") {
        const ValueWithError w3 =
            diffusion_constant(e, g, 3, DiffusionMode::MonteCarlo, 4000, 11, 3);
        const ValueWithError w1 =
            diffusion_constant(e, g, 3, DiffusionMode::MonteCarlo, 4000, 11, 1);
        const ValueWithError w1b =
            diffusion_constant(e, g, 3, DiffusionMode::MonteCarlo, 4000, 11, 1);
        CHECK(w3.value == w1.value);
        CHECK(w3.error == w1.error);
        CHECK(w1b.value == w1.value);
        // A different seed gives a genuinely different estimate.
        const ValueWithError other =
            diffusion_constant(e, g, 3, DiffusionMode::MonteCarlo, 4000, 12, 1);
        CHECK(other.value != w1.value);
    }
    SUBCASE("guards") {
        CHECK_THROWS_AS(
            diffusion_constant(e, g, 3, DiffusionMode::MonteCarlo, 10, 1, 1),
            InsufficientSamples);
    }
}

TEST_CASE("heat kernel comparison") {
    const RadialProfile g = RadialProfile::gaussian();
    const double e = 1.0;
    const SigmaMoments sm = sigma_moments(e, g, 3);
    const double rate = sm.sigma0 - sm.sigma1;
    const HeatCompareReport rep = heat_compare(e, 40.0 / rate, 3000, 5, g, 3, 1);
    CHECK(rep.D == doctest::Approx(2.0 * e / (4.0 * M_PI * M_PI * 3.0 * rate)));
    CHECK(rep.var_expected == doctest::Approx(2.0 * rep.D * rep.T));
    CHECK(rep.var_rel_err ==
          doctest::Approx(std::abs(rep.var_per_coord - rep.var_expected) /
                          rep.var_expected));
    CHECK(rep.var_rel_err < 0.15);
    CHECK(rep.ks_p_min > 1e-3);
    CHECK(rep.msd == doctest::Approx(rep.msd_expected).epsilon(0.15));
    CHECK(rep.mean_jumps ==
          doctest::Approx(sm.sigma0 * rep.T).epsilon(0.1));
    CHECK_THROWS_AS(heat_compare(e, 1.0, 10, 5, g, 3, 1), InsufficientSamples);
    const std::string js = to_json(rep);
    CHECK(js.find("var_rel_err") != std::string::npos);
}
