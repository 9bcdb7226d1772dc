// Unit tests for the phase-space layer: discrete Wigner transform identities
// and closed forms, the continuity bound, the split-step propagator with its
// Poisson bump potential, and the CSV artifact helpers.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "qdiff/csv.hpp"
#include "qdiff/errors.hpp"
#include "qdiff/rng.hpp"
#include "qdiff/splitstep.hpp"
#include "qdiff/wavefunction.hpp"
#include "qdiff/wigner.hpp"

using namespace qdiff;

namespace {

// Check the three defining identities of the discrete transform:
// total mass, position marginal and velocity marginal.
void check_identities(const WaveFunction& psi, double eps, double tol) {
    const WignerFunction W = wigner(psi, eps);
    CHECK(std::abs(W.mass() - psi.norm2()) < tol);

    const std::vector<double> mx = W.marginal_x();
    const double epow = std::pow(eps, psi.d);
    double worst_x = 0.0;
    for (size_t j = 0; j < mx.size(); ++j)
        worst_x = std::max(worst_x,
                           std::abs(mx[j] - std::norm(psi.amp[j]) / epow));
    CHECK(worst_x < tol);

    const std::vector<double> mv = W.marginal_v();
    const std::vector<double> md = momentum_density(psi);
    double worst_v = 0.0;
    for (size_t n = 0; n < mv.size(); ++n)
        worst_v = std::max(worst_v, std::abs(mv[n] - md[n]));
    CHECK(worst_v < tol);
}

}  // namespace

TEST_CASE("Wigner transform of a gaussian packet") {
    const WaveFunction psi = gaussian_packet(1, 256, 0.15, 0.7);
    CHECK(psi.norm2() == doctest::Approx(1.0).epsilon(1e-12));
    check_identities(psi, 1.0, 1e-10);

    // A coherent state has a nonnegative Wigner function.
    const WignerFunction W = wigner(psi, 1.0);
    double maxw = 0.0, minw = 0.0;
    for (double v : W.value) {
        maxw = std::max(maxw, v);
        minw = std::min(minw, v);
    }
    CHECK(maxw > 0.0);
    CHECK(minw > -1e-10 * maxw);

    // Peak near the phase-space origin.
    const int N = W.N;
    int jmax = 0, nmax = 0;
    double best = -1.0;
    for (int j = 0; j < N; ++j)
        for (int n = 0; n < N; ++n)
            if (W.value[static_cast<size_t>(j * N + n)] > best) {
                best = W.value[static_cast<size_t>(j * N + n)];
                jmax = j;
                nmax = n;
            }
    CHECK(std::abs(W.X[static_cast<size_t>(jmax)]) < 3.0 * W.dX());
    CHECK(std::abs(W.v[static_cast<size_t>(nmax)]) < 3.0 * W.dv());
}

TEST_CASE("two-bump state: closed-form Wigner function with interference") {
    const int N = 256;
    const double h = 0.15, sigma = 0.7, a = 4.05;
    WaveFunction psi = WaveFunction::zero(1, N, h, -0.5 * N * h);
    for (int j = 0; j < N; ++j) {
        const double x = psi.coord(j);
        psi.amp[static_cast<size_t>(j)] =
            std::exp(-(x - a) * (x - a) / (4.0 * sigma * sigma)) +
            std::exp(-(x + a) * (x + a) / (4.0 * sigma * sigma));
    }
    check_identities(psi, 1.0, 1e-10 * psi.norm2());

    // W(x, v) = sqrt(8 pi sigma^2) e^{-8 pi^2 sigma^2 v^2}
    //   [ e^{-(x-a)^2/(2 s^2)} + e^{-(x+a)^2/(2 s^2)}
    //     + 2 cos(4 pi a v) e^{-x^2/(2 s^2)} ].
    const WignerFunction W = wigner(psi, 1.0);
    const double s2 = sigma * sigma;
    const double pref = std::sqrt(8.0 * M_PI * s2);
    double maxw = 0.0;
    for (double v : W.value) maxw = std::max(maxw, std::abs(v));
    double worst = 0.0;
    for (int j = 0; j < N; ++j) {
        const double x = W.X[static_cast<size_t>(j)];
        for (int n = 0; n < N; ++n) {
            const double v = W.v[static_cast<size_t>(n)];
            const double exact =
                pref * std::exp(-8.0 * M_PI * M_PI * s2 * v * v) *
                (std::exp(-(x - a) * (x - a) / (2.0 * s2)) +
                 std::exp(-(x + a) * (x + a) / (2.0 * s2)) +
                 2.0 * std::cos(4.0 * M_PI * a * v) *
                     std::exp(-x * x / (2.0 * s2)));
            worst = std::max(
                worst,
                std::abs(W.value[static_cast<size_t>(j * N + n)] - exact));
        }
    }
    CHECK(worst < 1e-9 * maxw);

    // The interference fringe at the midpoint is as tall as the bumps.
    int j0 = 0;
    for (int j = 0; j < N; ++j)
        if (std::abs(W.X[static_cast<size_t>(j)]) <
            std::abs(W.X[static_cast<size_t>(j0)]))
            j0 = j;
    double fringe = 0.0;
    for (int n = 0; n < N; ++n)
        fringe = std::max(fringe,
                          std::abs(W.value[static_cast<size_t>(j0 * N + n)]));
    CHECK(fringe > 0.5 * maxw);
}

TEST_CASE("moving packet concentrates at its velocity") {
    const WaveFunction psi = gaussian_packet(1, 256, 0.15, 0.7, 0.0, {0.5});
    check_identities(psi, 1.0, 1e-10);
    const WignerFunction W = wigner(psi, 1.0);
    const std::vector<double> mv = W.marginal_v();
    double mean = 0.0, mass = 0.0;
    for (int n = 0; n < W.N; ++n) {
        mean += W.v[static_cast<size_t>(n)] * mv[static_cast<size_t>(n)];
        mass += mv[static_cast<size_t>(n)];
    }
    CHECK(mean / mass == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("kinetic rescaling relabels positions and scales values") {
    const WaveFunction psi = gaussian_packet(1, 128, 0.2, 0.8);
    const WignerFunction W1 = wigner(psi, 1.0);
    const WignerFunction We = wigner(psi, 0.5);
    CHECK(We.mass() == doctest::Approx(W1.mass()).epsilon(1e-12));
    for (int j = 0; j < 128; ++j) {
        CHECK(We.X[static_cast<size_t>(j)] ==
              doctest::Approx(0.5 * W1.X[static_cast<size_t>(j)]));
        CHECK(We.v[static_cast<size_t>(j)] == W1.v[static_cast<size_t>(j)]);
        for (int n = 0; n < 128; ++n)
            CHECK(We.value[static_cast<size_t>(j * 128 + n)] ==
                  doctest::Approx(2.0 *
                                  W1.value[static_cast<size_t>(j * 128 + n)])
                      .epsilon(1e-12));
    }
}

TEST_CASE("two dimensional Wigner transform") {
    const WaveFunction psi = gaussian_packet(2, 32, 0.4, 0.9, 0.3);
    CHECK(psi.norm2() == doctest::Approx(1.0).epsilon(1e-10));
    check_identities(psi, 1.0, 1e-10);
    check_identities(psi, 0.25, 1e-9);
}

TEST_CASE("velocity-band guard") {
    // sigma = 0.05 on h = 0.1 puts substantial momentum mass outside a
    // quarter of the band.
    CHECK_THROWS_AS(wigner(gaussian_packet(1, 64, 0.1, 0.05), 1.0),
                    GridTooCoarse);
}

TEST_CASE("pairing continuity bound") {
    const WaveFunction psi1 = gaussian_packet(1, 128, 0.2, 0.8);
    Observable obs;
    obs.xi_part = [](double x) { return std::exp(-x * x); };
    obs.v_part = [](double v) { return 1.0 / (1.0 + v * v); };

    SUBCASE("vanishing perturbation") {
        const WaveFunction zero = WaveFunction::zero(1, 128, 0.2, -12.8);
        const WignerContinuityReport r = wigner_continuity_check(psi1, zero, obs);
        CHECK(r.lhs == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(r.norm2 == doctest::Approx(0.0));
        CHECK(r.holds);
    }
    SUBCASE("random perturbations satisfy the bound") {
        RngStream rng(33, 0);
        for (int rep = 0; rep < 100; ++rep) {
            WaveFunction psi2 = WaveFunction::zero(1, 128, 0.2, -12.8);
            for (int j = 0; j < 128; ++j) {
                const double x = psi2.coord(j);
                const double env = std::exp(-0.05 * x * x);
                psi2.amp[static_cast<size_t>(j)] =
                    0.05 * env * Cplx(rng.normal(), rng.normal());
            }
            const WignerContinuityReport r =
                wigner_continuity_check(psi1, psi2, obs);
            CHECK(r.holds);
            CHECK(r.ratio <= 1.0);
        }
    }
    SUBCASE("the difference scales linearly in the perturbation") {
        WaveFunction bump = gaussian_packet(1, 128, 0.2, 0.6, 1.5, {0.3});
        WaveFunction small = 0.01 * bump;
        WaveFunction tiny = 0.001 * bump;
        const double l1 = wigner_continuity_check(psi1, small, obs).lhs;
        const double l2 = wigner_continuity_check(psi1, tiny, obs).lhs;
        CHECK(l1 / l2 == doctest::Approx(10.0).epsilon(0.25));
    }
}

TEST_CASE("Poisson bump potential") {
    SUBCASE("cloud statistics") {
        const double L = 4.0;
        const int reps = 10000;
        double msum = 0.0, w1 = 0.0, w3 = 0.0;
        uint64_t total_w = 0;
        for (int s = 0; s < reps; ++s) {
            const PoissonPotential V = sample_poisson_potential(1, L, 1000 + s);
            msum += static_cast<double>(V.centers.size());
            CHECK(V.centers.size() == V.weights.size());
            for (size_t g = 0; g < V.centers.size(); ++g) {
                CHECK(std::abs(V.centers[g][0]) <= 0.5 * L);
                CHECK(std::abs(std::abs(V.weights[g]) - 1.0) < 1e-15);
                w1 += V.weights[g];
                w3 += std::pow(V.weights[g], 3);
                ++total_w;
            }
        }
        const double mean = msum / reps;
        CHECK(std::abs(mean - L) < 4.0 * std::sqrt(L / reps));
        // Weight moments: odd ones vanish, the square is identically one.
        const double se = 4.0 / std::sqrt(static_cast<double>(total_w));
        CHECK(std::abs(w1 / static_cast<double>(total_w)) < se);
        CHECK(std::abs(w3 / static_cast<double>(total_w)) < se);
    }
    SUBCASE("empty box gives the zero potential") {
        bool found = false;
        for (uint64_t s = 0; s < 64 && !found; ++s) {
            const PoissonPotential V = sample_poisson_potential(1, 0.5, s);
            if (!V.centers.empty()) continue;
            found = true;
            Vec x(1);
            for (double t : {-0.2, 0.0, 0.17}) {
                x[0] = t;
                CHECK(V(x) == 0.0);
            }
            const std::vector<double> grid = potential_on_grid(V, 16);
            for (double v : grid) CHECK(v == 0.0);
        }
        CHECK(found);
    }
    SUBCASE("periodic minimum-image evaluation") {
        const PoissonPotential V = sample_poisson_potential(1, 6.0, 3);
        Vec x(1), xp(1);
        for (double t : {-2.9, -0.4, 1.3, 2.8}) {
            x[0] = t;
            xp[0] = t + 6.0;
            CHECK(V(x) == doctest::Approx(V(xp)).epsilon(1e-12));
        }
    }
    SUBCASE("bump profile") {
        const auto B = gaussian_bump(1);
        CHECK(B(0.0) == doctest::Approx(std::sqrt(2.0 * M_PI)));
        CHECK(B(1.0) ==
              doctest::Approx(std::sqrt(2.0 * M_PI) *
                              std::exp(-2.0 * M_PI * M_PI)));
        CHECK(gaussian_bump(3)(0.0) ==
              doctest::Approx(std::pow(2.0 * M_PI, 1.5)));
    }
}

TEST_CASE("split-step propagator") {
    const int N = 128;
    const double L = 16.0;  // h = 0.125
    const WaveFunction psi0 = gaussian_packet(1, N, L / N, 1.0);
    const PoissonPotential V = sample_poisson_potential(1, L, 17);

    SUBCASE("unitarity") {
        const WaveFunction psi = evolve_splitstep(psi0, V, 0.5, 2.0, 0.05);
        CHECK(std::abs(psi.norm2() - psi0.norm2()) < 1e-10);
    }
    SUBCASE("vanishing coupling reproduces the exact free evolution") {
        const WaveFunction a = evolve_splitstep(psi0, V, 0.0, 1.5, 0.05);
        const WaveFunction b = evolve_free(psi0, 1.5);
        double diff2 = 0.0;
        for (size_t j = 0; j < a.amp.size(); ++j)
            diff2 += std::norm(a.amp[j] - b.amp[j]);
        CHECK(std::sqrt(diff2 * a.cell()) < 1e-10);
    }
    SUBCASE("free spreading of a gaussian") {
        // var(t) = sigma^2 + t^2 / (64 pi^4 sigma^2) in these units.
        const double sigma = 0.3, t = 10.0;
        const WaveFunction g0 = gaussian_packet(1, 256, 0.1, sigma);
        const WaveFunction gt = evolve_free(g0, t);
        const double expect =
            sigma * sigma +
            t * t / (64.0 * std::pow(M_PI, 4) * sigma * sigma);
        CHECK(mean_square_displacement(g0) ==
              doctest::Approx(sigma * sigma).epsilon(1e-7));
        CHECK(mean_square_displacement(gt) ==
              doctest::Approx(expect).epsilon(1e-7));
        CHECK(gt.norm2() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("second-order accuracy in the step size") {
        const double t = 1.0, lambda = 0.8;
        const WaveFunction ref =
            evolve_splitstep(psi0, V, lambda, t, t / 512.0);
        auto err = [&](double dt) {
            const WaveFunction p = evolve_splitstep(psi0, V, lambda, t, dt);
            double d2 = 0.0;
            for (size_t j = 0; j < p.amp.size(); ++j)
                d2 += std::norm(p.amp[j] - ref.amp[j]);
            return std::sqrt(d2 * p.cell());
        };
        const double e16 = err(t / 16.0);
        const double e32 = err(t / 32.0);
        CHECK(e16 / e32 == doctest::Approx(4.0).epsilon(0.35));
    }
    SUBCASE("oversized steps are rejected") {
        CHECK_THROWS_AS(evolve_splitstep(psi0, V, 1.0, 1.0, 5.0), StepTooLarge);
    }
    SUBCASE("grid mismatch is rejected") {
        const WaveFunction off = gaussian_packet(1, N, 0.1, 1.0);
        CHECK_THROWS_AS(evolve_splitstep(off, V, 0.5, 1.0, 0.05), Error);
    }
}

TEST_CASE("mean square displacement stays within the quartic envelope") {
    const int N = 256;
    const double L = 25.6, lambda = 0.5, dt = 0.02;
    const double h = L / N;
    const double vmax = 1.0 / (4.0 * M_PI * h);  // largest group velocity

    const std::vector<double> ts = {1.0, 2.0, 4.0, 8.0};
    std::vector<double> growth(ts.size(), 0.0);
    double m0 = 0.0;
    for (uint64_t s = 0; s < 8; ++s) {
        const PoissonPotential V = sample_poisson_potential(1, L, 900 + s);
        // A drifting packet; in this coupling regime (bump height comparable
        // to the kinetic energy) the drift is scattered away quickly.
        const WaveFunction psi0 = gaussian_packet(1, N, h, 1.0, 0.0, {0.3});
        m0 = mean_square_displacement(psi0);
        for (size_t i = 0; i < ts.size(); ++i) {
            const double t = ts[i];
            const WaveFunction p = evolve_splitstep(psi0, V, lambda, t, dt);
            const double m = mean_square_displacement(p);
            // Light cone: sqrt(msd) grows at most at the band-edge group
            // velocity, which puts msd below a quartic envelope for t >= 1.
            const double cone = std::sqrt(m0) + vmax * t;
            CHECK(m <= cone * cone * (1.0 + 1e-9));
            CHECK(m <= m0 + 2.0 * vmax * vmax * (1.0 + t * t * t * t));
            growth[i] += (m - m0) / 8.0;
        }
    }
    // The ensemble-averaged spread grows at every dyadic time ...
    for (size_t i = 0; i < ts.size(); ++i) {
        CHECK(growth[i] > 0.0);
        if (i > 0) CHECK(growth[i] > growth[i - 1]);
    }
    // ... but decelerates: the dyadic growth ratio at late times stays below
    // the early-time (super-ballistic startup) ratio.
    CHECK(growth[3] / growth[2] < growth[1] / growth[0]);
}

TEST_CASE("CSV artifacts") {
    SUBCASE("round-trip formatting") {
        for (double x : {M_PI, 0.1, -1.0 / 3.0, 1e300, 5e-324, 0.0}) {
            const std::string s = format_g17(x);
            // strtod rather than stod: stod reports subnormals as
            // out-of-range even though the conversion is exact.
            CHECK(std::strtod(s.c_str(), nullptr) == x);
        }
    }
    SUBCASE("writer shape checks") {
        CsvWriter w({"a", "b"});
        w.row({"x", "y"});
        w.row_values({1.5, 2.5});
        CHECK(w.rows() == 2);
        CHECK(w.str() == "a,b\nx,y\n1.5,2.5\n");
        CHECK_THROWS_AS(w.row({"only-one"}), Error);
    }
    SUBCASE("artifact directories are unique and writable") {
        namespace fs = std::filesystem;
        const std::string root = (fs::temp_directory_path() /
                                  "qdiff_test_artifacts")
                                     .string();
        fs::remove_all(root);
        const ArtifactPaths a = make_artifact_dir(root, "unit");
        const ArtifactPaths b = make_artifact_dir(root, "unit");
        CHECK(a.dir != b.dir);
        CHECK(fs::exists(a.dir));
        write_text_file(a.csv, "h\n1\n");
        std::ifstream in(a.csv);
        std::string line;
        std::getline(in, line);
        CHECK(line == "h");
        fs::remove_all(root);
    }
}
