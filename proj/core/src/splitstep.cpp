#include "qdiff/splitstep.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "qdiff/errors.hpp"
#include "qdiff/rng.hpp"

namespace qdiff {

namespace {

inline double min_image(double delta, double L) {
    return delta - L * std::round(delta / L);
}

// Decode a row-major flat index into per-axis indices (last axis fastest).
inline void decode(std::size_t flat, int d, int N, int* idx) {
    for (int a = d - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % static_cast<std::size_t>(N));
        flat /= static_cast<std::size_t>(N);
    }
}

}  // namespace

double PoissonPotential::operator()(const Vec& x) const {
    double s = 0.0;
    for (std::size_t g = 0; g < centers.size(); ++g) {
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) {
            const double dx = min_image(x[a] - centers[g][a], L);
            r2 += dx * dx;
        }
        s += weights[g] * bump(std::sqrt(r2));
    }
    return s;
}

std::function<double(double)> gaussian_bump(int d) {
    const double pref = std::pow(2.0 * M_PI, 0.5 * d);
    return [pref](double r) { return pref * std::exp(-2.0 * M_PI * M_PI * r * r); };
}

PoissonPotential sample_poisson_potential(int d, double L, std::uint64_t seed) {
    if (d < 1 || d > 3) throw ConfigInvalid("potential dimension must be 1, 2, or 3");
    if (!(L > 0)) throw ConfigInvalid("box edge must be positive");
    PoissonPotential V;
    V.d = d;
    V.L = L;
    V.bump = gaussian_bump(d);
    RngStream rng(seed, /*stream=*/0);
    double mean = 1.0;
    for (int a = 0; a < d; ++a) mean *= L;
    const std::uint64_t M = rng.poisson(mean);
    V.centers.reserve(M);
    V.weights.reserve(M);
    for (std::uint64_t g = 0; g < M; ++g) {
        Vec y = Vec::zero(d);
        for (int a = 0; a < d; ++a) y[a] = rng.uniform(-0.5 * L, 0.5 * L);
        V.centers.push_back(y);
        V.weights.push_back(rng.uniform() < 0.5 ? -1.0 : 1.0);
    }
    return V;
}

std::vector<double> potential_on_grid(const PoissonPotential& V, int N) {
    if (N < 4 || N % 2 != 0) throw ConfigInvalid("grid size must be even and at least 4");
    const double h = V.L / N;
    std::size_t total = 1;
    for (int a = 0; a < V.d; ++a) total *= static_cast<std::size_t>(N);
    std::vector<double> out(total, 0.0);
    int idx[3] = {0, 0, 0};
    for (std::size_t flat = 0; flat < total; ++flat) {
        decode(flat, V.d, N, idx);
        Vec x = Vec::zero(V.d);
        for (int a = 0; a < V.d; ++a) x[a] = -0.5 * V.L + idx[a] * h;
        out[flat] = V(x);
    }
    return out;
}

namespace {

// Kinetic phase table e(p) on the DFT grid, p = n/L per axis.
std::vector<double> kinetic_symbol(int d, int N, double L) {
    std::vector<double> axis(N);
    for (int k = 0; k < N; ++k) {
        const int ks = (k <= N / 2) ? k : k - N;
        const double p = ks / L;
        axis[k] = 0.5 * p * p;
    }
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(N);
    std::vector<double> e(total, 0.0);
    int idx[3] = {0, 0, 0};
    for (std::size_t flat = 0; flat < total; ++flat) {
        decode(flat, d, N, idx);
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += axis[idx[a]];
        e[flat] = s;
    }
    return e;
}

struct FftPair {
    fftw_plan fwd = nullptr, bwd = nullptr;

    FftPair(std::vector<Cplx>& a, int d, int N) {
        auto* p = reinterpret_cast<fftw_complex*>(a.data());
        switch (d) {
            case 1: fwd = fftw_plan_dft_1d(N, p, p, FFTW_FORWARD, FFTW_ESTIMATE); break;
            case 2: fwd = fftw_plan_dft_2d(N, N, p, p, FFTW_FORWARD, FFTW_ESTIMATE); break;
            default: fwd = fftw_plan_dft_3d(N, N, N, p, p, FFTW_FORWARD, FFTW_ESTIMATE); break;
        }
        switch (d) {
            case 1: bwd = fftw_plan_dft_1d(N, p, p, FFTW_BACKWARD, FFTW_ESTIMATE); break;
            case 2: bwd = fftw_plan_dft_2d(N, N, p, p, FFTW_BACKWARD, FFTW_ESTIMATE); break;
            default: bwd = fftw_plan_dft_3d(N, N, N, p, p, FFTW_BACKWARD, FFTW_ESTIMATE); break;
        }
    }
    ~FftPair() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
};

void check_box(const WaveFunction& psi, const PoissonPotential& V) {
    const double h = V.L / psi.N;
    if (psi.d != V.d || std::abs(psi.h - h) > 1e-12 * h || std::abs(psi.x0 + 0.5 * V.L) > 1e-12 * V.L)
        throw ConfigInvalid("wave-function grid does not tile the potential box");
}

}  // namespace

WaveFunction evolve_splitstep(const WaveFunction& psi0, const PoissonPotential& V,
                              double lambda, double t, double dt) {
    if (!(t >= 0) || !(dt > 0)) throw ConfigInvalid("evolution needs t >= 0 and dt > 0");
    check_box(psi0, V);
    if (t == 0.0) return psi0;
    const int N = psi0.N, d = psi0.d;
    const std::size_t total = psi0.size();

    const std::vector<double> vgrid = potential_on_grid(V, N);
    double vmax = 0.0;
    for (double v : vgrid) vmax = std::max(vmax, std::abs(v));
    const double bandwidth = d / (8.0 * psi0.h * psi0.h);  // max |p|^2/2 on the grid

    const long nsteps = static_cast<long>(std::ceil(t / dt - 1e-12));
    const double step = t / static_cast<double>(nsteps);
    if (step * std::abs(lambda) * vmax > 1.5 || step * bandwidth > 1.5)
        throw StepTooLarge("time step advances more than 1.5 rad of phase per step; reduce dt");

    const std::vector<double> esym = kinetic_symbol(d, N, V.L);
    std::vector<Cplx> ehalf(total), ekin(total);
    for (std::size_t i = 0; i < total; ++i) {
        ehalf[i] = std::polar(1.0, -0.5 * lambda * vgrid[i] * step);
        ekin[i] = std::polar(1.0 / static_cast<double>(total), -esym[i] * step);
        // 1/total folds the FFTW backward normalization into the kinetic phase
    }

    WaveFunction psi = psi0;
    FftPair plans(psi.amp, d, N);
    for (long s = 0; s < nsteps; ++s) {
        for (std::size_t i = 0; i < total; ++i) psi.amp[i] *= ehalf[i];
        fftw_execute(plans.fwd);
        for (std::size_t i = 0; i < total; ++i) psi.amp[i] *= ekin[i];
        fftw_execute(plans.bwd);
        for (std::size_t i = 0; i < total; ++i) psi.amp[i] *= ehalf[i];
    }
    return psi;
}

WaveFunction evolve_free(const WaveFunction& psi0, double t) {
    const int N = psi0.N, d = psi0.d;
    const std::size_t total = psi0.size();
    const std::vector<double> esym = kinetic_symbol(d, N, psi0.extent());
    WaveFunction psi = psi0;
    FftPair plans(psi.amp, d, N);
    fftw_execute(plans.fwd);
    for (std::size_t i = 0; i < total; ++i)
        psi.amp[i] *= std::polar(1.0 / static_cast<double>(total), -esym[i] * t);
    fftw_execute(plans.bwd);
    return psi;
}

double mean_square_displacement(const WaveFunction& psi) {
    double num = 0.0, den = 0.0;
    int idx[3] = {0, 0, 0};
    for (std::size_t flat = 0; flat < psi.size(); ++flat) {
        decode(flat, psi.d, psi.N, idx);
        double r2 = 0.0;
        for (int a = 0; a < psi.d; ++a) {
            const double x = psi.coord(idx[a]);
            r2 += x * x;
        }
        const double w = std::norm(psi.amp[flat]);
        num += r2 * w;
        den += w;
    }
    return (den > 0.0) ? num / den : 0.0;
}

}  // namespace qdiff
