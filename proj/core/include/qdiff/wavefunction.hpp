#pragma once

// Complex wave functions sampled on uniform periodic grids.
//
// Conventions shared by the Wigner transform and the split-step propagator:
//   * the box is [x0, x0 + N*h) per axis, periodic, with N even;
//   * storage is row-major with the last axis fastest;
//   * the Fourier transform uses the e^{-2 pi i p.x} kernel, so the discrete
//     momenta are p_n = n / (N*h) and no 2*pi appears in the grids;
//   * norm2() approximates the continuum L2 norm as h^d * sum |amp|^2.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "qdiff/errors.hpp"

namespace qdiff {

using Cplx = std::complex<double>;

struct WaveFunction {
    int d = 1;              // spatial dimension
    int N = 0;              // grid points per axis (even)
    double h = 0.0;         // grid spacing; box extent per axis is N*h
    double x0 = 0.0;        // coordinate of grid index 0 along every axis
    std::vector<Cplx> amp;  // N^d values, row-major

    static WaveFunction zero(int d, int N, double h, double x0) {
        if (d < 1 || d > 3) throw ConfigInvalid("wave function dimension must be 1, 2, or 3");
        if (N < 4 || N % 2 != 0) throw ConfigInvalid("grid size must be even and at least 4");
        if (!(h > 0)) throw ConfigInvalid("grid spacing must be positive");
        WaveFunction w;
        w.d = d;
        w.N = N;
        w.h = h;
        w.x0 = x0;
        std::size_t total = 1;
        for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(N);
        w.amp.assign(total, Cplx(0.0, 0.0));
        return w;
    }

    std::size_t size() const { return amp.size(); }
    double extent() const { return N * h; }
    double coord(int j) const { return x0 + j * h; }

    double cell() const {
        double c = 1.0;
        for (int a = 0; a < d; ++a) c *= h;
        return c;
    }

    double norm2() const {
        double s = 0.0;
        for (const Cplx& z : amp) s += std::norm(z);
        return s * cell();
    }

    bool same_grid(const WaveFunction& o) const {
        return d == o.d && N == o.N && h == o.h && x0 == o.x0;
    }
};

// Normalized Gaussian packet centered at `center` (same coordinate on every
// axis) with position spread sigma and mean velocity v0 (empty = at rest):
//   psi(x) = (2 pi sigma^2)^{-d/4} exp(-|x-c|^2/(4 sigma^2) + 2 pi i v0.(x-c)).
// The grid is centered on the box midpoint: x0 = -N*h/2.
inline WaveFunction gaussian_packet(int d, int N, double h, double sigma,
                                    double center = 0.0,
                                    const std::vector<double>& v0 = {}) {
    if (!(sigma > 0)) throw ConfigInvalid("gaussian_packet: sigma must be positive");
    if (!v0.empty() && static_cast<int>(v0.size()) != d)
        throw ConfigInvalid("gaussian_packet: velocity dimension mismatch");
    WaveFunction w = WaveFunction::zero(d, N, h, -0.5 * N * h);
    const double pref = std::pow(2.0 * M_PI * sigma * sigma, -0.25 * d);
    for (std::size_t flat = 0; flat < w.size(); ++flat) {
        double r2 = 0.0, phase = 0.0;
        std::size_t rest = flat;
        for (int a = 0; a < w.d; ++a) {  // axes taken fastest-first; order is immaterial here
            const int j = static_cast<int>(rest % static_cast<std::size_t>(N));
            rest /= static_cast<std::size_t>(N);
            const double dx = w.coord(j) - center;
            r2 += dx * dx;
            if (!v0.empty()) phase += v0[w.d - 1 - a] * dx;
        }
        const double mag = pref * std::exp(-r2 / (4.0 * sigma * sigma));
        w.amp[flat] = std::polar(mag, 2.0 * M_PI * phase);
    }
    return w;
}

inline WaveFunction operator+(const WaveFunction& a, const WaveFunction& b) {
    if (!a.same_grid(b)) throw ConfigInvalid("wave function grids differ");
    WaveFunction s = a;
    for (std::size_t i = 0; i < s.amp.size(); ++i) s.amp[i] += b.amp[i];
    return s;
}

inline WaveFunction operator*(double c, const WaveFunction& a) {
    WaveFunction s = a;
    for (Cplx& z : s.amp) z *= c;
    return s;
}

}  // namespace qdiff
