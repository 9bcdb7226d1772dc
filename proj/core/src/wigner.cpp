#include "qdiff/wigner.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace qdiff {

namespace {

inline int wrap(int a, int m) {
    int r = a % m;
    return r < 0 ? r + m : r;
}

// Unnormalized in-place DFT, sign = FFTW_FORWARD (e^{-2 pi i}) or FFTW_BACKWARD.
void fft_inplace(std::vector<Cplx>& a, int n0, int n1, int sign) {
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_plan plan = (n1 == 1) ? fftw_plan_dft_1d(n0, p, p, sign, FFTW_ESTIMATE)
                               : fftw_plan_dft_2d(n0, n1, p, p, sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

// Forward DFT coefficients of psi (row major, unnormalized).
std::vector<Cplx> spectrum(const WaveFunction& psi) {
    std::vector<Cplx> s = psi.amp;
    fft_inplace(s, (psi.d == 2) ? psi.N : static_cast<int>(s.size()),
                (psi.d == 2) ? psi.N : 1, FFTW_FORWARD);
    return s;
}

// Fraction of spectral mass with some axis frequency outside |K| <= N/4.
double out_of_band_fraction(const std::vector<Cplx>& spec, int d, int N) {
    double total = 0.0, outside = 0.0;
    const int quarter = N / 4;
    for (std::size_t flat = 0; flat < spec.size(); ++flat) {
        const double m = std::norm(spec[flat]);
        total += m;
        std::size_t rest = flat;
        bool out = false;
        for (int a = 0; a < d; ++a) {
            const int k = static_cast<int>(rest % static_cast<std::size_t>(N));
            rest /= static_cast<std::size_t>(N);
            const int ks = (k <= N / 2) ? k : k - N;  // signed frequency
            if (std::abs(ks) > quarter) out = true;
        }
        if (out) outside += m;
    }
    return (total > 0.0) ? outside / total : 0.0;
}

// Trigonometric interpolation onto the half-step grid: zero-pad the spectrum
// per axis to 2N (splitting the Nyquist coefficient between +-N/2) and invert.
// Returns 2N^d values with pt[2j] = psi[j] exactly.
std::vector<Cplx> half_grid(const std::vector<Cplx>& spec, int d, int N) {
    const int M = 2 * N;
    // Per-axis padding map: original index K -> list of (target, weight).
    struct Target {
        int idx;
        double w;
    };
    auto targets = [&](int k) -> std::vector<Target> {
        if (k < N / 2) return {{k, 1.0}};
        if (k > N / 2) return {{k + N, 1.0}};
        return {{N / 2, 0.5}, {N + N / 2, 0.5}};  // split Nyquist
    };
    std::vector<Cplx> padded;
    if (d == 1) {
        padded.assign(static_cast<std::size_t>(M), Cplx(0, 0));
        for (int k = 0; k < N; ++k)
            for (const Target& t : targets(k)) padded[t.idx] += t.w * spec[k];
        fft_inplace(padded, M, 1, FFTW_BACKWARD);
        for (Cplx& z : padded) z /= static_cast<double>(N);
    } else {
        padded.assign(static_cast<std::size_t>(M) * M, Cplx(0, 0));
        for (int k1 = 0; k1 < N; ++k1)
            for (int k2 = 0; k2 < N; ++k2) {
                const Cplx s = spec[static_cast<std::size_t>(k1) * N + k2];
                for (const Target& t1 : targets(k1))
                    for (const Target& t2 : targets(k2))
                        padded[static_cast<std::size_t>(t1.idx) * M + t2.idx] += t1.w * t2.w * s;
            }
        fft_inplace(padded, M, M, FFTW_BACKWARD);
        for (Cplx& z : padded) z /= static_cast<double>(N) * N;
    }
    return padded;
}

}  // namespace

double WignerFunction::mass() const {
    double s = 0.0;
    for (double w : value) s += w;
    double cell = 1.0;
    for (int a = 0; a < d; ++a) cell *= dX() * dv();
    return s * cell;
}

std::vector<double> WignerFunction::marginal_x() const {
    std::size_t nx = 1, nv = 1;
    for (int a = 0; a < d; ++a) {
        nx *= static_cast<std::size_t>(N);
        nv *= static_cast<std::size_t>(N);
    }
    double dvol = 1.0;
    for (int a = 0; a < d; ++a) dvol *= dv();
    std::vector<double> out(nx, 0.0);
    for (std::size_t j = 0; j < nx; ++j) {
        double s = 0.0;
        const double* row = value.data() + j * nv;
        for (std::size_t n = 0; n < nv; ++n) s += row[n];
        out[j] = s * dvol;
    }
    return out;
}

std::vector<double> WignerFunction::marginal_v() const {
    std::size_t nx = 1, nv = 1;
    for (int a = 0; a < d; ++a) {
        nx *= static_cast<std::size_t>(N);
        nv *= static_cast<std::size_t>(N);
    }
    double dvol = 1.0;
    for (int a = 0; a < d; ++a) dvol *= dX();
    std::vector<double> out(nv, 0.0);
    for (std::size_t j = 0; j < nx; ++j) {
        const double* row = value.data() + j * nv;
        for (std::size_t n = 0; n < nv; ++n) out[n] += row[n] * dvol;
    }
    return out;
}

WignerFunction wigner(const WaveFunction& psi, double eps) {
    if (psi.d != 1 && psi.d != 2)
        throw ConfigInvalid("wigner: only d = 1 and d = 2 grids are supported");
    if (!(eps > 0)) throw ConfigInvalid("wigner: eps must be positive");
    const int N = psi.N, half = N / 2, M = 2 * N;

    std::vector<Cplx> spec = spectrum(psi);
    const double leak = out_of_band_fraction(spec, psi.d, N);
    if (leak > 1e-8)
        throw GridTooCoarse("wigner: spectral mass outside the central half-band is " +
                            std::to_string(leak) + " (> 1e-8); refine the grid");
    std::vector<Cplx> pt = half_grid(spec, psi.d, N);

    WignerFunction W;
    W.d = psi.d;
    W.N = N;
    W.eps = eps;
    W.h = psi.h;
    W.X.resize(N);
    W.v.resize(N);
    for (int j = 0; j < N; ++j) W.X[j] = eps * psi.coord(j);
    for (int i = 0; i < N; ++i) W.v[i] = static_cast<double>(i - half) / (N * psi.h);

    const double scale = std::pow(eps, -psi.d);

    if (psi.d == 1) {
        W.value.assign(static_cast<std::size_t>(N) * N, 0.0);
        std::vector<Cplx> g(N), G(N);
        fftw_plan plan =
            fftw_plan_dft_1d(N, reinterpret_cast<fftw_complex*>(g.data()),
                             reinterpret_cast<fftw_complex*>(G.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
        for (int j = 0; j < N; ++j) {
            std::fill(g.begin(), g.end(), Cplx(0, 0));
            for (int m = -half; m <= half; ++m) {
                const Cplx c = std::conj(pt[wrap(2 * j + m, M)]) * pt[wrap(2 * j - m, M)];
                g[wrap(m, N)] += (std::abs(m) == half ? 0.5 : 1.0) * c;
            }
            fftw_execute(plan);
            for (int i = 0; i < N; ++i)
                W.value[static_cast<std::size_t>(j) * N + i] =
                    scale * psi.h * G[wrap(i - half, N)].real();
        }
        fftw_destroy_plan(plan);
    } else {
        W.value.assign(static_cast<std::size_t>(N) * N * N * N, 0.0);
        std::vector<Cplx> g(static_cast<std::size_t>(N) * N), G(g.size());
        fftw_plan plan =
            fftw_plan_dft_2d(N, N, reinterpret_cast<fftw_complex*>(g.data()),
                             reinterpret_cast<fftw_complex*>(G.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
        const double h2 = psi.h * psi.h;
        for (int j1 = 0; j1 < N; ++j1)
            for (int j2 = 0; j2 < N; ++j2) {
                std::fill(g.begin(), g.end(), Cplx(0, 0));
                for (int m1 = -half; m1 <= half; ++m1) {
                    const double w1 = (std::abs(m1) == half) ? 0.5 : 1.0;
                    const int ap1 = wrap(2 * j1 + m1, M), am1 = wrap(2 * j1 - m1, M);
                    for (int m2 = -half; m2 <= half; ++m2) {
                        const double w2 = (std::abs(m2) == half) ? 0.5 : 1.0;
                        const Cplx c =
                            std::conj(pt[static_cast<std::size_t>(ap1) * M + wrap(2 * j2 + m2, M)]) *
                            pt[static_cast<std::size_t>(am1) * M + wrap(2 * j2 - m2, M)];
                        g[static_cast<std::size_t>(wrap(m1, N)) * N + wrap(m2, N)] += w1 * w2 * c;
                    }
                }
                fftw_execute(plan);
                double* row =
                    W.value.data() + (static_cast<std::size_t>(j1) * N + j2) * N * N;
                for (int i1 = 0; i1 < N; ++i1)
                    for (int i2 = 0; i2 < N; ++i2)
                        row[static_cast<std::size_t>(i1) * N + i2] =
                            scale * h2 *
                            G[static_cast<std::size_t>(wrap(i1 - half, N)) * N + wrap(i2 - half, N)]
                                .real();
            }
        fftw_destroy_plan(plan);
    }
    return W;
}

std::vector<double> momentum_density(const WaveFunction& psi) {
    std::vector<Cplx> spec = spectrum(psi);
    const int N = psi.N, half = N / 2;
    const double amp2 = psi.cell() * psi.cell();  // |psi_hat|^2 = h^{2d} |DFT|^2
    std::vector<double> out(spec.size(), 0.0);
    if (psi.d == 1) {
        for (int i = 0; i < N; ++i) out[i] = amp2 * std::norm(spec[wrap(i - half, N)]);
    } else {
        for (int i1 = 0; i1 < N; ++i1)
            for (int i2 = 0; i2 < N; ++i2)
                out[static_cast<std::size_t>(i1) * N + i2] =
                    amp2 * std::norm(spec[static_cast<std::size_t>(wrap(i1 - half, N)) * N +
                                          wrap(i2 - half, N)]);
    }
    return out;
}

namespace {

// <O, W_hat> for the separable observable on the discrete momentum torus:
// sum over xi_m = 2 m dv and v_n of O(|xi|,|v|) conj(phi_hat(v-m dv)) phi_hat(v+m dv).
Cplx pairing(const std::vector<Cplx>& hat, int d, int N, double dv, const Observable& obs) {
    const int half = N / 2;
    Cplx total(0.0, 0.0);
    const double dxi = 2.0 * dv;
    if (d == 1) {
        for (int m = -half; m < half; ++m) {
            const double oxi = obs.xi_part(std::abs(2.0 * m * dv));
            if (oxi == 0.0) continue;
            for (int n = -half; n < half; ++n) {
                const double ov = obs.v_part(std::abs(n * dv));
                if (ov == 0.0) continue;
                total += oxi * ov * std::conj(hat[wrap(n - m, N)]) * hat[wrap(n + m, N)];
            }
        }
        return total * dxi * dv;
    }
    for (int m1 = -half; m1 < half; ++m1)
        for (int m2 = -half; m2 < half; ++m2) {
            const double oxi =
                obs.xi_part(2.0 * dv * std::sqrt(double(m1) * m1 + double(m2) * m2));
            if (oxi == 0.0) continue;
            for (int n1 = -half; n1 < half; ++n1)
                for (int n2 = -half; n2 < half; ++n2) {
                    const double ov =
                        obs.v_part(dv * std::sqrt(double(n1) * n1 + double(n2) * n2));
                    if (ov == 0.0) continue;
                    const Cplx a = hat[static_cast<std::size_t>(wrap(n1 - m1, N)) * N +
                                       wrap(n2 - m2, N)];
                    const Cplx b = hat[static_cast<std::size_t>(wrap(n1 + m1, N)) * N +
                                       wrap(n2 + m2, N)];
                    total += oxi * ov * std::conj(a) * b;
                }
        }
    return total * dxi * dxi * dv * dv;
}

}  // namespace

WignerContinuityReport wigner_continuity_check(const WaveFunction& psi1,
                                               const WaveFunction& psi2,
                                               const Observable& obs) {
    if (!psi1.same_grid(psi2)) throw ConfigInvalid("continuity check: grids differ");
    if (psi1.d != 1 && psi1.d != 2)
        throw ConfigInvalid("continuity check: only d = 1 and d = 2 are supported");
    const int N = psi1.N, half = N / 2;
    const double dv = 1.0 / (N * psi1.h);

    WaveFunction sum = psi1 + psi2;
    std::vector<Cplx> hat1 = spectrum(psi1), hatS = spectrum(sum);
    const double cell = psi1.cell();
    for (Cplx& z : hat1) z *= cell;  // psi_hat values on the DFT grid
    for (Cplx& z : hatS) z *= cell;

    WignerContinuityReport rep;
    rep.norm1 = psi1.norm2();
    rep.norm2 = psi2.norm2();
    rep.lhs = std::abs(pairing(hatS, psi1.d, N, dv, obs) - pairing(hat1, psi1.d, N, dv, obs));

    // integral of sup_v |O| over xi, and sup over the v grid.
    double sup_v = 0.0;
    for (int n = 0; n <= half; ++n) sup_v = std::max(sup_v, std::abs(obs.v_part(n * dv)));
    double xi_int = 0.0;
    const double dxi = 2.0 * dv;
    if (psi1.d == 1) {
        for (int m = -half; m < half; ++m) xi_int += std::abs(obs.xi_part(std::abs(2.0 * m * dv)));
        xi_int *= dxi;
    } else {
        for (int m1 = -half; m1 < half; ++m1)
            for (int m2 = -half; m2 < half; ++m2)
                xi_int +=
                    std::abs(obs.xi_part(2.0 * dv * std::sqrt(double(m1) * m1 + double(m2) * m2)));
        xi_int *= dxi * dxi;
    }
    rep.rhs = 2.0 * xi_int * sup_v * std::sqrt((rep.norm1 + rep.norm2) * rep.norm2);
    rep.ratio = (rep.rhs > 0.0) ? rep.lhs / rep.rhs : 0.0;
    rep.holds = rep.lhs <= rep.rhs + 1e-14;
    return rep;
}

}  // namespace qdiff
