#include "qdiff/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qdiff/errors.hpp"
#include "qdiff/parallel.hpp"
#include "qdiff/quadrature.hpp"
#include "qdiff/rng.hpp"
#include "qdiff/self_energy.hpp"

namespace qdiff {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

double sphere_surface(int d) {
    return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

double coarea_bracket(const std::function<double(double)>& h_radial, double e,
                      int d) {
    if (e < 0.0) throw HypothesisViolated("coarea_bracket: e must be >= 0");
    const double r = std::sqrt(2.0 * e);
    return std::pow(2.0 * e, 0.5 * d - 1.0) * sphere_surface(d) * h_radial(r);
}

SigmaMoments sigma_moments(double e, const RadialProfile& profile, int d) {
    if (e <= 0.0) throw HypothesisViolated("sigma_moments: e must be > 0");
    SigmaMoments m;
    // sigma0 from the same angular integral as the self-energy weight, so the
    // identity sigma0 = -2 Im theta holds to quadrature precision.
    m.sigma0 = kTwoPi * coarea_weight(e, profile, d);

    // First moment: ring * int B^2(sqrt(2e) sqrt(2-2c)) c (1-c^2)^{(d-3)/2} dc.
    const double r = std::sqrt(2.0 * e);
    const double ring = (d == 2) ? 2.0 : sphere_surface(d - 1);
    const double p = 0.5 * (d - 3.0);
    const QuadResult s1 = integrate_split(
        [&](double c) {
            const double chord = std::sqrt(std::max(2.0 - 2.0 * c, 0.0));
            const double b = profile.f(r * chord);
            const double w = (d == 3) ? 1.0 : std::pow(std::max(1.0 - c * c, 0.0), p);
            return b * b * c * w;
        },
        -1.0, 1.0, {0.0, 0.9, 0.99, 0.999}, 1e-10);
    m.sigma1 = kTwoPi * std::pow(2.0 * e, 0.5 * d - 1.0) * ring * s1.value;
    return m;
}

Vec EnergyShellState::momentum() const {
    Vec p = direction;
    const double r = std::sqrt(2.0 * e);
    for (int i = 0; i < p.d; ++i) p.x[static_cast<size_t>(i)] *= r;
    return p;
}

Vec EnergyShellState::velocity() const {
    Vec v = momentum();
    for (int i = 0; i < v.d; ++i) v.x[static_cast<size_t>(i)] /= kTwoPi;
    return v;
}

Vec Trajectory::direction_at(double t) const {
    size_t i = static_cast<size_t>(
        std::upper_bound(jump_times.begin(), jump_times.end(), t) -
        jump_times.begin());
    return directions[i];
}

Vec Trajectory::position_at(double t) const {
    const double speed = std::sqrt(2.0 * e) / kTwoPi;
    Vec x;
    x.d = d;
    double prev = 0.0;
    for (size_t i = 0; i < directions.size(); ++i) {
        const double seg_end = (i < jump_times.size()) ? jump_times[i] : t_max;
        const double hi = std::min(seg_end, t);
        if (hi > prev) {
            for (int c = 0; c < d; ++c)
                x.x[static_cast<size_t>(c)] +=
                    speed * (hi - prev) * directions[i].x[static_cast<size_t>(c)];
        }
        if (seg_end >= t) break;
        prev = seg_end;
    }
    return x;
}

namespace {

// Shared per-shell sampling constants.
struct ShellSampler {
    double e = 0, r = 0;
    double sigma0 = 0;
    double wmax = 0;  // max over c of |Bhat(r sqrt(2-2c))|^2

    ShellSampler(double e_, const RadialProfile& profile, int d) : e(e_) {
        r = std::sqrt(2.0 * e);
        sigma0 = sigma_moments(e, profile, d).sigma0;
        if (sigma0 <= 0.0)
            throw HypothesisViolated("jump chain: vanishing collision rate");
        for (int i = 0; i <= 4096; ++i) {
            const double c = -1.0 + 2.0 * i / 4096.0;
            const double b = profile.f(r * std::sqrt(std::max(2.0 - 2.0 * c, 0.0)));
            wmax = std::max(wmax, b * b);
        }
        wmax *= 1.0 + 1e-12;
    }
};

Vec sample_direction(RngStream& rng, const ShellSampler& shell,
                     const RadialProfile& profile, int d, const Vec& prev) {
    // Uniform-sphere proposal; acceptance |Bhat(r|phi - prev|)|^2 / wmax.
    // The accepted proposal itself is the new direction.
    for (long iter = 0; iter < 100000000L; ++iter) {
        Vec cand = rng.sphere(d);
        double c = 0.0;
        for (int i = 0; i < d; ++i)
            c += cand.x[static_cast<size_t>(i)] * prev.x[static_cast<size_t>(i)];
        const double chord = std::sqrt(std::max(2.0 - 2.0 * c, 0.0));
        const double b = profile.f(shell.r * chord);
        if (rng.uniform() * shell.wmax <= b * b) return cand;
    }
    throw Error("jump chain: rejection sampler stalled (degenerate profile)");
}

Trajectory simulate(const ShellSampler& shell, double t_max, uint64_t seed,
                    uint64_t stream, const RadialProfile& profile, int d) {
    RngStream rng(seed, stream);
    Trajectory tr;
    tr.e = shell.e;
    tr.d = d;
    tr.seed = seed;
    tr.t_max = t_max;
    Vec dir = rng.sphere(d);
    tr.directions.push_back(dir);
    double t = rng.exponential(shell.sigma0);
    while (t < t_max) {
        dir = sample_direction(rng, shell, profile, d, dir);
        tr.jump_times.push_back(t);
        tr.directions.push_back(dir);
        t += rng.exponential(shell.sigma0);
    }
    return tr;
}

}  // namespace

Trajectory sample_jump_chain(double e, double t_max, uint64_t seed,
                             const RadialProfile& profile, int d) {
    if (e <= 0.0 || t_max <= 0.0)
        throw HypothesisViolated("sample_jump_chain: e and t_max must be > 0");
    const ShellSampler shell(e, profile, d);
    return simulate(shell, t_max, seed, 0, profile, d);
}

AutocorrCurve autocorrelation(double e, const std::vector<double>& lags,
                              int n_traj, uint64_t seed,
                              const RadialProfile& profile, int d,
                              unsigned workers) {
    if (n_traj < 100) throw InsufficientSamples("autocorrelation: n_traj too small");
    const ShellSampler shell(e, profile, d);
    const SigmaMoments sm = sigma_moments(e, profile, d);
    const double rate = sm.sigma0 - sm.sigma1;
    double t_max = 0.0;
    for (double l : lags) t_max = std::max(t_max, l);
    t_max += 1e-9;

    const size_t nl = lags.size();
    std::vector<double> sum(nl, 0.0), sum2(nl, 0.0);
    std::vector<std::vector<double>> partial(static_cast<size_t>(n_traj));

    run_indexed_tasks(static_cast<size_t>(n_traj), workers, [&](size_t i) {
        Trajectory tr = simulate(shell, t_max, seed, i, profile, d);
        std::vector<double> row(nl);
        const Vec d0 = tr.directions.front();
        for (size_t j = 0; j < nl; ++j) {
            const Vec dt = tr.direction_at(lags[j]);
            double c = 0.0;
            for (int a = 0; a < d; ++a)
                c += d0.x[static_cast<size_t>(a)] * dt.x[static_cast<size_t>(a)];
            row[j] = 2.0 * e * c;  // p(t).p(0) = 2e * cos(angle)
        }
        partial[i] = std::move(row);
    });
    for (const auto& row : partial)
        for (size_t j = 0; j < nl; ++j) {
            sum[j] += row[j];
            sum2[j] += row[j] * row[j];
        }

    AutocorrCurve out;
    out.lag = lags;
    out.predicted_rate = rate;
    out.value.resize(nl);
    out.sterr.resize(nl);
    for (size_t j = 0; j < nl; ++j) {
        const double m = sum[j] / n_traj;
        const double var = std::max(sum2[j] / n_traj - m * m, 0.0);
        out.value[j] = m;
        out.sterr[j] = std::sqrt(var / n_traj);
    }

    // Least-squares slope of log(value/2e) over lags with solid signal.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int pts = 0;
    double resid = 0.0;
    for (size_t j = 0; j < nl; ++j) {
        const double pred = 2.0 * e * std::exp(-rate * lags[j]);
        resid = std::max(resid, std::abs(out.value[j] - pred) / pred);
        if (out.value[j] > 5.0 * out.sterr[j] && out.value[j] > 0.0) {
            const double y = std::log(out.value[j] / (2.0 * e));
            sx += lags[j];
            sy += y;
            sxx += lags[j] * lags[j];
            sxy += lags[j] * y;
            ++pts;
        }
    }
    out.fit_residual = resid;
    if (pts >= 2 && sxx * pts - sx * sx > 0)
        out.fitted_rate = -(sxy * pts - sx * sy) / (sxx * pts - sx * sx);
    return out;
}

ValueWithError diffusion_constant(double e, const RadialProfile& profile, int d,
                                  DiffusionMode mode, int n_traj, uint64_t seed,
                                  unsigned workers) {
    const SigmaMoments sm = sigma_moments(e, profile, d);
    const double rate = sm.sigma0 - sm.sigma1;
    if (rate <= 0.0)
        throw HypothesisViolated("diffusion_constant: non-mixing kernel");
    if (mode == DiffusionMode::ClosedForm) {
        return {2.0 * e / (kTwoPi * kTwoPi * d * rate), 0.0};
    }
    if (n_traj < 100)
        throw InsufficientSamples("diffusion_constant: n_traj too small");

    // Per-trajectory exact time integral of p(t).p(0) up to T = 10/rate
    // (truncation bias e^{-10} relative, far below the statistical error).
    const double T = 10.0 / rate;
    const ShellSampler shell(e, profile, d);
    std::vector<double> vals(static_cast<size_t>(n_traj));
    run_indexed_tasks(static_cast<size_t>(n_traj), workers, [&](size_t i) {
        Trajectory tr = simulate(shell, T, seed, i, profile, d);
        const Vec d0 = tr.directions.front();
        double acc = 0.0;
        double prev = 0.0;
        for (size_t s = 0; s < tr.directions.size(); ++s) {
            const double seg_end =
                (s < tr.jump_times.size()) ? tr.jump_times[s] : T;
            double c = 0.0;
            for (int a = 0; a < d; ++a)
                c += d0.x[static_cast<size_t>(a)] *
                     tr.directions[s].x[static_cast<size_t>(a)];
            acc += 2.0 * e * c * (seg_end - prev);
            prev = seg_end;
        }
        vals[i] = acc / (kTwoPi * kTwoPi * d);
    });
    double m = 0, m2 = 0;
    for (double v : vals) m += v;
    m /= n_traj;
    for (double v : vals) m2 += (v - m) * (v - m);
    const double sderr = std::sqrt(m2 / (static_cast<double>(n_traj) - 1)) /
                         std::sqrt(static_cast<double>(n_traj));
    return {m, sderr};
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double stat = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        stat = std::max(stat, std::max(std::abs(F - lo), std::abs(hi - F)));
    }
    return stat;
}

double ks_p_value(double stat, int n) {
    const double rootn = std::sqrt(static_cast<double>(n));
    const double x = stat * (rootn + 0.12 + 0.11 / rootn);
    // Kolmogorov tail 2 sum (-1)^{j-1} exp(-2 j^2 x^2).
    double p = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * std::exp(-2.0 * j * j * x * x);
        p += (j % 2 == 1) ? term : -term;
        if (term < 1e-12) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

HeatCompareReport heat_compare(double e, double T, int n_traj, uint64_t seed,
                               const RadialProfile& profile, int d,
                               unsigned workers) {
    if (n_traj < 1000)
        throw InsufficientSamples("heat_compare: n_traj too small for KS testing");
    const ShellSampler shell(e, profile, d);
    const SigmaMoments sm = sigma_moments(e, profile, d);
    const double rate = sm.sigma0 - sm.sigma1;
    const double D = 2.0 * e / (kTwoPi * kTwoPi * d * rate);

    std::vector<std::vector<double>> coord(
        static_cast<size_t>(d), std::vector<double>(static_cast<size_t>(n_traj)));
    std::vector<double> jumps(static_cast<size_t>(n_traj));
    run_indexed_tasks(static_cast<size_t>(n_traj), workers, [&](size_t i) {
        Trajectory tr = simulate(shell, T, seed, i, profile, d);
        const Vec x = tr.position_at(T);
        for (int a = 0; a < d; ++a)
            coord[static_cast<size_t>(a)][i] = x.x[static_cast<size_t>(a)];
        jumps[i] = static_cast<double>(tr.jump_times.size());
    });

    HeatCompareReport rep;
    rep.e = e;
    rep.T = T;
    rep.d = d;
    rep.n_traj = n_traj;
    rep.D = D;
    rep.var_expected = 2.0 * D * T;
    for (double j : jumps) rep.mean_jumps += j;
    rep.mean_jumps /= n_traj;

    const double sd = std::sqrt(rep.var_expected);
    auto gauss_cdf = [sd](double x) {
        return 0.5 * (1.0 + std::erf(x / (sd * std::sqrt(2.0))));
    };

    double var_acc = 0.0, msd = 0.0;
    rep.ks_p_min = 1.0;
    for (int a = 0; a < d; ++a) {
        const auto& xs = coord[static_cast<size_t>(a)];
        double m = 0, v = 0;
        for (double x : xs) m += x;
        m /= n_traj;
        for (double x : xs) v += (x - m) * (x - m);
        v /= (static_cast<double>(n_traj) - 1);
        var_acc += v;
        for (double x : xs) msd += x * x;
        const double stat = ks_statistic(xs, gauss_cdf);
        rep.ks_stat_max = std::max(rep.ks_stat_max, stat);
        rep.ks_p_min = std::min(rep.ks_p_min, ks_p_value(stat, n_traj));
    }
    rep.var_per_coord = var_acc / d;
    rep.var_rel_err =
        std::abs(rep.var_per_coord - rep.var_expected) / rep.var_expected;
    rep.msd = msd / n_traj;
    rep.msd_expected = 2.0 * d * D * T;
    return rep;
}

std::string to_json(const HeatCompareReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"e\":" << r.e << ",\"T\":" << r.T << ",\"d\":" << r.d
       << ",\"n_traj\":" << r.n_traj << ",\"D\":" << r.D
       << ",\"var_expected\":" << r.var_expected
       << ",\"var_per_coord\":" << r.var_per_coord
       << ",\"var_rel_err\":" << r.var_rel_err << ",\"msd\":" << r.msd
       << ",\"msd_expected\":" << r.msd_expected
       << ",\"ks_stat_max\":" << r.ks_stat_max << ",\"ks_p_min\":" << r.ks_p_min
       << ",\"mean_jumps\":" << r.mean_jumps << "}";
    return os.str();
}

}  // namespace qdiff
