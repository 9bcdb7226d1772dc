#include "qdiff/rng.hpp"

namespace qdiff {

// Poisson sampling: inversion by sequential search for small means,
// PTRS transformed rejection (Hoermann) for large means.
uint64_t RngStream::poisson(double mean) {
    if (mean <= 0) return 0;
    if (mean < 30.0) {
        const double L = std::exp(-mean);
        uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform_pos();
        } while (p > L);
        return k - 1;
    }
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform_pos();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<uint64_t>(kf);
        if (kf < 0 || (us < 0.013 && v > us)) continue;
        const double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * loglam - mean - std::lgamma(k + 1.0)) {
            return static_cast<uint64_t>(kf);
        }
    }
}

}  // namespace qdiff
