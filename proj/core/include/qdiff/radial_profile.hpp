#pragma once

#include <cmath>
#include <functional>
#include <string>

namespace qdiff {

// Spherically symmetric profile in momentum space: r = |p| -> value.
// Used for the single-site potential form factor and the initial state.
struct RadialProfile {
    std::function<double(double)> f;
    std::string name;
    double decay_scale = 1.0;   // characteristic width; quadrature cutoffs
                                // integrate to ~ sqrt(-2 log tol) * decay_scale
    bool nonzero_at_origin = true;

    double operator()(double r) const { return f(r); }
    double squared(double r) const {
        const double v = f(r);
        return v * v;
    }

    // exp(-r^2/2): the default potential form factor.
    static RadialProfile gaussian() {
        RadialProfile p;
        p.f = [](double r) { return std::exp(-0.5 * r * r); };
        p.name = "gaussian";
        p.decay_scale = 1.0;
        return p;
    }

    // Z^{-1} exp(-r^2): the default initial state; Z normalizes
    // int |psihat_0(p)|^2 dp = 1 in the given dimension.
    static RadialProfile initial_state(int d) {
        RadialProfile p;
        // int exp(-2 r^2) d^d p = (pi/2)^{d/2}; Z = (pi/2)^{d/4}.
        const double z = std::pow(M_PI / 2.0, d / 4.0);
        p.f = [z](double r) { return std::exp(-r * r) / z; };
        p.name = "initial_state";
        p.decay_scale = 0.707;
        return p;
    }

    static RadialProfile constant(double b = 1.0) {
        RadialProfile p;
        p.f = [b](double) { return b; };
        p.name = "constant";
        p.decay_scale = 1e9;
        return p;
    }
};

}  // namespace qdiff
