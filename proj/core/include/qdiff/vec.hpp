#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>

namespace qdiff {

// Small fixed-capacity real vector for momenta / positions in d <= 8.
// Stored inline; the active dimension travels with the value.
struct Vec {
    static constexpr int kMaxDim = 8;

    std::array<double, kMaxDim> x{};
    int d = 3;

    Vec() = default;
    explicit Vec(int dim) : d(dim) { assert(dim >= 1 && dim <= kMaxDim); }
    Vec(double a, double b, double c) : d(3) { x[0] = a; x[1] = b; x[2] = c; }

    static Vec zero(int dim) { return Vec(dim); }

    double& operator[](int i) { return x[static_cast<size_t>(i)]; }
    double operator[](int i) const { return x[static_cast<size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < d; ++i) x[i] += o.x[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < d; ++i) x[i] -= o.x[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < d; ++i) x[i] *= s;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator*(Vec a, double s) { return a *= s; }
    friend Vec operator-(Vec a) { return a *= -1.0; }

    friend double dot(const Vec& a, const Vec& b) {
        double s = 0;
        for (int i = 0; i < a.d; ++i) s += a.x[i] * b.x[i];
        return s;
    }
    friend double norm2(const Vec& a) { return dot(a, a); }
    friend double norm(const Vec& a) { return std::sqrt(norm2(a)); }
};

// Kinetic energy e(p) = |p|^2 / 2.
inline double kinetic_energy(const Vec& p) { return 0.5 * norm2(p); }
inline double kinetic_energy_r(double r) { return 0.5 * r * r; }

}  // namespace qdiff
