#include "qdiff/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>

#include "qdiff/errors.hpp"

namespace qdiff {

namespace {
using GK31 = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr int kMaxDepth = 15;
}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol) {
    double err = 0.0, l1 = 0.0;
    const double v = GK31::integrate(f, a, b, kMaxDepth, rel_tol, &err, &l1);
    if (!std::isfinite(v)) throw QuadratureFailure("non-finite quadrature value");
    if (err > std::max(abs_tol, 1e3 * rel_tol * std::max(std::fabs(v), l1 * 1e-3))) {
        // Error estimates on oscillatory integrands are pessimistic; only a
        // grossly unconverged result is treated as failure.
        if (err > 1e-3 * std::max(1.0, l1)) {
            throw QuadratureFailure("adaptive quadrature did not converge");
        }
    }
    return {v, err};
}

CQuadResult integrate_c(const std::function<Cplx(double)>& f, double a, double b,
                        double rel_tol, double abs_tol) {
    const QuadResult re =
        integrate([&](double x) { return f(x).real(); }, a, b, rel_tol, abs_tol);
    const QuadResult im =
        integrate([&](double x) { return f(x).imag(); }, a, b, rel_tol, abs_tol);
    return {{re.value, im.value}, std::hypot(re.error, im.error)};
}

QuadResult integrate_to_inf(const std::function<double(double)>& f, double a,
                            double rel_tol) {
    if (a < 0) throw QuadratureFailure("integrate_to_inf needs a >= 0");
    if (a == 0.0) {
        // The 1/x map needs a positive start; peel off a unit head first.
        const QuadResult head = integrate(f, 0.0, 1.0, rel_tol);
        const QuadResult tail = integrate_to_inf(f, 1.0, rel_tol);
        return {head.value + tail.value, head.error + tail.error};
    }
    boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0;
    // x = 1/s maps [a, inf) to (0, 1/a]; tanh-sinh absorbs the endpoint blowup.
    const auto g = [&](double s) {
        const double x = 1.0 / s;
        return f(x) * x * x;
    };
    const double v = ts.integrate(g, 0.0, 1.0 / a, rel_tol, &err);
    if (!std::isfinite(v)) throw QuadratureFailure("non-finite tail integral");
    return {v, err * std::fabs(v)};
}

double principal_value_halfline(const std::function<double(double)>& g,
                                double alpha, double rel_tol) {
    if (alpha <= 0) throw QuadratureFailure("principal value requires alpha > 0");
    // On the pole region substitute e = u^2: coarea densities behave like
    // sqrt(e) near zero, and the substitution turns that corner into a smooth
    // function of u so the adaptive rule converges even for alpha near zero.
    //   PV int_0^E0 g(e)/(alpha-e) de = PV int_0^sqrt(E0) G(u)/(ra-u) du,
    // with ra = sqrt(alpha) and G(u) = 2u g(u^2)/(ra+u); note G(ra) = g(alpha).
    const double ra = std::sqrt(alpha);
    const auto G = [&](double u) { return 2.0 * u * g(u * u) / (ra + u); };
    const double ga = g(alpha);
    const auto reg = [&](double u) {
        const double du = ra - u;
        if (std::fabs(du) < 1e-14 * ra) {
            // Removable point: value is -G'(ra); a symmetric difference is
            // accurate enough for the isolated node that may land here.
            const double h = 1e-6 * std::max(ra, 1.0);
            return -(G(ra + h) - G(ra - h)) / (2 * h);
        }
        return (G(u) - ga) / du;
    };
    // Split at ra so the rule never straddles the removable point.
    const QuadResult left = integrate(reg, 0.0, ra, rel_tol);
    const QuadResult right = integrate(reg, ra, 2.0 * ra, rel_tol);
    // Finite stretch of the regular part before handing off to the 1/x map,
    // so small alpha does not push decades of structure into the tail rule.
    const double e_tail = std::max(64.0 * alpha, 64.0);
    const double u_hi = std::sqrt(e_tail);
    const QuadResult mid = integrate_split(
        [&](double u) { return G(u) / (ra - u); }, 2.0 * ra, u_hi,
        {4.0 * ra, 1.0, 8.0}, rel_tol);
    // Far tail in the original variable, where g is smooth and the 1/x map
    // keeps every abscissa finite.
    const QuadResult tail =
        integrate_to_inf([&](double e) { return g(e) / (alpha - e); }, e_tail,
                         rel_tol);
    return left.value + right.value + mid.value + tail.value;
}

CQuadResult integrate_c(const std::function<Cplx(double)>& f, double a, double b,
                        const std::vector<double>& breaks, double rel_tol) {
    std::vector<double> pts;
    pts.push_back(a);
    for (double p : breaks)
        if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    CQuadResult total;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] <= pts[i]) continue;
        const CQuadResult piece = integrate_c(f, pts[i], pts[i + 1], rel_tol);
        total.value += piece.value;
        total.error += piece.error;
    }
    return total;
}

QuadResult integrate_split(const std::function<double(double)>& f, double a,
                           double b, const std::vector<double>& breaks,
                           double rel_tol) {
    std::vector<double> pts;
    pts.push_back(a);
    for (double p : breaks)
        if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    QuadResult total;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] <= pts[i]) continue;
        const QuadResult piece = integrate(f, pts[i], pts[i + 1], rel_tol);
        total.value += piece.value;
        total.error += piece.error;
    }
    return total;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    // Newton iteration on Legendre polynomials; standard and exact to 1e-15.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

}  // namespace qdiff
