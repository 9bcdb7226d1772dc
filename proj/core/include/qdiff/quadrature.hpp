#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace qdiff {

using Cplx = std::complex<double>;

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
};

struct CQuadResult {
    Cplx value{0.0, 0.0};
    double error = 0.0;
};

// Adaptive Gauss-Kronrod on a finite interval.  Throws QuadratureFailure if
// the error estimate cannot be pushed below max(abs_tol, rel_tol*|I|).
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-10, double abs_tol = 1e-14);

// Same, complex-valued integrand (real and imaginary parts integrated jointly).
CQuadResult integrate_c(const std::function<Cplx(double)>& f, double a, double b,
                        double rel_tol = 1e-10, double abs_tol = 1e-14);

// Complex integrand with interior breakpoints (chunk-wise adaptive rule).
CQuadResult integrate_c(const std::function<Cplx(double)>& f, double a, double b,
                        const std::vector<double>& breaks, double rel_tol = 1e-10);

// Integral over [a, inf) of a decaying integrand.  Algebraic decay faster
// than 1/x is enough: the tail is mapped to (0, 1/a] by x -> 1/s, which turns
// power decay into an integrable endpoint singularity handled by tanh-sinh.
QuadResult integrate_to_inf(const std::function<double(double)>& f, double a,
                            double rel_tol = 1e-10);

// Principal value of  int_0^inf g(e)/(alpha - e) de  for alpha > 0 and g
// continuously differentiable near alpha.  Uses the symmetric-window
// subtraction: on [0, 2*alpha] the constant g(alpha) integrates to zero, so
//   PV = int_0^{2a} (g(e)-g(a))/(a-e) de + int_{2a}^inf g(e)/(a-e) de .
double principal_value_halfline(const std::function<double(double)>& g,
                                double alpha, double rel_tol = 1e-9);

// Integrate f over [a,b] with interior breakpoints (refinement hints around
// near-singular scales); breakpoints outside (a,b) are ignored.
QuadResult integrate_split(const std::function<double(double)>& f, double a,
                           double b, const std::vector<double>& breaks,
                           double rel_tol = 1e-10);

// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1] (n <= 64),
// for fixed-order tensor grids.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace qdiff
