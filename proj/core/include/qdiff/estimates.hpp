#pragma once

// Calibration checks of the propagator estimates.
//
// The statements under test are integral inequalities of the form
// LHS(alpha, q, eta) <= C * shape(alpha, q, eta) with non-explicit constants
// C.  We therefore *calibrate*: evaluate LHS by adaptive quadrature on a
// sample grid, record the largest ratio LHS/shape, and flag instability if a
// refined sample grid pushes the ratio up by more than a factor two.
//
//   logest     int |h(p-q)| / |alpha - omega(p) + i eta|      dp
//              <=  C ||h|| |log lambda| log<alpha> / (<alpha>^{1/2} <|q|-sqrt(2|alpha|)>)
//   twoAint    int |h(p-q)| / |alpha - omega(p) + i eta|^{2-a} dp
//              <=  C_a ||h|| lambda^{-2(1-a)} / (<alpha>^{a/2} <|q|-sqrt(2|alpha|)>)
//   threeAint  int |h(p-q)| / |alpha - e(p) + i eta|^{2-a}    dp
//              <=  C_a ||h|| eta^{-(1-a)}   / (<alpha>^{a/2} <|q|-sqrt(2|alpha|)>)
//   ladderint  int lambda^2 |Bhat(p-q)|^2 / |alpha - conj(omega(p)) - i eta|^2 dp
//              <=  1 + C0 lambda^{-12 kappa} (lambda + |alpha - omega(q)|^{1/2})
//
// all requiring the window lambda^2 >= eta >= lambda^{2+4 kappa}, kappa <= 1/12.
//
// The appendix integrals use the bare dispersion e(p) and the cutoff measure
// d mu = 1(|p| <= zeta) dp:
//
//   I1 = int dmu / (|alpha - e(p) + i eta| |beta - e(p+q) + i eta|)
//        <=  C zeta^{d-3} |log eta|^2 / |||q|||
//   I2 = same integrand times 1/|||p - r|||
//        <=  C eta^{-1/2} zeta^{d-3} |log eta|^2 / |||q|||
//   J  = int dmu / |alpha - e(p) + i eta| * 1/|||p - r|||
//        <=  C zeta^{d-2} |log eta|

#include <string>
#include <vector>

#include "qdiff/self_energy.hpp"
#include "qdiff/vec.hpp"

namespace qdiff {

enum class Lemma33Case { LogEst, TwoAInt, ThreeAInt, LadderInt };

const char* lemma33_case_name(Lemma33Case c);

// One evaluation of the left side (adaptive radial/angular quadrature over
// the h- or Bhat-weighted momentum integral).  `a` is the denominator
// deficit exponent for TwoAInt/ThreeAInt and ignored otherwise.
double lemma33_lhs(const Dispersion& disp, Lemma33Case tc, double alpha,
                   double qnorm, double a = 0.0);

// The right-hand shape with unit constant.
double lemma33_rhs_shape(const Dispersion& disp, Lemma33Case tc, double alpha,
                         double qnorm, double a = 0.0);

struct Lemma33Sample {
    double alpha = 0, qnorm = 0, a = 0;
    double lhs = 0, shape = 0, ratio = 0;
};

struct Lemma33Report {
    Lemma33Case testcase = Lemma33Case::LogEst;
    double eta = 0, lambda = 0, kappa = 0, a = 0;
    std::vector<Lemma33Sample> samples;
    double max_ratio = 0;          // calibration constant on the coarse grid
    double max_ratio_refined = 0;  // on a denser (alpha, q) grid
    bool stable = false;           // refined <= 2 x coarse
};

// Evaluates the selected estimate over a grid of (alpha, |q|) samples.
// Throws HypothesisViolated when eta lies outside [lambda^{2+4kappa},
// lambda^2] or kappa > 1/12.
Lemma33Report lemma33_check(const Dispersion& disp, Lemma33Case tc,
                            double a = 0.0);

std::string to_json(const Lemma33Report& r);

struct AppendixReport {
    double eta = 0, zeta = 0;
    double alpha = 0, beta = 0;
    double qnorm = 0, rnorm = 0;
    double I1 = 0, I2 = 0, J = 0;
    double I1_shape = 0, I2_shape = 0, J_shape = 0;
    double ratio1 = 0, ratio2 = 0, ratioJ = 0;
    double I1_refined = 0, I2_refined = 0, J_refined = 0;
    bool stable = false;  // refined quadrature within x2 on all three
};

// Evaluates I1, I2, J at the given external momenta; alpha, beta <= 0 select
// the on-shell defaults alpha = beta = e(q)/2 + 1/2.
AppendixReport appendix_integrals(const Vec& q, const Vec& r,
                                  const PropagatorParams& params,
                                  double alpha = -1.0, double beta = -1.0);

std::string to_json(const AppendixReport& r);

// Weighted sup norm max_p <p>^{2d} |h(p)| of a radial function, sampled on a
// log-uniform radial grid (the norm entering the lemma's right sides).
double weighted_sup_norm(const RadialProfile& h, int d);

}  // namespace qdiff
