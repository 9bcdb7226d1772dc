#pragma once

// Row-elimination schedule for a tower matrix and the lambda-power ledger.
//
// The propagator-bound argument integrates the k+1 momentum variables of a
// graph in the order of increasing row index.  Each row class consumes a
// fixed set of columns and produces a fixed singular factor:
//
//   peak            no integration        (one eta^{-1} from the supremum)
//   ladder block    the run's pivot columns, one per row
//   uncovered slope the pivot column; the carried singularity is spent
//   covered slope   the pivot column; a new point singularity appears,
//                   equal to the eliminated row of M with the pivot entry
//                   zeroed
//   valley          both adjacent tower columns
//   last row k+1    column k+1; no singularity may remain
//
// The schedule records, per step, the rows eliminated, the columns
// integrated, and the 0/±1 point-singularity vector carried into and out of
// the step.  Structural invariants (each row exactly once, each column
// exactly once, ladder pivots absent from every carried vector, covered
// slopes passing a ±1 entry to the next chain element) are enforced at
// generation time.

#include <string>
#include <vector>

#include "qdiff/classification.hpp"
#include "qdiff/permutation.hpp"

namespace qdiff {

enum class StepCase {
    Peak,
    LadderBlock,
    UncoveredSlope,
    CoveredSlope,
    Valley,
    Last,
};

const char* step_case_name(StepCase c);

struct ScheduleStep {
    StepCase tag = StepCase::Last;
    std::vector<int> rows;     // rows eliminated, ascending (singleton unless
                               // tag == LadderBlock)
    std::vector<int> columns;  // columns integrated (empty for peaks)
    // Carried point-singularity vectors, index 1..k+1 ([0] unused); empty
    // vector means "no singularity carried".
    std::vector<int> b_enter;
    std::vector<int> b_after;
};

struct Schedule {
    int k = 0;
    std::vector<ScheduleStep> steps;
};

Schedule schedule(const Permutation& sigma);

std::string to_json(const Schedule& s);

// Lambda-power bookkeeping of the full estimate for one permutation.
struct ExponentReport {
    int k = 0;
    int ell = 0;      // |I_l|
    int v = 0;        // |I_v|
    int s = 0;        // |I_s|
    int us = 0;       // |I_us| uncovered slopes
    int cs = 0;       // |I_cs| covered slopes
    int p = 0;        // |I_p|
    int towers = 0;   // |I_t|
    int degree = 0;

    double kappa = 0, delta = 0, c_delta = 0;
    int d = 3;

    // 2(2v+s) - (1+kappa/2)(3v+s+us) - (kappa+3delta) d (2v+s+1);
    // identity permutation: 0 (the ladder term carries no gain or loss).
    double total_lambda_power = 0;
    // 1/3 - (1+3d/2) kappa - c_delta * delta
    double per_degree = 0;
    // per_degree * degree; total_lambda_power >= simplified_bound whenever
    // kappa < 2/(6+9d) and delta is small.
    double simplified_bound = 0;
};

// c_delta < 0 selects the default bookkeeping constant 9d/2 (the smallest
// uniform constant that absorbs the (degree+1)/degree overhead of the
// delta-carrying terms for degree >= 2).
ExponentReport exponent_report(const Permutation& sigma, double kappa, int d,
                               double delta, double c_delta = -1.0);

std::string to_json(const ExponentReport& r);

// Pointwise (Method I) estimate of a single graph:  (C |log lambda|)^{k+2}
// (lambda^2/eta)^k with C = 1 and eta = lambda^{2+kappa}.
double pointwise_bound(int k, double lambda, double kappa);

// Resummed ladder (Method II) estimate:  C (1 + C lambda^{1-12 kappa})^k
// |log lambda|^2 with C = 1.  pointwise_bound exceeds this by the factor
// lambda^{-kappa k} times bookkeeping.
double ladder_sum_bound(int k, double lambda, double kappa);

}  // namespace qdiff
