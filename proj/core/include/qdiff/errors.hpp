#pragma once

#include <stdexcept>
#include <string>

namespace qdiff {

// Base class for all library errors so callers can catch one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Enumeration budget exhausted (permutation streams, subdeterminant scans, ...).
struct BudgetExceeded : Error {
    using Error::Error;
};

// An adaptive quadrature failed to reach the requested tolerance.
struct QuadratureFailure : Error {
    using Error::Error;
};

// Momentum bookkeeping: transfer sums that must vanish do not.
struct AuxiliarySumNonzero : Error {
    using Error::Error;
};

// A partition operation required an even partition but got an odd one.
struct NotEven : Error {
    using Error::Error;
};

// Lump split request does not partition the lump.
struct BadSplit : Error {
    using Error::Error;
};

// A bound evaluated to a non-finite or non-positive value where it must not.
struct DivergentBound : Error {
    using Error::Error;
};

// Two propagator frequencies closer than the stable-evaluation threshold
// (the divided-difference evaluator switches to a confluent expansion first;
// this is raised only if even that is impossible).
struct DegenerateFrequencies : Error {
    using Error::Error;
};

// Estimate hypotheses violated (e.g. scale window for the resolvent bounds).
struct HypothesisViolated : Error {
    using Error::Error;
};

// Coupling exponent outside the window where the total bound is summable.
struct KappaTooLarge : Error {
    using Error::Error;
};

// Tabulated dispersion queried outside its momentum range.
struct OutOfTable : Error {
    using Error::Error;
};

// Monte Carlo estimator asked to report with too few samples.
struct InsufficientSamples : Error {
    using Error::Error;
};

// CLI/config validation failure.
struct ConfigInvalid : Error {
    using Error::Error;
};

// Wave-function grid cannot resolve the requested transform.
struct GridTooCoarse : Error {
    using Error::Error;
};

// Split-step time step too large for the current potential/bandwidth.
struct StepTooLarge : Error {
    using Error::Error;
};

}  // namespace qdiff
