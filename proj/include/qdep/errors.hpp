#pragma once

#include <stdexcept>
#include <string>

namespace qdep {

// Base for every library error so callers can catch one type at the CLI edge.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Arguments outside the documented domain (unit square, malformed intervals, ...).
struct DomainError : Error {
    using Error::Error;
};

// Adaptive quadrature exhausted its subdivision budget.
struct NonConvergence : Error {
    using Error::Error;
};

// Root bracketing failed: f(lo) and f(hi) have the same strict sign.
struct NoSignChange : Error {
    using Error::Error;
};

// Convex-combination weights negative or not normalized.
struct WeightError : Error {
    using Error::Error;
};

// No interval with a strictly positive QDE curve could be located.
struct NoPositiveInterval : Error {
    using Error::Error;
};

// Conditional-cdf inversion failed while sampling; indicates a copula bug.
struct InversionFailure : Error {
    using Error::Error;
};

// The kappa-constant denominator vanished on the probe grid.
struct DegenerateRatio : Error {
    using Error::Error;
};

// A documented operation precondition was violated.
struct PreconditionError : Error {
    using Error::Error;
};

// Claimed support box does not contain the actual support.
struct BoxViolation : Error {
    using Error::Error;
};

} // namespace qdep
