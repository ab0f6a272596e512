#pragma once

#include <optional>

#include "qdep/errors.hpp"

namespace qdep {

// kappa_p(x) = x(1-x)^p + (1-x)x^p, the kernel of the sharp central-moment
// bound. Evaluated in the log domain for large p to avoid underflow.
double kappa(double p, double x);

// log(kappa_p(x)); usable far beyond the range where kappa itself is
// representable.
double log_kappa(double p, double x);

// Maximum of kappa_p over [0,1] together with its maximizer in [0,1/2]
// and the analytic enclosures used to validate the solve.
struct ExtremalMomentResult {
    double p = 0.0;
    double x_p = 0.0; // maximizer in [0, 1/2]
    double K_p = 0.0; // kappa_p(x_p)

    // Enclosure of K_p: h(1/(p+1)) <= K_p <= h(1/(p+1)) + 2^-(1+p),
    // h(x) = x(1-x)^p.
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;

    // Enclosure of x_p: 1/(p+1) <= x_p, with upper end 1/2 for p <= 3 and
    // bracket_const/(p+1) for p > 3.
    double x_bracket_lo = 0.0;
    double x_bracket_hi = 0.0;

    // Stationary point of the crossing ratio
    // R(x) = (( (1+p)x - 1 ) / ( p - (1+p)x )) / (x/(1-x))^(p-1),
    // whose unique crossing of 1 below 1/2 is x_p (p > 3 only).
    std::optional<double> xp_star;

    // 2/(1 + sqrt((p-3)/(p+1))), clamped to 2 for p < 3; x_p's enclosure
    // scales with it and (1+p)x_p <= bracket_const -> 1 as p grows.
    double bracket_const = 0.0;

    // (1+p)*x_p carried in offset form (1 + t with t = (1+p)x_p - 1 >= 0),
    // so the asymptotic ratio is exact even when t underflows.
    double scaled_x = 0.0;

    double scaled_k() const { return (1.0 + p) * K_p; }
};

// Locates x_p and K_p. Closed value x_p = 1/2 for p in [1,3]; for p > 3
// the unique root of R(x) = 1 on [1/(p+1), x_p*] is isolated by bisection
// in log(t) with t = (1+p)x - 1.
ExtremalMomentResult solve_extremum(double p);

// Edmundson-Madansky majorant of E[f(X)] for convex f given the support
// endpoints and the mean: ((A-mu)f(a) + (mu-a)f(A)) / (A-a).
double em_bound(double f_at_a, double f_at_A, double a, double A, double mu);

// What is known about the mean when bounding a central moment.
struct MeanInfo {
    enum class Kind { Exact, Interval, Unknown, Symmetric };
    Kind kind = Kind::Unknown;
    double mu = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    static MeanInfo exact(double mu);
    static MeanInfo interval(double lo, double hi);
    static MeanInfo unknown();
    static MeanInfo symmetric();
};

// Sharp upper bound for E[|X - mu|^p] over laws supported on [a, A]:
//   Exact(mu)        -> (A-a)^p kappa_p((mu-a)/(A-a))
//   Interval(lo, hi) -> (A-a)^p max kappa_p over the normalized interval
//   Unknown          -> (A-a)^p K_p
//   Symmetric        -> ((A-a)/2)^p
double central_moment_bound(double a, double A, double p, const MeanInfo& info);

} // namespace qdep
