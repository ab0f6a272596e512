#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qdep/errors.hpp"

namespace qdep {

// Accuracy request shared by the scalar routines below.
// abs_tol > 0, rel_tol >= 0, max_subdivisions >= 1.
struct Tolerance {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 60;

    void validate() const;
};

using ScalarFn = std::function<double(double)>;

// Adaptive Gauss-Kronrod (G7/K15) quadrature of f over [lo, hi].
//
// The returned value I satisfies |I - integral| <= abs_tol + rel_tol*|I|
// for piecewise-smooth f. Known kink locations should be passed in
// `split_points`; the integrator never straddles them, so each piece is
// smooth. Points outside (lo, hi) are ignored.
//
// Throws NonConvergence when a piece needs more than
// tol.max_subdivisions bisections, DomainError when lo > hi.
double integrate(const ScalarFn& f, double lo, double hi,
                 const Tolerance& tol = {},
                 std::span<const double> split_points = {});

// Bracketing root finder: bisection with secant acceleration.
// Requires f(lo)*f(hi) <= 0; stops when the bracket width is <= abs_tol
// or an exact zero is hit. Throws NoSignChange otherwise.
double find_root(const ScalarFn& f, double lo, double hi,
                 const Tolerance& tol = {});

struct Extremum {
    double argmax = 0.0;
    double max = 0.0;
};

// Golden-section maximization of a unimodal f on [lo, hi];
// contracts the bracket to width <= abs_tol.
Extremum maximize_unimodal(const ScalarFn& f, double lo, double hi,
                           const Tolerance& tol = {});

} // namespace qdep
