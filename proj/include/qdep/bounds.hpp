#pragma once

#include "qdep/extremal.hpp"
#include "qdep/models.hpp"
#include "qdep/numerics.hpp"

namespace qdep {

// Holder-conjugate exponents with 1/p + 1/q = 1 (both in (1, inf)).
struct ExponentPair {
    double p;
    double q;

    explicit ExponentPair(double p_);      // q = p/(p-1)
    ExponentPair(double p_, double q_);    // validates conjugacy to 1e-12
};

// A_p[Z] = E[|Z - E Z|^p]^(1/p); closed form 1/(2(p+1)^(1/p)) for the
// uniform marginal, finite sum for discrete ones.
double abs_central_moment(const Marginal& m, double p);

// A_q of the indicator 1{Y > y} given g = G(y): kappa_q(g)^(1/q).
double indicator_moment(double g, double q);

// Cov[X, beta(Y)] through the threshold representation:
// integral of Cov[X, 1{Y > y}] d beta(y).
double hoeffding_cov(const JointModel& jm, const Distortion& beta,
                     const Tolerance& tol = {});

// QDE dependence coefficient: sup over {y : G(y) in (0,1)} of
// |Cov[X, 1{Y>y}]| / (A_p[X] A_q[1{Y>y}]).
double qde_dependence_coefficient(const JointModel& jm, const ExponentPair& pq,
                                  const Tolerance& tol = {});

// QDE Gruss factor: A_p[X] * integral of A_q[1{Y>y}] d|beta|(y).
double qde_gruss_factor(const JointModel& jm, const Distortion& beta,
                        const ExponentPair& pq, const Tolerance& tol = {});

struct Box {
    double a, A; // X support bounds
    double b, B; // beta(Y) support bounds
};

struct ClassicalBounds {
    double cauchy_schwarz = 0.0; // sqrt(Var X) sqrt(Var beta(Y))
    double gruss = 0.0;          // (A-a)(B-b)/4
    double corr_form = 0.0;      // |Corr[X,Y]| (A-a)(B-b)/4
};

// Throws BoxViolation when the model's support exceeds the stated box.
ClassicalBounds classical_bounds(const JointModel& jm, const Distortion& beta,
                                 const Box& box, const Tolerance& tol = {});

struct RegressionBoundResult {
    double delta_p = 0.0; // A_p[r(V)] / A_p[U]
    double gamma_p = 0.0; // A_p[U] A_q[beta(V)]
    double bound = 0.0;   // delta_p * gamma_p
};

RegressionBoundResult regression_bound(const JointModel& jm, const Distortion& beta,
                                       const ExponentPair& pq, const Tolerance& tol = {});

// Pearson correlation and the variance-ratio Gruss factor of the
// correlation form. Their product reproduces the covariance only when the
// regression of X on Y is linear; the report carries the comparison.
struct GrussFormReport {
    double corr = 0.0;
    double g0 = 0.0;
    double product = 0.0;   // corr * g0
    double exact_cov = 0.0; // quadrature value for comparison
    bool linear_regression_consistent = false;
};

GrussFormReport gruss_form(const JointModel& jm, const Distortion& beta,
                           const Tolerance& tol = {});

// Everything the CLI prints for one (model, distortion, p) query.
struct BoundReport {
    double exact_cov = 0.0;
    double cauchy_schwarz = 0.0;
    double gruss = 0.0;
    double corr_form = 0.0;
    double qde_dependence = 0.0; // D_p
    double qde_factor = 0.0;     // G_p
    double qde_bound = 0.0;      // D_p * G_p
    double regression_delta = 0.0;
    double regression_gamma = 0.0;
    double regression_bound = 0.0;
};

BoundReport bound_report(const JointModel& jm, const Distortion& beta,
                         const ExponentPair& pq, const Box& box,
                         const Tolerance& tol = {});

} // namespace qdep
