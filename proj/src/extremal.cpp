#include "qdep/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qdep {

namespace {

void require_p(double p) {
    if (!(p >= 1.0)) throw DomainError("extremal: requires p >= 1");
}

// x(1-x)^p via exp/log1p; accurate for any p once x is in (0,1).
double h_term(double p, double x) {
    return std::exp(std::log(x) + p * std::log1p(-x));
}

} // namespace

double kappa(double p, double x) {
    require_p(p);
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("kappa: x must be in [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    if (p <= 50.0) {
        const double y = 1.0 - x;
        return x * std::pow(y, p) + y * std::pow(x, p);
    }
    return h_term(p, x) + h_term(p, 1.0 - x);
}

double log_kappa(double p, double x) {
    require_p(p);
    if (!(x > 0.0 && x < 1.0))
        throw DomainError("log_kappa: x must be in (0,1)");
    const double a = std::log(x) + p * std::log1p(-x);
    const double b = std::log1p(-x) + p * std::log(x);
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

namespace {

// g(s) = log R(x) with s = log t, t = (1+p)x - 1. Strictly increasing on
// the rising branch of R, so a sign change brackets the crossing R = 1.
double log_ratio(double p, double s) {
    const double t = std::exp(s);
    return s - std::log(p - 1.0 - t) -
           (p - 1.0) * (std::log1p(t) - std::log(p - t));
}

} // namespace

ExtremalMomentResult solve_extremum(double p) {
    require_p(p);
    ExtremalMomentResult r;
    r.p = p;

    // K_p enclosure from h(x) = x(1-x)^p: its max on [0,1/2] sits at 1/(p+1).
    r.bracket_lo = h_term(p, 1.0 / (p + 1.0));
    r.bracket_hi = r.bracket_lo + std::exp2(-(1.0 + p));
    r.x_bracket_lo = 1.0 / (p + 1.0);

    if (p <= 3.0) {
        r.x_p = 0.5;
        r.x_bracket_hi = 0.5;
        r.bracket_const = 2.0;
        r.scaled_x = (1.0 + p) * 0.5;
        r.K_p = kappa(p, 0.5);
        return r;
    }

    const double s_star = std::sqrt((p - 3.0) / (p + 1.0));
    const double one_minus = (4.0 / (p + 1.0)) / (1.0 + s_star); // 1 - s_star, stable
    r.bracket_const = 2.0 / (1.0 + s_star);
    r.xp_star = 0.5 * one_minus;
    r.x_bracket_hi = r.bracket_const / (p + 1.0);

    // Root of R(x)=1 on the rising branch, in s = log((1+p)x - 1).
    const double t_star = one_minus / (1.0 + s_star);
    double s_hi = std::log(t_star);
    double t = 0.0;
    if (log_ratio(p, s_hi) <= 0.0) {
        // Only for p barely above 3, where the interior crossing is
        // indistinguishable from 1/2 in double precision.
        t = t_star;
    } else {
        double s_lo = std::log(std::numeric_limits<double>::min());
        if (log_ratio(p, s_lo) >= 0.0) {
            t = 0.0; // crossing below representable t; x_p collapses to 1/(p+1)
        } else {
            for (int i = 0; i < 110 && (s_hi - s_lo) > 1e-14; ++i) {
                const double mid = 0.5 * (s_lo + s_hi);
                if (log_ratio(p, mid) < 0.0) s_lo = mid;
                else s_hi = mid;
            }
            t = std::exp(0.5 * (s_lo + s_hi));
        }
    }

    r.scaled_x = 1.0 + t;
    r.x_p = r.scaled_x / (1.0 + p);
    r.K_p = kappa(p, r.x_p);
    return r;
}

double em_bound(double f_at_a, double f_at_A, double a, double A, double mu) {
    if (!(a < A)) throw DomainError("em_bound: requires a < A");
    if (!(mu >= a && mu <= A)) throw DomainError("em_bound: mean outside support");
    return ((A - mu) * f_at_a + (mu - a) * f_at_A) / (A - a);
}

MeanInfo MeanInfo::exact(double mu) { return {Kind::Exact, mu, 0.0, 0.0}; }
MeanInfo MeanInfo::interval(double lo, double hi) { return {Kind::Interval, 0.0, lo, hi}; }
MeanInfo MeanInfo::unknown() { return {Kind::Unknown, 0.0, 0.0, 0.0}; }
MeanInfo MeanInfo::symmetric() { return {Kind::Symmetric, 0.0, 0.0, 0.0}; }

double central_moment_bound(double a, double A, double p, const MeanInfo& info) {
    require_p(p);
    if (!(a < A)) throw DomainError("central_moment_bound: requires a < A");
    const double range = A - a;

    switch (info.kind) {
    case MeanInfo::Kind::Exact: {
        if (!(info.mu >= a && info.mu <= A))
            throw DomainError("central_moment_bound: mean outside support");
        return std::pow(range, p) * kappa(p, (info.mu - a) / range);
    }
    case MeanInfo::Kind::Unknown:
        return std::pow(range, p) * solve_extremum(p).K_p;
    case MeanInfo::Kind::Interval: {
        if (!(a <= info.lo && info.lo <= info.hi && info.hi <= A))
            throw DomainError("central_moment_bound: malformed mean interval");
        const double x1 = (info.lo - a) / range;
        const double x2 = (info.hi - a) / range;
        const ExtremalMomentResult ex = solve_extremum(p);
        // kappa_p rises to x_p, dips to 1/2, rises to 1-x_p, falls to 1;
        // the max over [x1,x2] is at an endpoint or at an enclosed peak.
        double best = std::max(kappa(p, x1), kappa(p, x2));
        if (ex.x_p >= x1 && ex.x_p <= x2) best = std::max(best, ex.K_p);
        const double mirror = 1.0 - ex.x_p;
        if (mirror >= x1 && mirror <= x2) best = std::max(best, ex.K_p);
        return std::pow(range, p) * best;
    }
    case MeanInfo::Kind::Symmetric:
        return std::pow(0.5 * range, p);
    }
    throw DomainError("central_moment_bound: unknown mean info kind");
}

} // namespace qdep
