#include "qdep/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace qdep {

namespace {

// Inner quadratures run tighter than the caller's request so nested
// integrals do not see each other's noise.
Tolerance inner_tolerance(const Tolerance& tol) {
    Tolerance t = tol;
    t.abs_tol = std::min(tol.abs_tol, 1e-12);
    t.rel_tol = std::min(tol.rel_tol, 1e-12);
    return t;
}

double expectation_uniform(const ScalarFn& f, const Distortion& beta,
                           const Tolerance& tol) {
    return integrate(f, 0.0, 1.0, tol, beta.kinks_in(0.0, 1.0));
}

} // namespace

ExponentPair::ExponentPair(double p_) : p(p_), q(p_ / (p_ - 1.0)) {
    if (!(p_ > 1.0)) throw DomainError("ExponentPair: p must exceed 1");
}

ExponentPair::ExponentPair(double p_, double q_) : p(p_), q(q_) {
    if (!(p_ > 1.0) || !(q_ > 1.0)) throw DomainError("ExponentPair: exponents must exceed 1");
    if (std::abs(1.0 / p_ + 1.0 / q_ - 1.0) > 1e-12)
        throw DomainError("ExponentPair: 1/p + 1/q must equal 1");
}

double abs_central_moment(const Marginal& m, double p) {
    if (!(p >= 1.0)) throw DomainError("abs_central_moment: requires p >= 1");
    if (m.is_uniform()) return 0.5 / std::pow(p + 1.0, 1.0 / p);
    const double mu = m.mean();
    double acc = 0.0;
    for (std::size_t i = 0; i < m.points().size(); ++i)
        acc += m.probs()[i] * std::pow(std::abs(m.points()[i] - mu), p);
    return std::pow(acc, 1.0 / p);
}

double indicator_moment(double g, double q) {
    if (!(q > 1.0)) throw DomainError("indicator_moment: requires q > 1");
    if (!(g >= 0.0 && g <= 1.0)) throw DomainError("indicator_moment: g outside [0,1]");
    if (g == 0.0 || g == 1.0) return 0.0;
    return std::pow(kappa(q, g), 1.0 / q);
}

double hoeffding_cov(const JointModel& jm, const Distortion& beta, const Tolerance& tol) {
    if (jm.marginal_y.is_uniform()) {
        const Tolerance inner = inner_tolerance(tol);
        return expectation_uniform(
            [&](double v) { return threshold_cov(jm, v, inner) * beta.derivative(v); },
            beta, tol);
    }
    // Discrete Y: Cov[X, 1{Y > y}] is a step function of y that vanishes
    // outside the support, so the Stieltjes integral is a finite sum.
    const auto& pts = jm.marginal_y.points();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
        acc += threshold_cov(jm, pts[k], tol) * (beta(pts[k + 1]) - beta(pts[k]));
    return acc;
}

double qde_dependence_coefficient(const JointModel& jm, const ExponentPair& pq,
                                  const Tolerance& tol) {
    const double ap = abs_central_moment(jm.marginal_x, pq.p);

    if (!jm.marginal_y.is_uniform()) {
        const auto& pts = jm.marginal_y.points();
        const auto& cum = jm.marginal_y.cumulative();
        double best = 0.0;
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            if (!(cum[k] > 0.0 && cum[k] < 1.0)) continue;
            const double ratio = std::abs(threshold_cov(jm, pts[k], tol)) /
                                 (ap * indicator_moment(cum[k], pq.q));
            best = std::max(best, ratio);
        }
        return best;
    }

    // Continuous case: scan the ratio on a dense grid of G(y) = v values
    // (endpoints excluded, as the supremum is restricted to G(y) in (0,1)),
    // then polish each interior local maximum.
    const Tolerance inner = inner_tolerance(tol);
    auto ratio = [&](double v) {
        return std::abs(threshold_cov(jm, v, inner)) / (ap * indicator_moment(v, pq.q));
    };

    constexpr int kScan = 2001;
    const double lo = 1e-6, hi = 1.0 - 1e-6;
    std::vector<double> vs(kScan), rs(kScan);
    int arg = 0;
    for (int i = 0; i < kScan; ++i) {
        vs[i] = lo + (hi - lo) * i / (kScan - 1);
        rs[i] = ratio(vs[i]);
        if (rs[i] > rs[arg]) arg = i;
    }
    double best = rs[arg];
    if (best == 0.0) return 0.0; // e.g. independence

    // Polish the grid argmax plus any strict local maximum that could
    // plausibly overtake it between grid points.
    auto polish = [&](int i) {
        const double a = vs[std::max(0, i - 1)];
        const double b = vs[std::min(kScan - 1, i + 1)];
        const Extremum e = maximize_unimodal(ratio, a, b, Tolerance{1e-10, 0.0, 60});
        best = std::max(best, e.max);
    };
    polish(arg);
    for (int i = 1; i + 1 < kScan; ++i)
        if (i != arg && rs[i] > rs[i - 1] && rs[i] > rs[i + 1] && rs[i] >= 0.999 * rs[arg])
            polish(i);
    return best;
}

double qde_gruss_factor(const JointModel& jm, const Distortion& beta,
                        const ExponentPair& pq, const Tolerance& tol) {
    const double ap = abs_central_moment(jm.marginal_x, pq.p);

    if (jm.marginal_y.is_uniform()) {
        const double integral = expectation_uniform(
            [&](double v) { return indicator_moment(v, pq.q) * beta.abs_derivative(v); },
            beta, tol);
        return ap * integral;
    }
    const auto& pts = jm.marginal_y.points();
    const auto& cum = jm.marginal_y.cumulative();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
        acc += indicator_moment(cum[k], pq.q) * beta.total_variation(pts[k], pts[k + 1]);
    return ap * acc;
}

namespace {

double variance_of_distorted(const Marginal& m, const Distortion& beta,
                             const Tolerance& tol) {
    if (m.is_uniform()) {
        const double mean = expectation_uniform([&](double v) { return beta(v); }, beta, tol);
        const double second =
            expectation_uniform([&](double v) { return beta(v) * beta(v); }, beta, tol);
        return second - mean * mean;
    }
    double mean = 0.0, second = 0.0;
    for (std::size_t i = 0; i < m.points().size(); ++i) {
        const double b = beta(m.points()[i]);
        mean += m.probs()[i] * b;
        second += m.probs()[i] * b * b;
    }
    return second - mean * mean;
}

std::pair<double, double> distorted_range(const Marginal& m, const Distortion& beta) {
    // Identity and Power are monotone; piecewise-linear needs its knots.
    const double lo = m.support_lo(), hi = m.support_hi();
    double mn = std::min(beta(lo), beta(hi));
    double mx = std::max(beta(lo), beta(hi));
    if (beta.kind() == Distortion::Kind::PiecewiseLinear)
        for (double k : beta.kinks_in(lo, hi)) {
            mn = std::min(mn, beta(k));
            mx = std::max(mx, beta(k));
        }
    return {mn, mx};
}

} // namespace

ClassicalBounds classical_bounds(const JointModel& jm, const Distortion& beta,
                                 const Box& box, const Tolerance& tol) {
    constexpr double kSlack = 1e-9;
    if (jm.marginal_x.support_lo() < box.a - kSlack ||
        jm.marginal_x.support_hi() > box.A + kSlack)
        throw BoxViolation("classical_bounds: X support exceeds [a, A]");
    const auto [blo, bhi] = distorted_range(jm.marginal_y, beta);
    if (blo < box.b - kSlack || bhi > box.B + kSlack)
        throw BoxViolation("classical_bounds: beta(Y) support exceeds [b, B]");

    ClassicalBounds out;
    const double var_x = jm.marginal_x.variance();
    const double var_b = variance_of_distorted(jm.marginal_y, beta, tol);
    out.cauchy_schwarz = std::sqrt(var_x) * std::sqrt(std::max(0.0, var_b));
    out.gruss = (box.A - box.a) * (box.B - box.b) / 4.0;

    const double cov_xy = hoeffding_cov(jm, Distortion::identity(), tol);
    const double var_y = jm.marginal_y.variance();
    const double corr = cov_xy / std::sqrt(var_x * var_y);
    out.corr_form = std::abs(corr) * out.gruss;
    return out;
}

RegressionBoundResult regression_bound(const JointModel& jm, const Distortion& beta,
                                       const ExponentPair& pq, const Tolerance& tol) {
    if (!jm.marginal_x.is_uniform() || !jm.marginal_y.is_uniform())
        throw PreconditionError("regression_bound: requires uniform marginals");

    const Tolerance inner = inner_tolerance(tol);
    const double ap = abs_central_moment(jm.marginal_x, pq.p);

    // E[r(V)] = 0, so the p-th absolute moment is already central.
    const double rp = integrate(
        [&](double v) { return std::pow(std::abs(regression_curve(jm, v, inner)), pq.p); },
        1e-12, 1.0 - 1e-12, tol);
    const double ap_r = std::pow(rp, 1.0 / pq.p);

    const double mean_b = expectation_uniform([&](double v) { return beta(v); }, beta, tol);
    const double q_mom = expectation_uniform(
        [&](double v) { return std::pow(std::abs(beta(v) - mean_b), pq.q); }, beta, tol);
    const double aq_b = std::pow(q_mom, 1.0 / pq.q);

    RegressionBoundResult out;
    out.delta_p = ap_r / ap;
    out.gamma_p = ap * aq_b;
    out.bound = out.delta_p * out.gamma_p;
    return out;
}

GrussFormReport gruss_form(const JointModel& jm, const Distortion& beta,
                           const Tolerance& tol) {
    if (!jm.marginal_x.is_uniform() || !jm.marginal_y.is_uniform())
        throw PreconditionError("gruss_form: requires uniform marginals");

    GrussFormReport out;
    // Uniform marginals: Corr[X,Y] = Cov[X,Y]/VarY reduces to 12 Cov.
    const double cov_xy = hoeffding_cov(jm, Distortion::identity(), tol);
    out.corr = 12.0 * cov_xy;

    const double mean_b = expectation_uniform([&](double v) { return beta(v); }, beta, tol);
    const double cov_vb = expectation_uniform(
        [&](double v) { return (v - 0.5) * (beta(v) - mean_b); }, beta, tol);
    out.g0 = cov_vb; // sqrt(VarX/VarY) = 1 here

    out.product = out.corr * out.g0;
    out.exact_cov = hoeffding_cov(jm, beta, tol);
    out.linear_regression_consistent = std::abs(out.product - out.exact_cov) <= 1e-8;
    return out;
}

BoundReport bound_report(const JointModel& jm, const Distortion& beta,
                         const ExponentPair& pq, const Box& box, const Tolerance& tol) {
    BoundReport rep;
    rep.exact_cov = hoeffding_cov(jm, beta, tol);

    const ClassicalBounds classical = classical_bounds(jm, beta, box, tol);
    rep.cauchy_schwarz = classical.cauchy_schwarz;
    rep.gruss = classical.gruss;
    rep.corr_form = classical.corr_form;

    rep.qde_dependence = qde_dependence_coefficient(jm, pq, tol);
    rep.qde_factor = qde_gruss_factor(jm, beta, pq, tol);
    rep.qde_bound = rep.qde_dependence * rep.qde_factor;

    if (jm.marginal_x.is_uniform() && jm.marginal_y.is_uniform()) {
        const RegressionBoundResult reg = regression_bound(jm, beta, pq, tol);
        rep.regression_delta = reg.delta_p;
        rep.regression_gamma = reg.gamma_p;
        rep.regression_bound = reg.bound;
    }
    return rep;
}

} // namespace qdep
