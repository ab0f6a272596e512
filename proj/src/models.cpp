#include "qdep/models.hpp"

#include <algorithm>
#include <cmath>

#include "qdep/dependence.hpp"

namespace qdep {

namespace {
constexpr double kProbSlack = 1e-12;
}

Marginal Marginal::uniform_unit() { return Marginal(); }

Marginal Marginal::finite_discrete(std::vector<double> points, std::vector<double> probs) {
    if (points.empty() || points.size() != probs.size())
        throw DomainError("finite_discrete: points and probs must be non-empty and equal-length");
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (!(points[i] < points[i + 1]))
            throw DomainError("finite_discrete: points must be strictly increasing");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p > 0.0)) throw DomainError("finite_discrete: probabilities must be positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbSlack)
        throw DomainError("finite_discrete: probabilities must sum to 1");

    Marginal m;
    m.uniform_ = false;
    m.points_ = std::move(points);
    m.probs_ = std::move(probs);
    m.cum_.resize(m.probs_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < m.probs_.size(); ++i) {
        acc += m.probs_[i];
        m.cum_[i] = acc;
    }
    m.cum_.back() = 1.0;
    return m;
}

double Marginal::cdf(double y) const {
    if (uniform_) return std::clamp(y, 0.0, 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (y < points_[i]) break;
        acc = cum_[i];
    }
    return acc;
}

double Marginal::mean() const {
    if (uniform_) return 0.5;
    double m = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) m += points_[i] * probs_[i];
    return m;
}

double Marginal::variance() const {
    if (uniform_) return 1.0 / 12.0;
    const double m = mean();
    double var = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const double d = points_[i] - m;
        var += d * d * probs_[i];
    }
    return var;
}

double Marginal::support_lo() const { return uniform_ ? 0.0 : points_.front(); }
double Marginal::support_hi() const { return uniform_ ? 1.0 : points_.back(); }

Distortion Distortion::identity() { return Distortion(); }

Distortion Distortion::power(double k) {
    if (!(k >= 1.0)) throw DomainError("power distortion: requires k >= 1");
    Distortion d;
    d.kind_ = Kind::Power;
    d.k_ = k;
    return d;
}

Distortion Distortion::piecewise_linear(std::vector<double> knots, std::vector<double> values) {
    if (knots.size() < 2 || knots.size() != values.size())
        throw DomainError("piecewise_linear: need >= 2 knots with matching values");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (!(knots[i] < knots[i + 1]))
            throw DomainError("piecewise_linear: knots must be strictly increasing");
    Distortion d;
    d.kind_ = Kind::PiecewiseLinear;
    d.knots_ = std::move(knots);
    d.values_ = std::move(values);
    return d;
}

double Distortion::operator()(double y) const {
    switch (kind_) {
    case Kind::Identity: return y;
    case Kind::Power:
        if (y < 0.0) throw DomainError("power distortion: y must be >= 0");
        return std::pow(y, k_);
    case Kind::PiecewiseLinear: {
        if (y <= knots_.front()) return values_.front();
        if (y >= knots_.back()) return values_.back();
        auto it = std::upper_bound(knots_.begin(), knots_.end(), y);
        const std::size_t j = static_cast<std::size_t>(it - knots_.begin());
        const double t = (y - knots_[j - 1]) / (knots_[j] - knots_[j - 1]);
        return values_[j - 1] + t * (values_[j] - values_[j - 1]);
    }
    }
    throw DomainError("distortion: unknown kind");
}

double Distortion::derivative(double y) const {
    switch (kind_) {
    case Kind::Identity: return 1.0;
    case Kind::Power:
        if (y < 0.0) throw DomainError("power distortion: y must be >= 0");
        return k_ * std::pow(y, k_ - 1.0);
    case Kind::PiecewiseLinear: {
        if (y < knots_.front() || y >= knots_.back()) return 0.0;
        auto it = std::upper_bound(knots_.begin(), knots_.end(), y);
        const std::size_t j = static_cast<std::size_t>(it - knots_.begin());
        return (values_[j] - values_[j - 1]) / (knots_[j] - knots_[j - 1]);
    }
    }
    throw DomainError("distortion: unknown kind");
}

double Distortion::abs_derivative(double y) const { return std::abs(derivative(y)); }

double Distortion::beta1(double y) const {
    if (kind_ != Kind::PiecewiseLinear) return (*this)(y); // already non-decreasing
    double acc = values_.front();
    for (std::size_t j = 1; j < knots_.size(); ++j) {
        const double rise = values_[j] - values_[j - 1];
        if (rise <= 0.0) continue;
        const double a = knots_[j - 1], b = knots_[j];
        const double covered = std::clamp(y, a, b) - a;
        acc += rise * covered / (b - a);
    }
    return acc;
}

double Distortion::beta2(double y) const {
    if (kind_ != Kind::PiecewiseLinear) return 0.0;
    double acc = 0.0;
    for (std::size_t j = 1; j < knots_.size(); ++j) {
        const double rise = values_[j] - values_[j - 1];
        if (rise >= 0.0) continue;
        const double a = knots_[j - 1], b = knots_[j];
        const double covered = std::clamp(y, a, b) - a;
        acc += (-rise) * covered / (b - a);
    }
    return acc;
}

double Distortion::total_variation(double lo, double hi) const {
    if (!(lo <= hi)) throw DomainError("total_variation: requires lo <= hi");
    return (beta1(hi) - beta1(lo)) + (beta2(hi) - beta2(lo));
}

std::vector<double> Distortion::kinks_in(double lo, double hi) const {
    std::vector<double> out;
    if (kind_ == Kind::PiecewiseLinear)
        for (double k : knots_)
            if (k > lo && k < hi) out.push_back(k);
    return out;
}

double threshold_cov(const JointModel& jm, double y, const Tolerance& tol) {
    const double g = jm.marginal_y.cdf(y);
    if (g <= 0.0 || g >= 1.0) return 0.0; // the curve vanishes at both ends

    const Copula& c = jm.copula;
    if (jm.marginal_x.is_uniform()) {
        const auto kinks = c.kink_points_u(g);
        return integrate([&](double u) { return c(u, g) - u * g; }, 0.0, 1.0, tol, kinks);
    }

    // F is a step function, so the integral over x is a finite sum.
    const auto& pts = jm.marginal_x.points();
    const auto& cum = jm.marginal_x.cumulative();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double fk = cum[k];
        acc += (pts[k + 1] - pts[k]) * (c(fk, g) - fk * g);
    }
    return acc;
}

double regression_curve(const JointModel& jm, double v, const Tolerance& tol) {
    if (!jm.marginal_x.is_uniform() || !jm.marginal_y.is_uniform())
        throw PreconditionError("regression_curve: requires uniform marginals");
    if (!(v > 0.0 && v < 1.0))
        throw DomainError("regression_curve: v must be in (0, 1)");

    const Copula& c = jm.copula;
    const auto kinks = c.kink_points_u(v);
    // E[U | V = v] = int_0^1 P[U > u | V = v] du.
    const double cond_mean =
        integrate([&](double u) { return 1.0 - c.partial_v(u, v); }, 0.0, 1.0, tol, kinks);
    return cond_mean - 0.5;
}

std::pair<double, double> locate_positive_interval(const Copula& c, double threshold,
                                                   int scan_points, const Tolerance& tol) {
    if (scan_points < 3) throw DomainError("locate_positive_interval: scan too coarse");

    Tolerance inner = tol;
    inner.abs_tol = std::min(tol.abs_tol, threshold / 10.0);

    std::vector<double> vs(scan_points), cs(scan_points);
    for (int i = 0; i < scan_points; ++i) {
        vs[i] = static_cast<double>(i + 1) / (scan_points + 1);
        cs[i] = qde_curve_value(c, vs[i], inner);
    }

    // Widest maximal run of scan points above the threshold.
    int best_lo = -1, best_hi = -1;
    for (int i = 0; i < scan_points;) {
        if (cs[i] <= threshold) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < scan_points && cs[j + 1] > threshold) ++j;
        if (best_lo < 0 || vs[j] - vs[i] > vs[best_hi] - vs[best_lo]) {
            best_lo = i;
            best_hi = j;
        }
        i = j + 1;
    }
    if (best_lo < 0)
        throw NoPositiveInterval("locate_positive_interval: QDE curve never exceeds threshold");

    auto excess = [&](double v) { return qde_curve_value(c, v, inner) - threshold; };
    double lo = vs[best_lo];
    if (best_lo > 0) lo = find_root(excess, vs[best_lo - 1], vs[best_lo], tol);
    else if (excess(tol.abs_tol) < 0.0) lo = find_root(excess, tol.abs_tol, vs[0], tol);

    double hi = vs[best_hi];
    if (best_hi + 1 < scan_points) hi = find_root(excess, vs[best_hi], vs[best_hi + 1], tol);
    else if (excess(1.0 - tol.abs_tol) < 0.0) hi = find_root(excess, vs.back(), 1.0 - tol.abs_tol, tol);
    else hi = 1.0 - tol.abs_tol;

    return {lo, hi};
}

PqdeConstruction construct_pqde_marginal(double alpha, int k, const Tolerance& tol) {
    if (k < 2) throw DomainError("construct_pqde_marginal: requires k >= 2");
    const Copula c = Copula::gg_archimedean(alpha);
    const double threshold = 10.0 * tol.abs_tol;

    PqdeConstruction out;
    std::tie(out.v_lo, out.v_hi) = locate_positive_interval(c, threshold, 2001, tol);

    // Equal weights are the simplest witness; fall back to evenly spaced
    // cdf levels inside the located interval when they do not fit.
    std::vector<double> sums;
    out.equal_probs = true;
    for (int i = 1; i < k; ++i) {
        const double s = static_cast<double>(i) / k;
        if (!(s > out.v_lo && s < out.v_hi)) {
            out.equal_probs = false;
            break;
        }
        sums.push_back(s);
    }
    if (!out.equal_probs) {
        sums.clear();
        for (int i = 1; i < k; ++i)
            sums.push_back(out.v_lo + (out.v_hi - out.v_lo) * i / k);
    }

    std::vector<double> points(k), probs(k);
    double prev = 0.0;
    for (int i = 0; i < k; ++i) {
        points[i] = i + 1; // integer labels; only the cdf levels matter
        const double next = (i + 1 < k) ? sums[i] : 1.0;
        probs[i] = next - prev;
        prev = next;
    }

    out.partial_sums = std::move(sums);
    out.marginal = Marginal::finite_discrete(std::move(points), std::move(probs));
    return out;
}

} // namespace qdep
