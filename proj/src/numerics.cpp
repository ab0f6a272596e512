#include "qdep/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qdep {

void Tolerance::validate() const {
    if (!(abs_tol > 0.0)) throw DomainError("Tolerance: abs_tol must be > 0");
    if (!(rel_tol >= 0.0)) throw DomainError("Tolerance: rel_tol must be >= 0");
    if (max_subdivisions < 1) throw DomainError("Tolerance: max_subdivisions must be >= 1");
}

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK values).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct RuleResult {
    double value = 0.0;
    double error = 0.0;
};

RuleResult gk15(const ScalarFn& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    const double fc = f(c);
    double gauss = kWg[3] * fc;
    double kronrod = kWgk[7] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double fsum = f(c - dx) + f(c + dx);
        kronrod += kWgk[i] * fsum;
        if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
    }
    gauss *= h;
    kronrod *= h;

    const double diff = std::abs(kronrod - gauss);
    // Kronrod converges much faster than the raw difference suggests;
    // the sharpened estimate is the usual (200*diff)^1.5, never above diff.
    const double sharp = std::pow(200.0 * diff, 1.5);
    return {kronrod, std::min(diff, sharp)};
}

struct Piece {
    double a, b, value, error;
};

// Globally adaptive refinement of one smooth segment.
double integrate_segment(const ScalarFn& f, double a, double b,
                         double abs_budget, double rel_tol, int max_subdiv) {
    std::vector<Piece> pieces;
    RuleResult first = gk15(f, a, b);
    pieces.push_back({a, b, first.value, first.error});

    for (int splits = 0;; ++splits) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            total += pieces[i].value;
            err += pieces[i].error;
            if (pieces[i].error > pieces[worst].error) worst = i;
        }
        if (err <= std::max(abs_budget, rel_tol * std::abs(total))) return total;
        if (splits >= max_subdiv)
            throw NonConvergence("integrate: subdivision budget exhausted");

        const Piece p = pieces[worst];
        const double mid = 0.5 * (p.a + p.b);
        if (!(p.a < mid && mid < p.b))
            throw NonConvergence("integrate: interval collapsed below machine precision");
        RuleResult left = gk15(f, p.a, mid);
        RuleResult right = gk15(f, mid, p.b);
        pieces[worst] = {p.a, mid, left.value, left.error};
        pieces.push_back({mid, p.b, right.value, right.error});
    }
}

} // namespace

double integrate(const ScalarFn& f, double lo, double hi,
                 const Tolerance& tol, std::span<const double> split_points) {
    tol.validate();
    if (!(lo <= hi)) throw DomainError("integrate: requires lo <= hi");
    if (lo == hi) return 0.0;

    std::vector<double> cuts;
    cuts.push_back(lo);
    for (double s : split_points)
        if (s > lo && s < hi) cuts.push_back(s);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double total_len = hi - lo;
    double result = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double frac = (cuts[i + 1] - cuts[i]) / total_len;
        result += integrate_segment(f, cuts[i], cuts[i + 1],
                                    tol.abs_tol * frac, tol.rel_tol,
                                    tol.max_subdivisions);
    }
    return result;
}

double find_root(const ScalarFn& f, double lo, double hi, const Tolerance& tol) {
    tol.validate();
    if (!(lo <= hi)) throw DomainError("find_root: requires lo <= hi");

    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0)
        throw NoSignChange("find_root: f(lo) and f(hi) have the same sign");

    // Bisection keeps the bracket valid; a secant step is accepted whenever
    // it lands strictly inside the current bracket.
    for (int iter = 0; iter < 300 && (hi - lo) > tol.abs_tol; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (iter % 2 == 1 && fhi != flo) {
            const double sec = hi - fhi * (hi - lo) / (fhi - flo);
            if (sec > lo && sec < hi) mid = sec;
        }
        if (!(mid > lo && mid < hi)) break; // bracket at machine resolution
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

Extremum maximize_unimodal(const ScalarFn& f, double lo, double hi,
                           const Tolerance& tol) {
    tol.validate();
    if (!(lo <= hi)) throw DomainError("maximize_unimodal: requires lo <= hi");

    constexpr double kInvPhi = 0.6180339887498948482;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    for (int iter = 0; iter < 400 && (b - a) > tol.abs_tol; ++iter) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

} // namespace qdep
