#include "qdep/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace qdep {

namespace {

void write_f17(std::ostream& os, double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    os << buf;
}

} // namespace

void SignGrid::write_csv(std::ostream& os) const {
    os << "u,v,sign\n";
    for (int i = 0; i <= grid_n; ++i)
        for (int j = 0; j <= grid_n; ++j) {
            write_f17(os, static_cast<double>(i) / grid_n);
            os << ',';
            write_f17(os, static_cast<double>(j) / grid_n);
            os << ',' << static_cast<int>(at(i, j)) << '\n';
        }
}

void SignGrid::write_pgm(std::ostream& os) const {
    os << "P2\n" << (grid_n + 1) << ' ' << (grid_n + 1) << "\n255\n";
    // Row = v descending so the picture reads like a plot.
    for (int j = grid_n; j >= 0; --j) {
        for (int i = 0; i <= grid_n; ++i) {
            const int value = at(i, j) < 0 ? 0 : (at(i, j) == 0 ? 128 : 255);
            os << value << (i == grid_n ? '\n' : ' ');
        }
    }
}

SignGrid sign_surface(const Copula& c, int grid_n, double tol) {
    if (grid_n < 2) throw DomainError("sign_surface: grid_n must be >= 2");
    SignGrid grid;
    grid.grid_n = grid_n;
    grid.signs.resize(static_cast<std::size_t>(grid_n + 1) * (grid_n + 1));
    for (int i = 0; i <= grid_n; ++i) {
        const double u = static_cast<double>(i) / grid_n;
        for (int j = 0; j <= grid_n; ++j) {
            const double v = static_cast<double>(j) / grid_n;
            const double d = c(u, v) - u * v;
            std::int8_t s = 0;
            if (d > tol) s = 1;
            else if (d < -tol) s = -1;
            grid.signs[static_cast<std::size_t>(i) * (grid_n + 1) + j] = s;
        }
    }
    return grid;
}

namespace {

struct QdExtremes {
    double max_d = 0.0, min_d = 0.0;
    std::pair<double, double> arg_max{0.0, 0.0}, arg_min{0.0, 0.0};
};

// Lattice scan of C - uv plus geometric corner/edge probes: sign slivers
// of mixtures pinch into the corners faster than any fixed grid.
QdExtremes scan_qd(const Copula& c, int grid_n) {
    QdExtremes ex;
    auto visit = [&](double u, double v) {
        const double d = c(u, v) - u * v;
        if (d > ex.max_d) {
            ex.max_d = d;
            ex.arg_max = {u, v};
        }
        if (d < ex.min_d) {
            ex.min_d = d;
            ex.arg_min = {u, v};
        }
    };
    for (int i = 0; i <= grid_n; ++i) {
        const double u = static_cast<double>(i) / grid_n;
        for (int j = 0; j <= grid_n; ++j) visit(u, static_cast<double>(j) / grid_n);
    }
    for (double e = 1e-2; e >= 1e-8; e /= 10.0) {
        visit(e, e);
        visit(1.0 - e, 1.0 - e);
        visit(e, 1.0 - e);
        visit(1.0 - e, e);
        visit(0.5, e);
        visit(e, 0.5);
        visit(0.5, 1.0 - e);
        visit(1.0 - e, 0.5);
    }
    return ex;
}

} // namespace

QDClassification classify_qd(const Copula& c, int grid_n, double tol) {
    if (grid_n < 2) throw DomainError("classify_qd: grid_n must be >= 2");

    QDClassification out;
    const QdExtremes ex = scan_qd(c, grid_n);
    const double max_d = ex.max_d, min_d = ex.min_d;
    const std::pair<double, double> arg_max = ex.arg_max, arg_min = ex.arg_min;
    out.max_above = max_d;
    out.max_below = min_d;

    const bool has_pos = max_d > tol;
    const bool has_neg = min_d < -tol;
    if (has_pos) out.witness_pos = arg_max;
    if (has_neg) out.witness_neg = arg_min;

    if (has_pos && has_neg) out.verdict = QdVerdict::Neither;
    else if (has_pos) out.verdict = QdVerdict::Pqd;
    else if (has_neg) out.verdict = QdVerdict::Nqd;
    else out.verdict = (max_d >= -min_d) ? QdVerdict::Pqd : QdVerdict::Nqd; // surface ~ uv

    out.marginal = std::max(std::abs(max_d), std::abs(min_d)) <= 10.0 * tol;
    return out;
}

double qde_curve_value(const Copula& c, double v, const Tolerance& tol) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("qde_curve: v outside [0,1]");
    if (v == 0.0 || v == 1.0) return 0.0; // exact: C(u,0)=0, C(u,1)=u
    const auto kinks = c.kink_points_u(v);
    return integrate([&](double u) { return c(u, v) - u * v; }, 0.0, 1.0, tol, kinks);
}

std::vector<std::pair<double, double>> qde_curve(const Copula& c,
                                                 std::span<const double> v_points,
                                                 const Tolerance& tol) {
    std::vector<std::pair<double, double>> out;
    out.reserve(v_points.size());
    for (double v : v_points) out.emplace_back(v, qde_curve_value(c, v, tol));
    return out;
}

QDEClassification classify_qde(const Copula& c, int n_points, double tol,
                               const Tolerance& quad_tol) {
    if (n_points < 3) throw DomainError("classify_qde: n_points must be >= 3");

    std::vector<double> probes;
    probes.reserve(n_points + 16);
    for (int i = 1; i < n_points; ++i)
        probes.push_back(static_cast<double>(i) / n_points);
    // The curve vanishes at 0 and 1; a sign region can be pinched into the
    // corners, so probe them geometrically as well.
    for (double e = 1e-2; e >= 1e-7; e /= 10.0) {
        probes.push_back(e);
        probes.push_back(1.0 - e);
    }
    std::sort(probes.begin(), probes.end());

    QDEClassification out;
    double max_c = 0.0, min_c = 0.0, arg_max = 0.0, arg_min = 0.0;
    std::vector<double> values(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
        values[i] = qde_curve_value(c, probes[i], quad_tol);
        if (values[i] > max_c) {
            max_c = values[i];
            arg_max = probes[i];
        }
        if (values[i] < min_c) {
            min_c = values[i];
            arg_min = probes[i];
        }
    }

    // Refine around sign changes so near-tolerance slivers get a fair look.
    // Changes where both sides sit inside the zero band are quadrature noise.
    for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
        if (values[i] == 0.0 || values[i + 1] == 0.0) continue;
        if ((values[i] > 0.0) == (values[i + 1] > 0.0)) continue;
        if (std::max(std::abs(values[i]), std::abs(values[i + 1])) <= tol) continue;
        const double cross = find_root(
            [&](double v) { return qde_curve_value(c, v, quad_tol); },
            probes[i], probes[i + 1], Tolerance{1e-10, 0.0, 60});
        for (double side : {-1.0, 1.0}) {
            const double v = cross + side * 1e-4;
            if (v <= 0.0 || v >= 1.0) continue;
            const double val = qde_curve_value(c, v, quad_tol);
            if (val > max_c) {
                max_c = val;
                arg_max = v;
            }
            if (val < min_c) {
                min_c = val;
                arg_min = v;
            }
        }
    }

    out.max_curve = max_c;
    out.min_curve = min_c;
    const bool has_pos = max_c > tol;
    const bool has_neg = min_c < -tol;
    if (has_pos) out.witness_pos = arg_max;
    if (has_neg) out.witness_neg = arg_min;
    if (has_pos && has_neg) out.verdict = QdeVerdict::Neither;
    else if (has_pos) out.verdict = QdeVerdict::Pqde;
    else if (has_neg) out.verdict = QdeVerdict::Nqde;
    else out.verdict = QdeVerdict::Both;
    out.marginal = std::max(std::abs(max_c), std::abs(min_c)) <= 10.0 * tol;
    return out;
}

namespace {

Copula mixture_at(const Copula& c0, const Copula& c1, double a) {
    return Copula::mix({1.0 - a, a}, {c0, c1});
}

// sup over [0,1] of alpha satisfying pred, given pred(0); 40 bisections.
double sup_weight(const std::function<bool(double)>& pred) {
    if (!pred(0.0)) throw PreconditionError("threshold bisection: predicate fails at 0");
    if (pred(1.0)) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        (pred(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double inf_weight(const std::function<bool(double)>& pred) {
    if (!pred(1.0)) throw PreconditionError("threshold bisection: predicate fails at 1");
    if (pred(0.0)) return 0.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        (pred(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

ThresholdReport qd_qde_thresholds(const Copula& c0, const Copula& c1, double tol) {
    const double class_tol = 1e-9;
    const QDClassification q0 = classify_qd(c0, 200, class_tol);
    const QDClassification q1 = classify_qd(c1, 200, class_tol);
    if (q0.verdict != QdVerdict::Nqd)
        throw PreconditionError("qd_qde_thresholds: c0 must be NQD");
    if (q1.verdict != QdVerdict::Pqd)
        throw PreconditionError("qd_qde_thresholds: c1 must be PQD");

    // The ratio surface (uv - C0)/(C1 - C0) must not be constant.
    {
        double lo = 2.0, hi = -1.0;
        const double pts[5][2] = {{0.2, 0.3}, {0.5, 0.5}, {0.8, 0.4}, {0.3, 0.8}, {0.7, 0.7}};
        for (const auto& p : pts) {
            const double d0 = c0(p[0], p[1]);
            const double d1 = c1(p[0], p[1]);
            if (std::abs(d1 - d0) < 1e-14) continue;
            const double r = (p[0] * p[1] - d0) / (d1 - d0);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        if (!(hi - lo > 1e-9))
            throw PreconditionError("qd_qde_thresholds: ratio surface is constant");
    }

    const int qd_grid = 200;
    const int qde_points = 201;
    // The surface scan is exact arithmetic, so the QD side can run a much
    // tighter zero band than the quadrature-based curve; otherwise the
    // corner slivers (size ~ weight^2) would inflate m and deflate M.
    const double qd_tol = 1e-13;
    auto nqd = [&](double a) {
        return scan_qd(mixture_at(c0, c1, a), qd_grid).max_d <= qd_tol;
    };
    auto pqd = [&](double a) {
        return scan_qd(mixture_at(c0, c1, a), qd_grid).min_d >= -qd_tol;
    };
    auto nqde = [&](double a) {
        return classify_qde(mixture_at(c0, c1, a), qde_points, class_tol).max_curve <= class_tol;
    };
    auto pqde = [&](double a) {
        return classify_qde(mixture_at(c0, c1, a), qde_points, class_tol).min_curve >= -class_tol;
    };

    ThresholdReport rep;
    rep.m = sup_weight(nqd);
    rep.M = inf_weight(pqd);
    rep.m_prime = sup_weight(nqde);
    rep.M_prime = inf_weight(pqde);

    // QD implies QDE, so the orderings below hold up to bisection noise.
    if (rep.m > rep.m_prime + tol || rep.M_prime > rep.M + tol || rep.m >= rep.M)
        throw PreconditionError("qd_qde_thresholds: threshold ordering violated");
    rep.m_prime = std::max(rep.m_prime, rep.m);
    rep.M_prime = std::min(rep.M_prime, rep.M);
    return rep;
}

std::optional<double> kappa_constant(const Copula& c0, const Copula& c1,
                                     int n_points, double tol) {
    if (n_points < 2) throw DomainError("kappa_constant: n_points must be >= 2");
    const double class_tol = 1e-9;
    if (classify_qd(c0, 200, class_tol).max_above > class_tol)
        throw PreconditionError("kappa_constant: c0 must be NQD");
    if (classify_qd(c1, 200, class_tol).max_below < -class_tol)
        throw PreconditionError("kappa_constant: c1 must be PQD");

    Tolerance quad;
    quad.abs_tol = 1e-12;
    double lo = 2.0, hi = -1.0;
    for (int i = 1; i <= n_points; ++i) {
        const double v = static_cast<double>(i) / (n_points + 1);
        const double a = qde_curve_value(c0, v, quad);
        const double b = qde_curve_value(c1, v, quad);
        const double den = a - b;
        if (std::abs(den) <= tol)
            throw DegenerateRatio("kappa_constant: curve difference vanishes on the grid");
        const double r = a / den;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    if (hi - lo > tol) return std::nullopt;
    return 0.5 * (lo + hi);
}

ZeroCurveReport fgm_fu_zero_curves(double alpha, double tol) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("fgm_fu_zero_curves: alpha must be in (0,1)");

    ZeroCurveReport rep;
    rep.alpha = alpha;
    const double c = alpha / (1.0 - alpha);
    auto v_upper = [c](double u) { return c / (1.0 - u); };
    auto v_lower = [c](double u) { return 1.0 - c / u; };
    auto gap = [&](double u) { return v_upper(u) - v_lower(u); };

    const double edge = 1e-9;
    const Extremum min_pt = maximize_unimodal([&](double u) { return -gap(u); },
                                              edge, 1.0 - edge, Tolerance{1e-12, 0.0, 60});
    rep.argmin_u = min_pt.argmax;
    rep.min_gap = -min_pt.max;

    if (rep.min_gap < -tol) {
        rep.kind = ZeroCurveReport::Kind::InteriorIntersection;
        const Tolerance rt{1e-12, 0.0, 60};
        const double u1 = find_root(gap, edge, rep.argmin_u, rt);
        const double u2 = find_root(gap, rep.argmin_u, 1.0 - edge, rt);
        for (double u : {u1, u2}) {
            const double v = v_upper(u);
            if (u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0) rep.intersections.emplace_back(u, v);
        }
    } else if (rep.min_gap <= tol) {
        rep.kind = ZeroCurveReport::Kind::Tangent;
        rep.intersections.emplace_back(rep.argmin_u, v_upper(rep.argmin_u));
    } else {
        rep.kind = ZeroCurveReport::Kind::NoIntersection;
    }
    return rep;
}

double fgm_fu_tangency_alpha(const Tolerance& tol) {
    return find_root(
        [](double a) { return fgm_fu_zero_curves(a).min_gap; }, 0.05, 0.45, tol);
}

} // namespace qdep
