#include "qdep/copula.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qdep {

namespace {

constexpr double kWeightSlack = 1e-12;
constexpr double kFdStep = 1e-6; // finite-difference step for the Archimedean family

void require_unit_square(double u, double v) {
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
        throw DomainError("copula: (u, v) outside the unit square");
}

// Generator of the Genest-Ghoudi family: g(x) = (1 - x^a)^(1/a).
// It is an involution with g(0) = 1 and g(1) = 0, so
// C(u,v) = g(g(u) + g(v)) whenever g(u) + g(v) < 1 and 0 otherwise.
double gg_gen(double x, double a) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return std::exp(std::log(-std::expm1(a * std::log(x))) / a);
}

double gg_eval(double u, double v, double a) {
    const double s = gg_gen(u, a) + gg_gen(v, a);
    if (s >= 1.0) return 0.0;
    return gg_gen(s, a);
}

// v-location of the max{0, .} seam at fixed u (and by symmetry the
// u-location at fixed v): g(u) + g(v) = 1.
double gg_seam(double u, double a) {
    const double rest = 1.0 - gg_gen(u, a);
    if (rest <= 0.0) return 1.0;
    return gg_gen(rest, a);
}

} // namespace

Copula Copula::frechet_lower() { return Copula(Family::FrechetLower, 0.0); }
Copula Copula::frechet_upper() { return Copula(Family::FrechetUpper, 0.0); }
Copula Copula::independence() { return Copula(Family::Independence, 0.0); }

Copula Copula::fgm(double theta) {
    if (!(theta >= -1.0 && theta <= 1.0))
        throw DomainError("fgm: theta must be in [-1, 1]");
    return Copula(Family::Fgm, theta);
}

Copula Copula::gg_archimedean(double alpha) {
    // alpha = 1 would degenerate; rejected rather than special-cased.
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("gg_archimedean: alpha must be in (0, 1)");
    return Copula(Family::GgArchimedean, alpha);
}

Copula::Copula(std::vector<double> w, std::vector<Copula> p)
    : family_(Family::Mix), weights_(std::move(w)), parts_(std::move(p)) {
    if (weights_.empty() || weights_.size() != parts_.size())
        throw WeightError("mix: weights and parts must be non-empty and equal-length");
    double sum = 0.0;
    for (double wi : weights_) {
        if (wi < 0.0) throw WeightError("mix: negative weight");
        sum += wi;
    }
    if (std::abs(sum - 1.0) > kWeightSlack)
        throw WeightError("mix: weights must sum to 1");
}

Copula Copula::mix(std::vector<double> weights, std::vector<Copula> parts) {
    return Copula(std::move(weights), std::move(parts));
}

Copula convex_combine(std::vector<double> weights, std::vector<Copula> parts) {
    return Copula::mix(std::move(weights), std::move(parts));
}

double Copula::operator()(double u, double v) const {
    require_unit_square(u, v);
    // Margins are exact by construction for every family.
    if (u == 0.0 || v == 0.0) return 0.0;
    if (u == 1.0) return v;
    if (v == 1.0) return u;

    switch (family_) {
    case Family::FrechetLower: return std::max(0.0, u + v - 1.0);
    case Family::FrechetUpper: return std::min(u, v);
    case Family::Independence: return u * v;
    case Family::Fgm: return u * v * (1.0 + param_ * (1.0 - u) * (1.0 - v));
    case Family::GgArchimedean: return gg_eval(u, v, param_);
    case Family::Mix: {
        double acc = 0.0;
        for (std::size_t i = 0; i < parts_.size(); ++i)
            acc += weights_[i] * parts_[i](u, v);
        return acc;
    }
    }
    throw DomainError("copula: unknown family");
}

double Copula::partial_v(double u, double v) const {
    require_unit_square(u, v);
    switch (family_) {
    case Family::FrechetLower: return (u + v > 1.0) ? 1.0 : 0.0;
    case Family::FrechetUpper: return (v < u) ? 1.0 : 0.0;
    case Family::Independence: return u;
    case Family::Fgm:
        return std::clamp(u + param_ * u * (1.0 - u) * (1.0 - 2.0 * v), 0.0, 1.0);
    case Family::GgArchimedean: {
        if (u == 0.0) return 0.0;
        if (u == 1.0) return 1.0;
        // Central difference, one-sided within a step of the seam or the
        // boundary (the surface is only C0 across the seam).
        const double seam = gg_seam(u, param_);
        double lo = v - kFdStep;
        double hi = v + kFdStep;
        if (std::abs(v - seam) <= kFdStep) {
            if (v <= seam) hi = std::min(hi, seam);
            else lo = std::max(lo, seam);
        }
        lo = std::max(0.0, lo);
        hi = std::min(1.0, hi);
        if (hi <= lo) return (v < 0.5) ? 0.0 : 1.0;
        const double d = ((*this)(u, hi) - (*this)(u, lo)) / (hi - lo);
        return std::clamp(d, 0.0, 1.0);
    }
    case Family::Mix: {
        double acc = 0.0;
        for (std::size_t i = 0; i < parts_.size(); ++i)
            acc += weights_[i] * parts_[i].partial_v(u, v);
        return std::clamp(acc, 0.0, 1.0);
    }
    }
    throw DomainError("copula: unknown family");
}

std::vector<double> Copula::kink_points_u(double v) const {
    switch (family_) {
    case Family::FrechetLower: return {1.0 - v};
    case Family::FrechetUpper: return {v};
    case Family::GgArchimedean:
        if (v > 0.0 && v < 1.0) return {gg_seam(v, param_)};
        return {};
    case Family::Mix: {
        std::vector<double> all;
        for (const Copula& part : parts_) {
            auto k = part.kink_points_u(v);
            all.insert(all.end(), k.begin(), k.end());
        }
        return all;
    }
    default: return {};
    }
}

std::vector<double> Copula::kink_points_v(double u) const {
    // Every built-in family is exchangeable, so the seams are symmetric.
    return kink_points_u(u);
}

AxiomReport check_axioms(const std::function<double(double, double)>& surface,
                         int grid_n, double tol) {
    if (grid_n < 2) throw DomainError("check_axioms: grid_n must be >= 2");

    const int n = grid_n + 1;
    std::vector<double> values(static_cast<std::size_t>(n) * n);
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = static_cast<double>(i) / grid_n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            values[static_cast<std::size_t>(i) * n + j] = surface(grid[i], grid[j]);

    auto at = [&](int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; };

    AxiomReport report;
    double margin = 0.0;
    for (int i = 0; i < n; ++i) {
        margin = std::max(margin, std::abs(at(i, 0)));
        margin = std::max(margin, std::abs(at(0, i)));
        margin = std::max(margin, std::abs(at(i, grid_n) - grid[i]));
        margin = std::max(margin, std::abs(at(grid_n, i) - grid[i]));
    }

    // Unit-cell volumes; coarser rectangles are sums of these.
    double worst_volume = 0.0;
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j) {
            const double vol = at(i + 1, j + 1) - at(i, j + 1) - at(i + 1, j) + at(i, j);
            worst_volume = std::min(worst_volume, vol);
        }

    report.worst_margin_error = margin;
    report.worst_rectangle_volume = worst_volume;
    report.pass = margin <= tol && worst_volume >= -tol;
    return report;
}

AxiomReport check_axioms(const Copula& c, int grid_n, double tol) {
    return check_axioms([&c](double u, double v) { return c(u, v); }, grid_n, tol);
}

} // namespace qdep
