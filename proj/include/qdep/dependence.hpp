#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qdep/copula.hpp"
#include "qdep/numerics.hpp"

namespace qdep {

// sign(C(u,v) - uv) on a uniform lattice; 0 where |C - uv| <= tol.
struct SignGrid {
    int grid_n = 0;
    std::vector<std::int8_t> signs; // (grid_n+1)^2, row-major over u then v

    std::int8_t at(int i, int j) const {
        return signs[static_cast<std::size_t>(i) * (grid_n + 1) + j];
    }
    void write_csv(std::ostream& os) const; // columns u,v,sign
    void write_pgm(std::ostream& os) const; // P2, values 0/128/255 for -1/0/+1
};

SignGrid sign_surface(const Copula& c, int grid_n, double tol = 1e-9);

enum class QdVerdict { Nqd, Pqd, Neither };

struct QDClassification {
    QdVerdict verdict = QdVerdict::Neither;
    std::optional<std::pair<double, double>> witness_pos; // C - uv > tol here
    std::optional<std::pair<double, double>> witness_neg;
    double max_above = 0.0; // largest C - uv on the lattice
    double max_below = 0.0; // most negative C - uv
    bool marginal = false;  // decided within 10x of the tolerance
};

QDClassification classify_qd(const Copula& c, int grid_n = 200, double tol = 1e-9);

// Averaged dependence curve of Definition-4 type:
// curve(v) = int_0^1 (C(u,v) - uv) du.
double qde_curve_value(const Copula& c, double v, const Tolerance& tol = {});
std::vector<std::pair<double, double>> qde_curve(const Copula& c,
                                                 std::span<const double> v_points,
                                                 const Tolerance& tol = {});

enum class QdeVerdict { Nqde, Pqde, Both, Neither };

struct QDEClassification {
    QdeVerdict verdict = QdeVerdict::Both;
    std::optional<double> witness_pos;
    std::optional<double> witness_neg;
    double max_curve = 0.0;
    double min_curve = 0.0;
    bool marginal = false;
};

// Sign pattern of the curve on a uniform interior grid, plus geometric
// probes near both endpoints (the curve vanishes there, and a sign sliver
// can hide arbitrarily close to 0 or 1) and root refinement near changes.
QDEClassification classify_qde(const Copula& c, int n_points = 201, double tol = 1e-9,
                               const Tolerance& quad_tol = {});

// Mixture-weight thresholds for (1-a)*c0 + a*c1 between an NQD c0 and a
// PQD c1: QD flips outside (m, M), QDE flips at m' and M'.
struct ThresholdReport {
    double m = 0.0;
    double m_prime = 0.0;
    double M_prime = 0.0;
    double M = 0.0;
};

ThresholdReport qd_qde_thresholds(const Copula& c0, const Copula& c1, double tol = 1e-8);

// Constant kappa with curve0(v) / (curve0(v) - curve1(v)) = kappa on (0,1),
// if the grid spread stays within tol; absent otherwise.
std::optional<double> kappa_constant(const Copula& c0, const Copula& c1,
                                     int n_points = 101, double tol = 1e-8);

// Zero-curve geometry of the FGM(-1) + Frechet-upper mixture: the curves
// v_U(u) = (a/(1-a))/(1-u) and v_L(u) = 1 - (a/(1-a))/u bound the positive
// region; they meet inside the square only for small mixing weights.
struct ZeroCurveReport {
    enum class Kind { InteriorIntersection, Tangent, NoIntersection };
    double alpha = 0.0;
    double min_gap = 0.0; // min over u of v_U(u) - v_L(u)
    double argmin_u = 0.0;
    Kind kind = Kind::NoIntersection;
    std::vector<std::pair<double, double>> intersections;
};

ZeroCurveReport fgm_fu_zero_curves(double alpha, double tol = 1e-9);

// Mixing weight at which the two zero-curves touch, by root finding on the
// minimal gap.
double fgm_fu_tangency_alpha(const Tolerance& tol = {});

} // namespace qdep
