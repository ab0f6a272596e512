#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qdep/errors.hpp"

namespace qdep {

// Bivariate copula: the Frechet bounds, independence, FGM, the
// Genest-Ghoudi Archimedean family, and convex combinations thereof.
// Immutable after construction; evaluation is pure.
class Copula {
  public:
    enum class Family { FrechetLower, FrechetUpper, Independence, Fgm, GgArchimedean, Mix };

    static Copula frechet_lower();
    static Copula frechet_upper();
    static Copula independence();
    static Copula fgm(double theta);          // theta in [-1, 1]
    static Copula gg_archimedean(double alpha); // alpha in (0, 1) exclusive
    static Copula mix(std::vector<double> weights, std::vector<Copula> parts);

    // C(u, v); throws DomainError outside the unit square.
    double operator()(double u, double v) const;

    // dC/dv in [0,1]; analytic everywhere except the Archimedean family,
    // which uses a clamped central difference (one-sided at its kink).
    double partial_v(double u, double v) const;

    Family family() const { return family_; }
    double parameter() const { return param_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<Copula>& parts() const { return parts_; }

    // u-locations where u -> C(u, v) has a C0/C1 seam, for quadrature splits.
    std::vector<double> kink_points_u(double v) const;
    // Same for v -> C(u, v) at fixed u.
    std::vector<double> kink_points_v(double u) const;

  private:
    Copula(Family f, double param) : family_(f), param_(param) {}
    Copula(std::vector<double> w, std::vector<Copula> p);

    Family family_;
    double param_ = 0.0;
    std::vector<double> weights_;
    std::vector<Copula> parts_;
};

inline double eval(const Copula& c, double u, double v) { return c(u, v); }
Copula convex_combine(std::vector<double> weights, std::vector<Copula> parts);

struct AxiomReport {
    bool pass = false;
    double worst_rectangle_volume = 0.0; // most negative unit-cell volume
    double worst_margin_error = 0.0;     // groundedness + uniform margins
};

// Lattice check of groundedness, margins, and the 2-increasing property on
// a uniform (grid_n+1)^2 grid. A surface passes when every violation is
// within tol.
AxiomReport check_axioms(const std::function<double(double, double)>& surface,
                         int grid_n, double tol = 1e-12);
AxiomReport check_axioms(const Copula& c, int grid_n, double tol = 1e-12);

} // namespace qdep
