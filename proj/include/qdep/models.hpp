#pragma once

#include <utility>
#include <vector>

#include "qdep/copula.hpp"
#include "qdep/numerics.hpp"

namespace qdep {

// Marginal law of one coordinate: uniform on [0,1], or a finite discrete
// law with strictly increasing support points.
class Marginal {
  public:
    static Marginal uniform_unit();
    static Marginal finite_discrete(std::vector<double> points, std::vector<double> probs);

    bool is_uniform() const { return uniform_; }
    double cdf(double y) const; // right-continuous

    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& probs() const { return probs_; }
    // Partial sums p_1, p_1+p_2, ..., 1 (discrete only).
    const std::vector<double>& cumulative() const { return cum_; }

    double mean() const;
    double variance() const;
    double support_lo() const;
    double support_hi() const;

  private:
    Marginal() = default;
    bool uniform_ = true;
    std::vector<double> points_, probs_, cum_;
};

// Bounded-variation distortion applied to Y, with its monotone
// decomposition beta = beta1 - beta2 and total-variation measure d|beta|.
class Distortion {
  public:
    enum class Kind { Identity, Power, PiecewiseLinear };

    static Distortion identity();
    static Distortion power(double k); // beta(y) = y^k, k >= 1, y >= 0
    static Distortion piecewise_linear(std::vector<double> knots, std::vector<double> values);

    double operator()(double y) const;
    double derivative(double y) const;     // beta'(y), right slope at knots
    double abs_derivative(double y) const; // |beta'(y)| = d|beta|/dy
    double beta1(double y) const;          // non-decreasing part
    double beta2(double y) const;          // non-decreasing part
    // Total variation of beta over [lo, hi].
    double total_variation(double lo, double hi) const;
    // Interior derivative seams, for quadrature splits.
    std::vector<double> kinks_in(double lo, double hi) const;

    Kind kind() const { return kind_; }
    double power_exponent() const { return k_; }

  private:
    Distortion() = default;
    Kind kind_ = Kind::Identity;
    double k_ = 1.0;
    std::vector<double> knots_, values_;
};

// Copula plus two marginals; P[X<=x, Y<=y] = C(F(x), G(y)).
struct JointModel {
    Copula copula;
    Marginal marginal_x;
    Marginal marginal_y;
};

inline double cdf(const Marginal& m, double y) { return m.cdf(y); }

// Cov[X, 1{Y > y}] computed from the copula representation: quadrature over
// x for uniform X, a finite sum for discrete X.
double threshold_cov(const JointModel& jm, double y, const Tolerance& tol = {});

// Centered regression function E[U | V = v] - 1/2 for uniform marginals.
double regression_curve(const JointModel& jm, double v, const Tolerance& tol = {});

// Widest maximal subinterval of (0,1) on which the QDE curve of `c`
// exceeds `threshold`, located by a dense scan plus root refinement.
// Throws NoPositiveInterval when no scan point qualifies.
std::pair<double, double> locate_positive_interval(const Copula& c, double threshold,
                                                   int scan_points = 2001,
                                                   const Tolerance& tol = {});

struct PqdeConstruction {
    Marginal marginal = Marginal::uniform_unit(); // replaced by the discrete law
    double v_lo = 0.0; // located positive interval
    double v_hi = 0.0;
    std::vector<double> partial_sums; // interior cdf levels, all inside (v_lo, v_hi)
    bool equal_probs = false;         // whether plain 1/k weights already worked
};

// Discrete Y making (U, Y) PQDE but not QD under the Archimedean copula
// with the given alpha: every interior cdf level lands where the QDE curve
// is strictly positive.
PqdeConstruction construct_pqde_marginal(double alpha, int k, const Tolerance& tol = {});

} // namespace qdep
