#pragma once

#include <span>
#include <utility>

#include "cvxcone/grid.hpp"

namespace cvxcone::analytic {

/**
 * One-parameter family of convex minimizers for
 *   J[u] = int_{-1}^{1} u_x^2 / 2 + f u dx,  u(-1) = u(1) = 0,
 * with the step source f = -c (x < 0), +c (x > 0). Each member is linear on
 * [-1, a] and quadratic on [a, 1], C^1 at x = a.
 */
struct Step1DSolution {
    double c = 1.0;
    double a = 0.0;

    double slope() const;      // m = -c (a - 1)^2 / 4
    double root() const;       // b = (a^2 + 2a - 1) / 2
    double operator()(double x) const;
    double objective() const;

    /// The member minimizing J: a* = sqrt(2) - 1.
    static Step1DSolution optimal(double c);
};

double step1d_value(double c, double a, double x);
double step1d_objective(double c, double a);
inline constexpr double kStepOptimalA = 0.41421356237309504880;  // sqrt(2) - 1

/// Step source used by the 1D problem (0 at the jump).
double step_source(double c, double x);

/// Exact minimizer of the gradient-box monopolist variant on [0,1]^2.
struct VariantSolution {
    static constexpr double a = 2.0 / 3.0;
    static double b();
    static double value();  // 2/27 (6 + sqrt 2)
    double operator()(double x, double y) const;
};

double variant_value(double x, double y);

/// Quadratic with Hessian eigenvalues (alpha, 1), the unit eigenvector rotated by theta.
struct RotatedQuadratic {
    double alpha = 0.0;
    double theta = 0.0;

    double cxx() const;  // coefficient of x^2
    double cxy() const;  // coefficient of xy
    double cyy() const;  // coefficient of y^2
    double operator()(double x, double y) const;
    /// Eigenvalues of the Hessian [[2cxx, cxy], [cxy, 2cyy]], ascending.
    std::pair<double, double> hessian_eigenvalues() const;
};

double rotated_quadratic(double alpha, double theta, double x, double y);

struct Point1D {
    double x;
    double value;
};

/// Lower convex hull of the points (monotone chain), evaluated at each input abscissa.
std::vector<double> lower_convex_hull_1d(std::span<const Point1D> points);
GridFunction lower_convex_hull_1d(const GridFunction& u);

}  // namespace cvxcone::analytic
