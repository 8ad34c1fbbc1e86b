#pragma once

#include <span>
#include <vector>

namespace cvxcone {

/**
 * Integer grid direction. Stored in the half-plane representative with
 * p > 0, or p == 0 and q > 0; v and -v give the same symmetric second
 * difference so only one of them is kept. In 1D the single direction is (1, 0).
 */
struct Direction {
    int p = 1;
    int q = 0;

    Direction() = default;
    Direction(int p, int q);

    double norm() const;
    double norm_squared() const { return static_cast<double>(p) * p + static_cast<double>(q) * q; }
    /// Angle of the direction line, in [0, pi).
    double line_angle() const;
    int width() const;

    bool operator==(const Direction&) const = default;
};

struct StencilSet {
    int width = 1;
    int dim = 2;
    std::vector<Direction> directions;
    double dtheta = 0.0;
    double tan2_dtheta = 0.0;

    bool contains(const Direction& d) const;
};

/// All coprime directions with max(|p|, |q|) <= width, sorted by (width, angle).
std::vector<Direction> directions(int width, int dim = 2);

/// Half the largest angular gap between consecutive direction lines (0 in 1D).
double directional_resolution(std::span<const Direction> dirs, int dim = 2);

/// tan^2(dtheta); valid for 0 <= dtheta <= pi/4.
double convexity_threshold(double dtheta);

StencilSet make_stencil(int width, int dim = 2);
/// Stencil from an explicit direction list (e.g. axes only).
StencilSet make_stencil(std::vector<Direction> dirs, int dim = 2);

}  // namespace cvxcone
