#include "cvxcone/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "cvxcone/errors.hpp"

namespace cvxcone {

Direction::Direction(int p_, int q_) : p(p_), q(q_) {
    if (p == 0 && q == 0) throw InvalidArgument("direction (0, 0) is not allowed");
    if (std::gcd(p, q) != 1) {
        throw InvalidArgument("direction (" + std::to_string(p) + ", " + std::to_string(q) +
                              ") is not primitive");
    }
    if (p < 0 || (p == 0 && q < 0)) {
        p = -p;
        q = -q;
    }
}

double Direction::norm() const { return std::sqrt(norm_squared()); }

double Direction::line_angle() const {
    double a = std::atan2(static_cast<double>(q), static_cast<double>(p));
    if (a < 0) a += std::numbers::pi;
    return a;
}

int Direction::width() const { return std::max(std::abs(p), std::abs(q)); }

bool StencilSet::contains(const Direction& d) const {
    return std::find(directions.begin(), directions.end(), d) != directions.end();
}

std::vector<Direction> directions(int width, int dim) {
    if (width < 1) throw InvalidArgument("stencil width must be >= 1");
    if (dim == 1) return {Direction(1, 0)};
    if (dim != 2) throw InvalidArgument("unsupported dimension " + std::to_string(dim));

    std::vector<Direction> out;
    for (int w = 1; w <= width; ++w) {
        std::vector<Direction> ring;
        for (int p = 0; p <= w; ++p) {
            for (int q = -w; q <= w; ++q) {
                if (std::max(p, std::abs(q)) != w) continue;
                if (p == 0 && q <= 0) continue;
                if (std::gcd(p, q) != 1) continue;
                ring.emplace_back(p, q);
            }
        }
        std::sort(ring.begin(), ring.end(), [](const Direction& a, const Direction& b) {
            return a.line_angle() < b.line_angle();
        });
        out.insert(out.end(), ring.begin(), ring.end());
    }
    return out;
}

double directional_resolution(std::span<const Direction> dirs, int dim) {
    if (dirs.empty()) throw InvalidArgument("directional_resolution of an empty direction set");
    if (dim == 1) return 0.0;
    std::vector<double> angles;
    angles.reserve(dirs.size());
    for (const auto& d : dirs) angles.push_back(d.line_angle());
    std::sort(angles.begin(), angles.end());
    double max_gap = angles.front() + std::numbers::pi - angles.back();
    for (std::size_t i = 1; i < angles.size(); ++i) max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
    return 0.5 * max_gap;
}

double convexity_threshold(double dtheta) {
    if (dtheta < 0.0) throw DomainError("dtheta must be nonnegative");
    // Small slack so that dtheta = pi/4 computed in floating point is accepted.
    if (dtheta > std::numbers::pi / 4 + 1e-12) {
        throw DomainError("dtheta > pi/4: the near-convexity bound does not apply");
    }
    double t = std::tan(dtheta);
    return t * t;
}

StencilSet make_stencil(int width, int dim) {
    StencilSet s;
    s.width = width;
    s.dim = dim;
    s.directions = directions(width, dim);
    s.dtheta = directional_resolution(s.directions, dim);
    s.tan2_dtheta = convexity_threshold(s.dtheta);
    return s;
}

StencilSet make_stencil(std::vector<Direction> dirs, int dim) {
    if (dim != 1 && dim != 2) throw InvalidArgument("unsupported dimension " + std::to_string(dim));
    StencilSet s;
    s.dim = dim;
    s.width = 0;
    for (const auto& d : dirs) s.width = std::max(s.width, d.width());
    s.dtheta = directional_resolution(dirs, dim);
    s.directions = std::move(dirs);
    s.tan2_dtheta = convexity_threshold(s.dtheta);
    return s;
}

}  // namespace cvxcone
