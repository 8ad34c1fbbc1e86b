#include "cvxcone/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cvxcone/errors.hpp"

namespace cvxcone::analytic {

namespace {

void check_step_domain(double c, double a) {
    if (!(c > 0.0)) throw DomainError("step1d: c must be positive");
    if (a < -1.0 || a > 1.0) throw DomainError("step1d: a must lie in [-1, 1]");
}

}  // namespace

double Step1DSolution::slope() const { return -c * (a - 1.0) * (a - 1.0) / 4.0; }

double Step1DSolution::root() const { return (a * a + 2.0 * a - 1.0) / 2.0; }

double Step1DSolution::operator()(double x) const {
    check_step_domain(c, a);
    if (x < -1.0 || x > 1.0) throw DomainError("step1d: x must lie in [-1, 1]");
    if (x <= a) return slope() * (x + 1.0);
    return c * (x - root()) * (x - 1.0) / 2.0;
}

double Step1DSolution::objective() const {
    check_step_domain(c, a);
    const double am1 = a - 1.0;
    const double j = -c * c * am1 * am1 * (3.0 * a * a + 10.0 * a - 1.0) / 48.0;
    // For a < 0 the quadratic piece also covers [a, 0), where f = -c.
    return a < 0.0 ? j + c * c * a * a * a / 3.0 : j;
}

Step1DSolution Step1DSolution::optimal(double c) { return {c, kStepOptimalA}; }

double step1d_value(double c, double a, double x) { return Step1DSolution{c, a}(x); }

double step1d_objective(double c, double a) { return Step1DSolution{c, a}.objective(); }

double step_source(double c, double x) {
    if (x < 0.0) return -c;
    if (x > 0.0) return c;
    return 0.0;
}

double VariantSolution::b() { return (4.0 - std::numbers::sqrt2) / 3.0; }

double VariantSolution::value() { return 2.0 / 27.0 * (6.0 + std::numbers::sqrt2); }

double VariantSolution::operator()(double x, double y) const {
    return std::max({0.0, x - a, y - a, x + y - b()});
}

double variant_value(double x, double y) { return VariantSolution{}(x, y); }

double RotatedQuadratic::cxx() const {
    const double c = std::cos(theta), s = std::sin(theta);
    return (c * c + alpha * s * s) / 2.0;
}

double RotatedQuadratic::cxy() const { return (1.0 - alpha) * std::cos(theta) * std::sin(theta); }

double RotatedQuadratic::cyy() const {
    const double c = std::cos(theta), s = std::sin(theta);
    return (alpha * c * c + s * s) / 2.0;
}

double RotatedQuadratic::operator()(double x, double y) const {
    return cxx() * x * x + cxy() * x * y + cyy() * y * y;
}

std::pair<double, double> RotatedQuadratic::hessian_eigenvalues() const {
    const double hxx = 2.0 * cxx(), hyy = 2.0 * cyy(), hxy = cxy();
    const double mean = 0.5 * (hxx + hyy);
    const double rad = std::hypot(0.5 * (hxx - hyy), hxy);
    return {mean - rad, mean + rad};
}

double rotated_quadratic(double alpha, double theta, double x, double y) {
    return RotatedQuadratic{alpha, theta}(x, y);
}

std::vector<double> lower_convex_hull_1d(std::span<const Point1D> points) {
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].x > points[i - 1].x)) {
            throw InvalidArgument("lower_convex_hull_1d: abscissae must be strictly increasing");
        }
    }
    // Monotone chain over points already sorted by x; keep only left turns.
    std::vector<std::size_t> hull;
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        return (points[a].x - points[o].x) * (points[b].value - points[o].value) -
               (points[a].value - points[o].value) * (points[b].x - points[o].x);
    };
    for (std::size_t i = 0; i < points.size(); ++i) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), i) <= 0.0) hull.pop_back();
        hull.push_back(i);
    }
    std::vector<double> out(points.size());
    std::size_t seg = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        while (seg + 1 < hull.size() && hull[seg + 1] <= i) ++seg;
        if (hull[seg] == i) {
            out[i] = points[i].value;
            continue;
        }
        const auto& p0 = points[hull[seg]];
        const auto& p1 = points[hull[seg + 1]];
        const double t = (points[i].x - p0.x) / (p1.x - p0.x);
        out[i] = p0.value + t * (p1.value - p0.value);
    }
    return out;
}

GridFunction lower_convex_hull_1d(const GridFunction& u) {
    if (u.grid.dim() != 1) throw InvalidArgument("lower_convex_hull_1d needs a 1D grid function");
    std::vector<Point1D> pts;
    pts.reserve(static_cast<std::size_t>(u.grid.size()));
    for (int k = 0; k < u.grid.size(); ++k) pts.push_back({u.grid.coord(k), u.values[k]});
    auto hull = lower_convex_hull_1d(pts);
    return GridFunction(u.grid, Eigen::Map<Vector>(hull.data(), static_cast<Eigen::Index>(hull.size())));
}

}  // namespace cvxcone::analytic
