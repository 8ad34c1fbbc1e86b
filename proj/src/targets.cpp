#include "cvxcone/targets.hpp"

#include <cmath>
#include <numbers>

#include "cvxcone/analytic.hpp"
#include "cvxcone/errors.hpp"

namespace cvxcone {

namespace {

double bump(double x, double y) {
    return std::exp(-30.0 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)));
}

}  // namespace

PointFunction builtin_target(const std::string& name, const TargetParams& params) {
    using std::numbers::pi;
    if (name == "zero") return [](double, double) { return 0.0; };
    if (name == "sin_pi") return [](double x, double) { return std::sin(pi * x); };
    if (name == "sin_2pi") return [](double x, double) { return std::sin(2.0 * pi * x); };
    if (name == "neg_x2") return [](double x, double) { return -x * x; };
    if (name == "spiky") return [](double x, double y) { return -(4.0 + 5.0 * x * y * y) * bump(x, y); };
    if (name == "gaussian_bump") return bump;
    if (name == "gaussian_well") return [](double x, double y) { return -bump(x, y); };
    if (name == "xy") return [](double x, double y) { return x * y; };
    if (name == "abs_x_minus_3y") return [](double x, double y) { return std::abs(x - 3.0 * y); };
    if (name == "x_minus_3y_sq") return [](double x, double y) { return (x - 3.0 * y) * (x - 3.0 * y); };
    if (name == "rotated_quadratic") {
        analytic::RotatedQuadratic g{params.alpha, params.theta};
        return [g](double x, double y) { return g(x, y); };
    }
    if (name == "variant_exact") return analytic::variant_value;
    if (name == "step") {
        double c = params.c;
        return [c](double x, double) { return analytic::step_source(c, x); };
    }
    throw InvalidArgument("unknown target '" + name + "'");
}

std::vector<std::string> target_names() {
    return {"zero",          "sin_pi",        "sin_2pi",        "neg_x2",        "spiky",
            "gaussian_bump", "gaussian_well", "xy",             "abs_x_minus_3y", "x_minus_3y_sq",
            "rotated_quadratic", "variant_exact", "step"};
}

Interval default_bounds(const std::string& name) {
    if (name == "sin_pi" || name == "step") return {-1.0, 1.0};
    return {0.0, 1.0};
}

int default_dim(const std::string& name) {
    if (name == "sin_pi" || name == "sin_2pi" || name == "neg_x2" || name == "step") return 1;
    return 2;
}

}  // namespace cvxcone
