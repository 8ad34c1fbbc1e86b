#pragma once

#include <array>
#include <vector>

#include <json.hpp>

#include "cvxcone/grid.hpp"

namespace cvxcone {

/// Centered-difference gradient of u at every node (gy is empty in 1D).
struct GradientMap {
    Vector gx;
    Vector gy;
};

GradientMap gradient_map(const GridFunction& u);

/// Bin counts of 2D points over [lo, hi]^2, row-major with the y bin outer.
struct Histogram2D {
    int bins = 32;
    Interval range{0.0, 1.0};
    std::vector<int> counts;
    int outside = 0;

    int count(int ix, int iy) const { return counts[static_cast<std::size_t>(iy * bins + ix)]; }
};

Histogram2D gradient_histogram(const GradientMap& g, int bins = 32, Interval range = {0.0, 1.0});

using Point2 = std::array<double, 2>;

struct ContourLevel {
    double level = 0.0;
    std::vector<std::vector<Point2>> polylines;
};

/// Evenly spaced levels strictly inside the value range of u.
std::vector<double> contour_levels(const GridFunction& u, int count);

/// Marching-squares level sets of a 2D grid function, joined into polylines.
std::vector<ContourLevel> contours(const GridFunction& u, const std::vector<double>& levels);

std::string to_csv(const GradientMap& g, const Grid& grid);
std::string to_csv(const Histogram2D& h);
nlohmann::json to_json(const std::vector<ContourLevel>& levels);

}  // namespace cvxcone
