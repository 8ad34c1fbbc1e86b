#include <algorithm>
#include <cmath>

#include "cvxcone/errors.hpp"
#include "cvxcone/postprocess.hpp"
#include "test_util.hpp"

using namespace cvxcone;

TEST_SUITE("postprocess") {

TEST_CASE("gradient map of an affine function is constant") {
    Grid g = Grid::square(7, {-1, 1});
    GradientMap m = gradient_map(sample(g, [](double x, double y) { return 0.25 * x + 0.75 * y - 3; }));
    CHECK(cvxtest::inf_norm(m.gx - Vector::Constant(g.size(), 0.25)) < 1e-12);
    CHECK(cvxtest::inf_norm(m.gy - Vector::Constant(g.size(), 0.75)) < 1e-12);
    GradientMap line = gradient_map(sample(Grid::line(5), [](double x, double) { return 2 * x; }));
    CHECK(line.gy.size() == 0);
    CHECK(cvxtest::inf_norm(line.gx - Vector::Constant(5, 2.0)) < 1e-12);
}

TEST_CASE("gradient histogram") {
    GradientMap m;
    m.gx.resize(6);
    m.gy.resize(6);
    m.gx << 0.0, 0.49, 0.5, 1.0, 1.2, 0.9;
    m.gy << 0.0, 0.1, 0.5, 1.0, 0.5, -0.1;
    Histogram2D h = gradient_histogram(m, 2);
    CHECK(h.counts.size() == 4);
    CHECK(h.count(0, 0) == 2);
    CHECK(h.count(1, 1) == 2);
    CHECK(h.count(1, 0) == 0);
    CHECK(h.outside == 2);
    CHECK_THROWS_AS(gradient_histogram(m, 0), InvalidArgument);
    CHECK_THROWS_AS(gradient_histogram(m, 4, {1.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(gradient_histogram(GradientMap{m.gx, Vector()}), InvalidArgument);
    CHECK(to_csv(h).rfind("gx_lo,gx_hi,gy_lo,gy_hi,count\n", 0) == 0);
}

TEST_CASE("contour levels") {
    Grid g = Grid::square(5);
    GridFunction u = sample(g, [](double x, double y) { return x + y; });
    auto levels = contour_levels(u, 3);
    REQUIRE(levels.size() == 3);
    CHECK(levels[0] == doctest::Approx(0.5));
    CHECK(levels[1] == doctest::Approx(1.0));
    CHECK(levels[2] == doctest::Approx(1.5));
    CHECK(contour_levels(GridFunction(g), 4).empty());
    CHECK_THROWS_AS(contour_levels(u, 0), InvalidArgument);
}

TEST_CASE("contours of a linear function are straight") {
    Grid g = Grid::square(9);
    GridFunction u = sample(g, [](double x, double y) { return x + y; });
    auto c = contours(u, {0.8});
    REQUIRE(c.size() == 1);
    REQUIRE(c[0].polylines.size() == 1);
    const auto& line = c[0].polylines[0];
    CHECK(line.size() >= 2);
    for (const auto& p : line) CHECK(p[0] + p[1] == doctest::Approx(0.8).epsilon(1e-12));
    auto on_edge = [](const Point2& p) {
        return std::abs(p[0]) < 1e-12 || std::abs(p[1]) < 1e-12 || std::abs(p[0] - 1) < 1e-12 || std::abs(p[1] - 1) < 1e-12;
    };
    CHECK(on_edge(line.front()));
    CHECK(on_edge(line.back()));
}

TEST_CASE("contours of a paraboloid are closed curves") {
    Grid g = Grid::square(41, {-1, 1});
    GridFunction u = sample(g, [](double x, double y) { return x * x + y * y; });
    auto c = contours(u, {0.25});
    REQUIRE(c[0].polylines.size() == 1);
    const auto& loop = c[0].polylines[0];
    CHECK(loop.front() == loop.back());
    for (const auto& p : loop) CHECK(std::abs(std::hypot(p[0], p[1]) - 0.5) < g.h() * g.h());
    auto j = to_json(c);
    CHECK(j[0].at("level") == 0.25);
    CHECK(j[0].at("polylines")[0].size() == loop.size());
    CHECK_THROWS_AS(contours(GridFunction(Grid::line(5)), {0.0}), InvalidArgument);
}

TEST_CASE("gradient csv") {
    Grid g = Grid::square(3);
    GradientMap m = gradient_map(sample(g, [](double x, double) { return x; }));
    std::string csv = to_csv(m, g);
    CHECK(csv.rfind("x,y,gx,gy\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
}

}  // TEST_SUITE
