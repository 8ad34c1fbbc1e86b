#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cvxcone/analytic.hpp"
#include "cvxcone/cone.hpp"
#include "cvxcone/errors.hpp"
#include "cvxcone/targets.hpp"
#include "test_util.hpp"

using namespace cvxcone;
using cvxtest::dense;

namespace {

bool rows_satisfied(const ConeConstraints& c, const Vector& x, double tol = 1e-12) {
    Vector ax = c.A * x;
    for (Eigen::Index r = 0; r < ax.size(); ++r)
        if (ax[r] < c.lower[r] - tol || ax[r] > c.upper[r] + tol) return false;
    return true;
}

GridFunction rotated(const Grid& g, double alpha, double theta) {
    return sample(g, [=](double x, double y) { return analytic::rotated_quadratic(alpha, theta, x, y); });
}

}  // namespace

TEST_SUITE("cone") {

TEST_CASE("1D outer rows are the interior second differences") {
    Grid g = Grid::line(5, {0, 4});
    ConeConstraints c = second_difference_rows(g, make_stencil(1, 1));
    CHECK(c.rows() == 3);
    CHECK(dense(c.A) == dense(assemble_dxx_1d(5, 1.0)));
    CHECK(c.lower == Vector::Zero(3));
    CHECK(c.upper.array().isInf().all());
    CHECK(c.num_aux == 0);
}

TEST_CASE("2D row count follows the boundary policy") {
    Grid g = Grid::square(5);
    StencilSet s = make_stencil(1);
    ConeConstraints c = second_difference_rows(g, s);
    int expected = 0;
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 5; ++i)
            for (const auto& d : s.directions)
                if (g.contains(i + d.p, j + d.q) && g.contains(i - d.p, j - d.q)) ++expected;
    CHECK(c.rows() == expected);
    CHECK(c.rows() == 48);
    for (int r = 0; r < c.rows(); ++r) {
        const RowTag& tag = c.row_index[static_cast<std::size_t>(r)];
        auto [i, j] = g.multi_index(tag.node);
        const Direction& d = s.directions[static_cast<std::size_t>(tag.direction)];
        CHECK(g.contains(i + d.p, j + d.q));
        CHECK(g.contains(i - d.p, j - d.q));
    }
}

TEST_CASE("outer rows have three entries in ratio 1 : -2 : 1") {
    Grid g = Grid::square(7, {-1, 1});
    StencilSet s = make_stencil(3);
    ConeConstraints c = second_difference_rows(g, s);
    SparseMatrix rows = SparseMatrix(c.A.transpose());
    for (int r = 0; r < rows.outerSize(); ++r) {
        int count = 0;
        double sum = 0.0;
        double center = 0.0;
        for (SparseMatrix::InnerIterator it(rows, r); it; ++it) {
            ++count;
            sum += it.value();
            if (it.row() == c.row_index[static_cast<std::size_t>(r)].node) center = it.value();
        }
        const Direction& d = s.directions[static_cast<std::size_t>(c.row_index[static_cast<std::size_t>(r)].direction)];
        CHECK(count == 3);
        CHECK(std::abs(sum) < 1e-9);
        CHECK(center == doctest::Approx(-2.0 / (g.h() * g.h() * d.norm_squared())));
    }
}

TEST_CASE("affine functions have zero margin") {
    Grid g = Grid::square(9, {-1, 1});
    GridFunction u = sample(g, [](double x, double y) { return 1 + 2 * x - y; });
    for (int w = 1; w <= 3; ++w) {
        CertificateReport r = certify(u, make_stencil(w));
        CHECK(r.feasible);
        CHECK(std::abs(r.worst_margin) < 1e-9);
    }
}

TEST_CASE("quadratics are differenced exactly") {
    std::mt19937 rng(11);
    Grid g = Grid::square(9, {-1, 1});
    for (int trial = 0; trial < 10; ++trial) {
        Vector c = cvxtest::random_vector(rng, 3, -2, 2);
        Eigen::Matrix2d Q;
        Q << c[0], c[1], c[1], c[2];
        GridFunction u = sample(g, [&](double x, double y) {
            Eigen::Vector2d p(x, y);
            return 0.5 * p.dot(Q * p);
        });
        for (int w = 1; w <= 3; ++w) {
            StencilSet s = make_stencil(w);
            ConeConstraints rows = second_difference_rows(g, s);
            Vector sd = second_differences(u, s);
            for (int r = 0; r < rows.rows(); ++r) {
                const Direction& d = s.directions[static_cast<std::size_t>(rows.row_index[static_cast<std::size_t>(r)].direction)];
                Eigen::Vector2d v(d.p, d.q);
                double expected = v.dot(Q * v) / v.squaredNorm();
                CHECK(sd[r] == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
            }
        }
    }
}

TEST_CASE("xy is convex along the axes only") {
    Grid g = Grid::square(11);
    GridFunction u = sample(g, builtin_target("xy"));
    CertificateReport axes = certify(u, make_stencil({Direction(1, 0), Direction(0, 1)}));
    CHECK(axes.feasible);
    CHECK(std::abs(axes.worst_margin) < 1e-9);

    CertificateReport w1 = certify(u, make_stencil(1));
    CHECK_FALSE(w1.feasible);
    CHECK(w1.worst_margin == doctest::Approx(-1.0));
    CHECK(!w1.violations.empty());
    for (const auto& v : w1.violations) {
        CHECK(v.direction == Direction(1, -1));
        // Oracle: v^T H v / |v|^2 with H = [[0, 1], [1, 0]] and v = (1, -1).
        CHECK(v.value == doctest::Approx(-2.0 / 2.0));
    }
    CHECK(w1.eigen_ratio_bound == doctest::Approx(-make_stencil(1).tan2_dtheta));
}

TEST_CASE("rotated quadratic is missed by the width-1 stencil") {
    Grid g = Grid::square(21);
    GridFunction u = rotated(g, -0.1, std::numbers::pi / 8);
    CHECK(certify(u, make_stencil(1)).feasible);
    CHECK_FALSE(certify(u, make_stencil(2)).feasible);
}

TEST_CASE("|x - 3y| passes widths 1 to 3") {
    Grid g = Grid::square(21);
    GridFunction u = sample(g, builtin_target("abs_x_minus_3y"));
    for (int w = 1; w <= 3; ++w) CHECK(certify(u, make_stencil(w)).feasible);
}

TEST_CASE("feasibility at a wider stencil implies feasibility at a narrower one") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> a(-0.3, 1.0), th(0.0, std::numbers::pi);
    Grid g = Grid::square(13);
    for (int trial = 0; trial < 40; ++trial) {
        GridFunction u = rotated(g, a(rng), th(rng));
        for (int w = 1; w < 4; ++w)
            if (certify(u, make_stencil(w + 1)).feasible) CHECK(certify(u, make_stencil(w)).feasible);
    }
}

TEST_CASE("outer feasibility boundary sits at -tan^2(dtheta)") {
    // Put the negative eigenvector in the middle of the widest angular gap.
    const double step = 0.005;
    Grid g = Grid::square(11, {-1, 1});
    for (int w = 1; w <= 4; ++w) {
        StencilSet s = make_stencil(w);
        std::vector<double> angles;
        for (const auto& d : s.directions) angles.push_back(d.line_angle());
        std::sort(angles.begin(), angles.end());
        double gap = 0.0, mid = 0.0;
        for (std::size_t k = 0; k < angles.size(); ++k) {
            double next = k + 1 < angles.size() ? angles[k + 1] : angles[0] + std::numbers::pi;
            if (next - angles[k] > gap) {
                gap = next - angles[k];
                mid = 0.5 * (angles[k] + next);
            }
        }
        const double theta = mid - std::numbers::pi / 2;
        double boundary = 1.0;
        for (double alpha = -0.5; alpha <= 0.0; alpha += step)
            if (certify(rotated(g, alpha, theta), s).feasible) {
                boundary = alpha;
                break;
            }
        CHECK(std::abs(boundary + s.tan2_dtheta) <= step + 1e-12);
    }
}

TEST_CASE("outer feasible quadratics respect the eigenvalue ratio bound") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> a(-0.5, 0.5), th(0.0, std::numbers::pi);
    Grid g = Grid::square(9);
    for (int w = 1; w <= 3; ++w) {
        StencilSet s = make_stencil(w);
        for (int trial = 0; trial < 50; ++trial) {
            double alpha = a(rng);
            if (certify(rotated(g, alpha, th(rng)), s).feasible) CHECK(alpha >= -s.tan2_dtheta - 1e-9);
        }
    }
}

TEST_CASE("inner cone rows") {
    Grid g = Grid::square(7);
    StencilSet s = make_stencil(1);
    ConeConstraints c = inner_cone_rows(g, s, 0.5);
    const int nr = second_difference_rows(g, s).rows();
    CHECK(c.num_aux == 2);
    CHECK(c.rows() == 2 * nr + 2);
    CHECK(c.A.cols() == g.size() + 2);
    CHECK(c.strictness_weight == 0.5);
    CHECK_THROWS_AS(inner_cone_rows(g, s, -1.0), InvalidArgument);

    // Isotropic quadratic: every normalized second difference is 1.
    GridFunction iso = sample(g, [](double x, double y) { return 0.5 * (x * x + y * y); });
    Vector x(g.size() + 2);
    x << iso.values, 1.0, 1.0;
    CHECK(rows_satisfied(c, x, 1e-9));

    // Affine: gamma = Lambda = 0.
    GridFunction aff = sample(g, [](double x, double y) { return 2 * x + y; });
    x << aff.values, 0.0, 0.0;
    CHECK(rows_satisfied(c, x, 1e-9));
    CHECK(check_inner_cone(aff, s).feasible);
}

TEST_CASE("inner cone check agrees with the rows") {
    Grid g = Grid::square(9);
    StencilSet s = make_stencil(1);
    ConeConstraints c = inner_cone_rows(g, s);
    // Oracle for the rotated quadratic: extreme directional curvatures over the stencil.
    auto extremes = [&](double alpha, double theta) {
        analytic::RotatedQuadratic q{alpha, theta};
        Eigen::Matrix2d H;
        H << 2 * q.cxx(), q.cxy(), q.cxy(), 2 * q.cyy();
        double lo = 1e300, hi = -1e300;
        for (const auto& d : s.directions) {
            Eigen::Vector2d v(d.p, d.q);
            double val = v.dot(H * v) / v.squaredNorm();
            lo = std::min(lo, val);
            hi = std::max(hi, val);
        }
        return std::pair{lo, hi};
    };
    struct Case {
        double alpha, theta;
        bool feasible;
    };
    // theta = pi/8: min - t max = alpha (cos^4 - sin^4) / cos^2, so the sign of alpha decides.
    // theta = 0: curvatures alpha, (1 + alpha)/2, 1 need alpha >= t.
    for (Case k : {Case{0.01, std::numbers::pi / 8, true}, Case{-0.01, std::numbers::pi / 8, false},
                   Case{0.1, 0.0, false}, Case{0.2, 0.0, true}}) {
        auto [lo, hi] = extremes(k.alpha, k.theta);
        CHECK((lo >= 0 && lo - s.tan2_dtheta * hi >= 0) == k.feasible);
        GridFunction u = rotated(g, k.alpha, k.theta);
        InnerConeCheck check = check_inner_cone(u, s);
        CHECK(check.feasible == k.feasible);
        CHECK(check.min_value == doctest::Approx(lo).epsilon(1e-9));
        CHECK(check.max_value == doctest::Approx(hi).epsilon(1e-9));
        Vector x(g.size() + 2);
        x << u.values, check.min_value, check.max_value;
        CHECK(rows_satisfied(c, x, 1e-9) == k.feasible);
    }
    CHECK(certify(rotated(g, 0.1, 0.0), s).feasible);
}

TEST_CASE("inner cone feasibility implies a nonnegative eigenvalue") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> a(-1.0, 1.0), th(0.0, std::numbers::pi);
    Grid g = Grid::square(9);
    for (int w = 1; w <= 3; ++w) {
        StencilSet s = make_stencil(w);
        for (int trial = 0; trial < 40; ++trial) {
            double alpha = a(rng);
            if (check_inner_cone(rotated(g, alpha, th(rng)), s).feasible) CHECK(alpha >= -1e-9);
        }
    }
}

TEST_CASE("certificate json") {
    Grid g = Grid::square(5);
    auto j = to_json(certify(sample(g, builtin_target("xy")), make_stencil(1)));
    CHECK(j.at("feasible") == false);
    CHECK(j.at("violations").size() == 9);
    CHECK(j.at("violations")[0].at("direction") == nlohmann::json({1, -1}));
    CHECK(j.contains("eigen_ratio_bound"));
    CHECK(j.contains("worst_margin"));
    CHECK_THROWS_AS(certify(GridFunction(Grid::line(5)), make_stencil(1)), InvalidArgument);
}

}  // TEST_SUITE
