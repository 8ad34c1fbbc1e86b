#include <cmath>
#include <numbers>
#include <random>

#include "cvxcone/analytic.hpp"
#include "cvxcone/errors.hpp"
#include "cvxcone/postprocess.hpp"
#include "cvxcone/problems.hpp"
#include "cvxcone/targets.hpp"
#include "test_util.hpp"

using namespace cvxcone;
using cvxtest::checked_solve;
using cvxtest::inf_norm;

namespace {

ProblemSpec projection_spec(const Grid& g, Norm norm, const PointFunction& f, int width = 1) {
    ProblemSpec spec;
    spec.kind = ProblemKind::projection;
    spec.norm = norm;
    spec.grid = g;
    spec.width = width;
    spec.target = sample(g, f);
    return spec;
}

Vector solve_grid(const ProblemSpec& spec, const SolverSettings& st = {}) {
    QpProblem qp = build_problem(spec);
    Solution sol = checked_solve(qp, st);
    REQUIRE(sol.status == SolveStatus::optimal);
    return qp.grid_values(sol.x);
}

// Random convex quadratic plus affine part, evaluated pointwise.
PointFunction random_convex(std::mt19937& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    double a = d(rng), b = d(rng), c = d(rng);
    Eigen::Matrix2d L;
    L << a, 0, b, c;
    Eigen::Matrix2d Q = L * L.transpose();
    double bx = d(rng), by = d(rng), k = d(rng);
    return [=](double x, double y) {
        Eigen::Vector2d p(x, y);
        return 0.5 * p.dot(Q * p) + bx * x + by * y + k;
    };
}

}  // namespace

TEST_SUITE("problems") {

TEST_CASE("quadrature weights") {
    Grid l = Grid::line(5, {0, 1});
    Vector trap = quadrature_weights(l, QuadratureRule::trapezoidal).weights;
    Vector expected(5);
    expected << .125, .25, .25, .25, .125;
    CHECK(inf_norm(trap - expected) < 1e-15);
    CHECK(inf_norm(quadrature_weights(l, QuadratureRule::zeroth).weights - Vector::Constant(5, 0.2)) < 1e-15);

    Grid g = Grid::square(3, {0, 2});
    Vector w2 = quadrature_weights(g, QuadratureRule::trapezoidal).weights;
    Vector e2(9);
    e2 << .25, .5, .25, .5, 1, .5, .25, .5, .25;
    CHECK(inf_norm(w2 - e2) < 1e-15);
    CHECK(w2.sum() == doctest::Approx(4.0));
    CHECK(quadrature_weights(g, QuadratureRule::zeroth).weights.sum() == doctest::Approx(4.0));

    // Trapezoidal integrates bilinear functions exactly.
    Grid s = Grid::square(7, {-1, 2});
    Vector f = sample(s, [](double x, double y) { return 1 + x + 2 * y + 3 * x * y; }).values;
    double exact = 9 + 9 * 0.5 + 2 * 9 * 0.5 + 3 * 1.5 * 1.5;
    CHECK(quadrature_weights(s, QuadratureRule::trapezoidal).weights.dot(f) == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("linf and l1 reformulation structure") {
    Grid g = Grid::line(4, {0, 1});
    QpProblem linf = build_problem(projection_spec(g, Norm::Linf, builtin_target("sin_pi")));
    CHECK(linf.num_vars() == 5);
    CHECK(linf.num_rows() == 8 + 2);
    CHECK(linf.P.nonZeros() == 0);
    CHECK(linf.q[4] == 1.0);
    CHECK(linf.layout.t_count == 1);

    QpProblem l1 = build_problem(projection_spec(g, Norm::L1, builtin_target("sin_pi")));
    CHECK(l1.num_vars() == 8);
    CHECK(l1.num_rows() == 8 + 2);
    CHECK(l1.q.tail(4).sum() == doctest::Approx(1.0));
}

TEST_CASE("problem shapes") {
    Grid g = Grid::square(5);
    ProblemSpec spec = projection_spec(g, Norm::H1_0, builtin_target("xy"));
    QpProblem qp = build_problem(spec);
    CHECK(qp.num_vars() == 25);
    CHECK(qp.num_rows() == 16 + 48);

    spec.norm = Norm::H1_gradbox;
    CHECK(build_problem(spec).num_rows() == 50 + 48);

    spec.norm = Norm::L2;
    spec.cone = ConeKind::inner;
    QpProblem inner = build_problem(spec);
    CHECK(inner.num_vars() == 27);
    CHECK(inner.layout.gamma == 25);
    CHECK(inner.layout.lambda == 26);

    ProblemSpec bad = spec;
    bad.target = sample(Grid::square(6), builtin_target("xy"));
    CHECK_THROWS_AS(build_problem(bad), InvalidSpec);
    bad.target.reset();
    CHECK_THROWS_AS(build_problem(bad), InvalidSpec);
    spec.anchors.push_back({99, 0.0});
    CHECK_THROWS_AS(build_problem(spec), InvalidArgument);
}

TEST_CASE("objective gradient matches finite differences") {
    std::mt19937 rng(4);
    Grid g = Grid::square(6);
    std::vector<QpProblem> problems;
    for (Norm n : {Norm::L2, Norm::H1}) problems.push_back(build_problem(projection_spec(g, n, builtin_target("spiky"))));
    ProblemSpec mono;
    mono.kind = ProblemKind::monopolist;
    mono.grid = g;
    mono.c = 0.7;
    problems.push_back(build_problem(mono));
    mono.kind = ProblemKind::monopolist_variant;
    problems.push_back(build_problem(mono));
    for (const auto& qp : problems) {
        Vector x = cvxtest::random_vector(rng, qp.num_vars());
        Vector grad = qp.P * x + qp.q;
        const double step = 1e-5;
        for (int k = 0; k < qp.num_vars(); ++k) {
            Vector e = Vector::Zero(qp.num_vars());
            e[k] = step;
            double fd = (functional_value(qp, x + e) - functional_value(qp, x - e)) / (2 * step);
            CHECK(std::abs(fd - grad[k]) <= 1e-6 * std::max(1.0, std::abs(grad[k])));
        }
    }
}

TEST_CASE("monopolist linear term integrates u minus grad u dot x") {
    // Centered differences are exact on affine functions.
    Grid g = Grid::square(9);
    ProblemSpec spec;
    spec.kind = ProblemKind::monopolist;
    spec.grid = g;
    QpProblem qp = build_problem(spec);
    Vector w = quadrature_weights(g, spec.quadrature).weights;
    GridFunction u = sample(g, [](double x, double y) { return 0.3 + 0.5 * x + 0.25 * y; });
    double expected = 0.0;
    for (int k = 0; k < g.size(); ++k) {
        auto [x, y] = g.point(k);
        expected += w[k] * (u[k] - 0.5 * x - 0.25 * y);
    }
    CHECK(qp.q.dot(u.values) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.3));
}

TEST_CASE("projection of the zero target is zero") {
    Grid g = Grid::square(11);
    Vector u = solve_grid(projection_spec(g, Norm::L2, builtin_target("zero")));
    CHECK(inf_norm(u) < 1e-9);
}

TEST_CASE("convex targets are fixed points") {
    std::mt19937 rng(17);
    Grid l = Grid::line(21, {-1, 1});
    PointFunction para = [](double x, double) { return x * x - 0.3 * x; };
    for (Norm n : {Norm::L2, Norm::H1, Norm::H1_0, Norm::L1, Norm::Linf}) {
        ProblemSpec spec = projection_spec(l, n, para);
        if (n == Norm::H1_0) spec.target = sample(l, [](double x, double) { return x * x - 1; });
        QpProblem qp = build_problem(spec);
        Solution sol = checked_solve(qp);
        REQUIRE(sol.status == SolveStatus::optimal);
        if (n == Norm::L1 || n == Norm::Linf)
            CHECK(std::abs(sol.objective) < 1e-6);
        else
            CHECK(inf_norm(qp.grid_values(sol.x) - spec.target->values) < 1e-6);
    }
    Grid g = Grid::square(9);
    for (int trial = 0; trial < 3; ++trial) {
        ProblemSpec spec = projection_spec(g, Norm::L2, random_convex(rng), 2);
        CHECK(inf_norm(solve_grid(spec) - spec.target->values) < 1e-6);
    }
}

TEST_CASE("projections are idempotent") {
    std::vector<ProblemSpec> specs;
    Grid l = Grid::line(15, {-1, 1});
    Grid g = Grid::square(5);
    for (Norm n : {Norm::L2, Norm::H1, Norm::H1_0, Norm::H1_gradbox, Norm::L1, Norm::Linf}) {
        specs.push_back(projection_spec(l, n, [](double x, double) { return std::sin(3 * x); }));
        specs.push_back(projection_spec(g, n, builtin_target("spiky")));
    }
    for (const auto& spec : specs) {
        CAPTURE(to_string(spec.norm));
        CAPTURE(spec.grid.dim());
        QpProblem qp = build_problem(spec);
        Solution first = checked_solve(qp);
        REQUIRE(first.status == SolveStatus::optimal);
        ProblemSpec again = spec;
        again.target = GridFunction(spec.grid, qp.grid_values(first.x));
        QpProblem qp2 = build_problem(again);
        Solution second = checked_solve(qp2);
        REQUIRE(second.status == SolveStatus::optimal);
        const double tol = 10 * 1e-6 * std::max(1.0, inf_norm(again.target->values));
        if (spec.norm == Norm::L1 || spec.norm == Norm::Linf || spec.norm == Norm::H1_gradbox) {
            // The first minimizer is feasible, so the distance to it is zero.
            CHECK(std::abs(functional_value(qp2, second.x)) < tol);
        } else {
            CHECK(inf_norm(qp2.grid_values(second.x) - again.target->values) < tol);
        }
    }
}

TEST_CASE("l2 projection satisfies the variational inequality") {
    std::mt19937 rng(23);
    Grid g = Grid::square(9);
    ProblemSpec spec = projection_spec(g, Norm::L2, builtin_target("spiky"));
    Vector p = solve_grid(spec);
    Vector w = quadrature_weights(g, spec.quadrature).weights;
    Vector r = w.cwiseProduct(spec.target->values - p);
    StencilSet s = make_stencil(1);
    for (int trial = 0; trial < 20; ++trial) {
        GridFunction v = sample(g, random_convex(rng));
        REQUIRE(certify(v, s).feasible);
        CHECK(r.dot(v.values - p) <= 1e-5);
    }
    // Cone: the projection is orthogonal to the residual.
    CHECK(std::abs(r.dot(p)) <= 1e-5);
}

TEST_CASE("projection commutes with adding constants") {
    Grid g = Grid::square(9);
    ProblemSpec a = projection_spec(g, Norm::L2, builtin_target("spiky"));
    ProblemSpec b = projection_spec(g, Norm::L2, [](double x, double y) { return builtin_target("spiky")(x, y) + 2.5; });
    CHECK(inf_norm(solve_grid(a) + Vector::Constant(g.size(), 2.5) - solve_grid(b)) < 1e-6);
    CHECK(inf_norm(gradient_energy(g) * Vector::Ones(g.size())) == 0.0);
}

TEST_CASE("anchoring a seminorm problem shifts the minimizer") {
    // Gradient-energy distance only: constants are a null direction.
    Grid g = Grid::line(21, {-1, 1});
    Vector u0 = sample(g, [](double x, double) { return std::cos(3 * x); }).values;
    SparseMatrix G = gradient_energy(g);
    QpProblem qp;
    qp.P = 2.0 * G;
    qp.q = -2.0 * (G * u0);
    ConeConstraints c = second_difference_rows(g, make_stencil(1, 1));
    qp.A = c.A;
    qp.lower = c.lower;
    qp.upper = c.upper;
    qp.layout.num_grid = g.size();
    Solution s0 = checked_solve(anchor(qp, 10, 0.0));
    Solution s1 = checked_solve(anchor(qp, 10, 1.75));
    REQUIRE(s0.status == SolveStatus::optimal);
    REQUIRE(s1.status == SolveStatus::optimal);
    CHECK(inf_norm(s1.x - s0.x - Vector::Constant(g.size(), 1.75)) < 1e-6);
    CHECK(s0.x[10] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(s1.objective == doctest::Approx(s0.objective).epsilon(1e-6));
}

TEST_CASE("1D convex envelope is the lower convex hull") {
    Grid g = Grid::line(41, {0, 1});
    ProblemSpec spec;
    spec.kind = ProblemKind::convex_envelope;
    spec.grid = g;
    spec.target = sample(g, [](double x, double) { return std::sin(2 * std::numbers::pi * x) + 0.3 * x; });
    Vector u = solve_grid(spec);
    CHECK(inf_norm(u - analytic::lower_convex_hull_1d(*spec.target).values) < 1e-6);
    CHECK((u - spec.target->values).maxCoeff() < 1e-6);

    // The envelope of a concave parabola is its chord.
    spec.grid = Grid::line(21, {-1, 1});
    spec.target = sample(spec.grid, builtin_target("neg_x2"));
    CHECK(inf_norm(solve_grid(spec) + Vector::Ones(21)) < 1e-6);
}

TEST_CASE("source problem with zero source is zero") {
    ProblemSpec spec;
    spec.kind = ProblemKind::custom_1d_source;
    spec.grid = Grid::line(31, {-1, 1});
    spec.source = sample(spec.grid, builtin_target("zero"));
    CHECK(inf_norm(solve_grid(spec)) < 1e-9);
    spec.source.reset();
    CHECK_THROWS_AS(build_problem(spec), InvalidSpec);
}

TEST_CASE("variant exact solution is feasible and matches the closed form value") {
    Grid g = Grid::square(33, {0, 1});
    ProblemSpec spec;
    spec.kind = ProblemKind::monopolist_variant;
    spec.grid = g;
    QpProblem qp = build_problem(spec);
    GridFunction exact = sample(g, analytic::variant_value);
    Vector ax = qp.A * exact.values;
    double violation = 0.0;
    for (int r = 0; r < qp.num_rows(); ++r)
        violation = std::max({violation, qp.lower[r] - ax[r], ax[r] - qp.upper[r]});
    // Centered differences at kinks can leave the unit box by at most O(h).
    CHECK(violation <= 2 * g.h());
    CHECK(certify(exact, make_stencil(1)).feasible);
    CHECK(std::abs(functional_value(qp, exact.values) + analytic::VariantSolution::value()) < 0.01);
    Vector zero = Vector::Zero(g.size());
    CHECK(functional_value(qp, zero) == 0.0);
}

TEST_CASE("monopolist gradients show three regimes") {
    Grid g = Grid::square(33, {0, 1});
    ProblemSpec spec;
    spec.kind = ProblemKind::monopolist;
    spec.grid = g;
    GridFunction u(g, solve_grid(spec));
    GradientMap grad = gradient_map(u);
    int point = 0, axis = 0, spread = 0, interior = 0;
    for (int j = 1; j + 1 < g.n(); ++j)
        for (int i = 1; i + 1 < g.n(); ++i) {
            int k = g.index(i, j);
            ++interior;
            double gx = grad.gx[k], gy = grad.gy[k];
            if (std::hypot(gx, gy) < 1e-2)
                ++point;
            else if (std::min(std::abs(gx), std::abs(gy)) < 0.03)
                ++axis;
            else
                ++spread;
        }
    CHECK(point >= 0.2 * interior);
    CHECK(axis >= 0.05 * interior);
    CHECK(spread >= 0.3 * interior);
}

TEST_CASE("inner cone projection lands in the inner cone") {
    Grid g = Grid::square(9);
    ProblemSpec spec = projection_spec(g, Norm::L2, builtin_target("spiky"));
    spec.cone = ConeKind::inner;
    spec.strictness_weight = 0.1;
    Vector u = solve_grid(spec);
    CHECK(check_inner_cone(GridFunction(g, u), make_stencil(1), 1e-6).feasible);
}

TEST_CASE("problem spec json") {
    auto j = nlohmann::json::parse(R"({"kind": "projection", "norm": "h1", "grid": {"n": 7, "bounds": [-1, 1]},
        "width": 2, "cone": "inner", "quadrature": "zeroth", "target": "xy",
        "params": {"strictness_weight": 0.5}, "anchors": [{"node": 3, "value": 1.5}]})");
    ProblemSpec spec = problem_spec_from_json(j);
    CHECK(spec.kind == ProblemKind::projection);
    CHECK(spec.norm == Norm::H1);
    CHECK(spec.grid == Grid::square(7, {-1, 1}));
    CHECK(spec.width == 2);
    CHECK(spec.cone == ConeKind::inner);
    CHECK(spec.quadrature == QuadratureRule::zeroth);
    CHECK(spec.strictness_weight == 0.5);
    REQUIRE(spec.target);
    CHECK(spec.target->at(6, 6) == doctest::Approx(1.0));
    REQUIRE(spec.anchors.size() == 1);
    CHECK(spec.anchors[0].value == 1.5);
    ProblemSpec back = problem_spec_from_json(to_json(spec));
    CHECK(back.kind == spec.kind);
    CHECK(back.norm == spec.norm);
    CHECK(back.width == spec.width);

    CHECK_THROWS_AS(problem_spec_from_json(nlohmann::json::parse(R"({"kind": "nope", "grid": {"n": 5}})")), InvalidSpec);
    CHECK_THROWS_AS(problem_spec_from_json(nlohmann::json::parse(R"({"kind": "projection"})")), InvalidSpec);
    CHECK_THROWS_AS(parse_norm("l3"), InvalidSpec);
    CHECK(parse_problem_kind("step1d") == ProblemKind::custom_1d_source);
}

}  // TEST_SUITE
