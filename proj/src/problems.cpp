#include "cvxcone/problems.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cvxcone/errors.hpp"
#include "cvxcone/grid_io.hpp"
#include "cvxcone/stencil.hpp"
#include "cvxcone/targets.hpp"

namespace cvxcone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SparseMatrix diagonal(const Vector& d) {
    SparseMatrix m(d.size(), d.size());
    std::vector<Triplet> entries;
    for (Eigen::Index i = 0; i < d.size(); ++i) entries.emplace_back(static_cast<int>(i), static_cast<int>(i), d[i]);
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
}

// Embeds an N x N block into the top-left corner of a num_vars square matrix.
SparseMatrix embed(const SparseMatrix& block, int num_vars) {
    std::vector<Triplet> entries;
    for (int c = 0; c < block.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(block, c); it; ++it) entries.emplace_back(it.row(), c, it.value());
    SparseMatrix m(num_vars, num_vars);
    m.setFromTriplets(entries.begin(), entries.end());
    m.makeCompressed();
    return m;
}

SparseMatrix selector_rows(const std::vector<int>& nodes, int cols) {
    SparseMatrix m(static_cast<int>(nodes.size()), cols);
    std::vector<Triplet> entries;
    for (std::size_t r = 0; r < nodes.size(); ++r) entries.emplace_back(static_cast<int>(r), nodes[r], 1.0);
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
}

// Skeleton with the grid variables, cone auxiliaries and `extra` trailing variables.
QpProblem skeleton(const ProblemSpec& spec, int extra) {
    const int N = spec.grid.size();
    const int cone_aux = spec.cone == ConeKind::inner ? 2 : 0;
    const int n = N + cone_aux + extra;
    QpProblem qp;
    qp.P = SparseMatrix(n, n);
    qp.q = Vector::Zero(n);
    qp.A = SparseMatrix(0, n);
    qp.lower = Vector(0);
    qp.upper = Vector(0);
    qp.layout.num_grid = N;
    if (cone_aux) {
        qp.layout.gamma = N;
        qp.layout.lambda = N + 1;
    }
    if (extra) {
        qp.layout.t_begin = N + cone_aux;
        qp.layout.t_count = extra;
    }
    return qp;
}

void add_cone(QpProblem& qp, const ProblemSpec& spec) {
    if (spec.width < 1) throw InvalidSpec("stencil width must be >= 1");
    StencilSet stencil = make_stencil(spec.width, spec.grid.dim());
    if (spec.cone == ConeKind::outer) {
        ConeConstraints c = second_difference_rows(spec.grid, stencil);
        append_rows(qp, c.A, c.lower, c.upper);
        return;
    }
    ConeConstraints c = inner_cone_rows(spec.grid, stencil, spec.strictness_weight);
    append_rows(qp, c.A, c.lower, c.upper);
    qp.q[qp.layout.lambda] += c.strictness_weight;
    qp.q[qp.layout.gamma] -= c.strictness_weight;
}

const GridFunction& require_target(const ProblemSpec& spec) {
    if (!spec.target) throw InvalidSpec(to_string(spec.kind) + " requires a target function");
    if (!(spec.target->grid == spec.grid)) throw InvalidSpec("target grid does not match the problem grid");
    return *spec.target;
}

// Weighted squared distance |u - u0|^2 with optional gradient energy.
void add_squared_distance(QpProblem& qp, const Grid& grid, const Vector& weights, const Vector& u0, bool gradient) {
    SparseMatrix block = diagonal(weights);
    if (gradient) block = block + gradient_energy(grid);
    SparseMatrix twice = 2.0 * block;
    qp.P = qp.P + embed(twice, qp.num_vars());
    qp.q.head(grid.size()) -= twice * u0;
    qp.objective_constant += u0.dot(block * u0);
}

void add_gradient_box(QpProblem& qp, const Grid& grid, double lo, double hi) {
    const int N = grid.size();
    SparseMatrix dx = centered_dx(grid);
    append_rows(qp, dx, Vector::Constant(N, lo), Vector::Constant(N, hi));
    if (grid.dim() == 2) append_rows(qp, centered_dy(grid), Vector::Constant(N, lo), Vector::Constant(N, hi));
}

// Linear term of int u - grad u . x dx with centered gradients.
Vector profit_linear_term(const Grid& grid, const Vector& weights) {
    const int N = grid.size();
    Vector wx(N), wy(N);
    for (int k = 0; k < N; ++k) {
        auto [x, y] = grid.point(k);
        wx[k] = weights[k] * x;
        wy[k] = weights[k] * y;
    }
    Vector q = weights;
    q -= SparseMatrix(centered_dx(grid).transpose()) * wx;
    if (grid.dim() == 2) q -= SparseMatrix(centered_dy(grid).transpose()) * wy;
    return q;
}

int origin_node(const Grid& grid) {
    if (grid.bounds().lo != 0.0) throw InvalidSpec("the monopolist variant needs a grid starting at the origin");
    return 0;
}

}  // namespace

std::string to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::projection: return "projection";
        case ProblemKind::rochet_chone: return "rochet_chone";
        case ProblemKind::monopolist: return "monopolist";
        case ProblemKind::monopolist_variant: return "monopolist_variant";
        case ProblemKind::convex_envelope: return "convex_envelope";
        case ProblemKind::custom_1d_source: return "custom_1d_source";
    }
    return "unknown";
}

std::string to_string(Norm norm) {
    switch (norm) {
        case Norm::L1: return "l1";
        case Norm::L2: return "l2";
        case Norm::Linf: return "linf";
        case Norm::H1: return "h1";
        case Norm::H1_0: return "h1_0";
        case Norm::H1_gradbox: return "h1_gradbox";
    }
    return "unknown";
}

std::string to_string(QuadratureRule rule) { return rule == QuadratureRule::zeroth ? "zeroth" : "trapezoidal"; }

std::string to_string(ConeKind kind) { return kind == ConeKind::outer ? "outer" : "inner"; }

ProblemKind parse_problem_kind(const std::string& s) {
    for (auto k : {ProblemKind::projection, ProblemKind::rochet_chone, ProblemKind::monopolist,
                   ProblemKind::monopolist_variant, ProblemKind::convex_envelope, ProblemKind::custom_1d_source}) {
        if (to_string(k) == s) return k;
    }
    if (s == "envelope") return ProblemKind::convex_envelope;
    if (s == "step1d" || s == "custom_1d") return ProblemKind::custom_1d_source;
    throw InvalidSpec("unknown problem kind '" + s + "'");
}

Norm parse_norm(const std::string& s) {
    for (auto n : {Norm::L1, Norm::L2, Norm::Linf, Norm::H1, Norm::H1_0, Norm::H1_gradbox}) {
        if (to_string(n) == s) return n;
    }
    if (s == "L1") return Norm::L1;
    if (s == "L2") return Norm::L2;
    if (s == "Linf" || s == "inf") return Norm::Linf;
    if (s == "H1") return Norm::H1;
    if (s == "H1_0" || s == "h10") return Norm::H1_0;
    if (s == "H1_gradbox") return Norm::H1_gradbox;
    throw InvalidSpec("unknown norm '" + s + "'");
}

QuadratureRule parse_quadrature(const std::string& s) {
    if (s == "zeroth" || s == "constant") return QuadratureRule::zeroth;
    if (s == "trapezoidal" || s == "trapezoid") return QuadratureRule::trapezoidal;
    throw InvalidSpec("unknown quadrature '" + s + "'");
}

ConeKind parse_cone_kind(const std::string& s) {
    if (s == "outer") return ConeKind::outer;
    if (s == "inner") return ConeKind::inner;
    throw InvalidSpec("unknown cone kind '" + s + "'");
}

Quadrature quadrature_weights(const Grid& grid, QuadratureRule rule) {
    const int N = grid.size();
    Quadrature quad;
    if (rule == QuadratureRule::zeroth) {
        quad.weights = Vector::Constant(N, grid.measure() / N);
        return quad;
    }
    const int n = grid.n();
    const double h = grid.h();
    Vector w1(n);
    for (int i = 0; i < n; ++i) w1[i] = (i == 0 || i == n - 1) ? h / 2.0 : h;
    quad.weights.resize(N);
    for (int k = 0; k < N; ++k) {
        auto [i, j] = grid.multi_index(k);
        quad.weights[k] = grid.dim() == 1 ? w1[i] : w1[i] * w1[j];
    }
    return quad;
}

std::vector<int> boundary_nodes(const Grid& grid) {
    std::vector<int> out;
    const int n = grid.n();
    for (int k = 0; k < grid.size(); ++k) {
        auto [i, j] = grid.multi_index(k);
        bool edge = i == 0 || i == n - 1;
        if (grid.dim() == 2) edge = edge || j == 0 || j == n - 1;
        if (edge) out.push_back(k);
    }
    return out;
}

QpProblem build_projection(const ProblemSpec& spec) {
    const GridFunction& target = require_target(spec);
    const Grid& grid = spec.grid;
    const int N = grid.size();
    const Vector& u0 = target.values;
    Vector w = quadrature_weights(grid, spec.quadrature).weights;

    if (spec.norm == Norm::Linf || spec.norm == Norm::L1) {
        const bool linf = spec.norm == Norm::Linf;
        QpProblem qp = skeleton(spec, linf ? 1 : N);
        const int t0 = qp.layout.t_begin;
        if (linf) {
            qp.q[t0] = 1.0;
        } else {
            qp.q.segment(t0, N) = w;
        }
        // u_k - t_k <= g_k and u_k + t_k >= g_k.
        std::vector<Triplet> entries;
        for (int k = 0; k < N; ++k) {
            int t = linf ? t0 : t0 + k;
            entries.emplace_back(k, k, 1.0);
            entries.emplace_back(k, t, -1.0);
            entries.emplace_back(N + k, k, 1.0);
            entries.emplace_back(N + k, t, 1.0);
        }
        SparseMatrix block(2 * N, qp.num_vars());
        block.setFromTriplets(entries.begin(), entries.end());
        Vector lo(2 * N), hi(2 * N);
        lo << Vector::Constant(N, -kInf), u0;
        hi << u0, Vector::Constant(N, kInf);
        append_rows(qp, block, lo, hi);
        add_cone(qp, spec);
        return qp;
    }

    QpProblem qp = skeleton(spec, 0);
    const bool gradient = spec.norm != Norm::L2;
    add_squared_distance(qp, grid, w, u0, gradient);
    if (spec.norm == Norm::H1_0) {
        auto nodes = boundary_nodes(grid);
        append_rows(qp, selector_rows(nodes, N), Vector::Zero(static_cast<Eigen::Index>(nodes.size())),
                    Vector::Zero(static_cast<Eigen::Index>(nodes.size())));
    }
    if (spec.norm == Norm::H1_gradbox) {
        if (!(spec.gradient_bound > 0)) throw InvalidSpec("gradient bound must be positive");
        add_gradient_box(qp, grid, -spec.gradient_bound, spec.gradient_bound);
    }
    add_cone(qp, spec);
    return qp;
}

QpProblem build_envelope(const ProblemSpec& spec) {
    const GridFunction& target = require_target(spec);
    const int N = spec.grid.size();
    QpProblem qp = skeleton(spec, 0);
    Vector w = quadrature_weights(spec.grid, spec.quadrature).weights;
    add_squared_distance(qp, spec.grid, w, target.values, false);
    std::vector<int> all(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) all[static_cast<std::size_t>(k)] = k;
    append_rows(qp, selector_rows(all, N), Vector::Constant(N, -kInf), target.values);
    add_cone(qp, spec);
    return qp;
}

QpProblem build_monopolist(const ProblemSpec& spec) {
    if (!(spec.c > 0)) throw InvalidSpec("monopolist coefficient c must be positive");
    const Grid& grid = spec.grid;
    const int N = grid.size();
    QpProblem qp = skeleton(spec, 0);
    Vector w = quadrature_weights(grid, spec.quadrature).weights;
    SparseMatrix energy = spec.c * gradient_energy(grid);
    qp.P = embed(energy, qp.num_vars());
    qp.q.head(N) = profit_linear_term(grid, w);
    std::vector<int> all(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) all[static_cast<std::size_t>(k)] = k;
    append_rows(qp, selector_rows(all, N), Vector::Zero(N), Vector::Constant(N, kInf));
    add_cone(qp, spec);
    return qp;
}

QpProblem build_rochet_chone(const ProblemSpec& spec) {
    ProblemSpec rc = spec;
    rc.c = 1.0;
    return build_monopolist(rc);
}

QpProblem build_monopolist_variant(const ProblemSpec& spec) {
    const Grid& grid = spec.grid;
    if (grid.dim() != 2) throw InvalidSpec("the monopolist variant is a 2D problem");
    const int N = grid.size();
    QpProblem qp = skeleton(spec, 0);
    Vector w = quadrature_weights(grid, spec.quadrature).weights;
    qp.q.head(N) = profit_linear_term(grid, w);
    add_gradient_box(qp, grid, 0.0, 1.0);
    qp = anchor(std::move(qp), origin_node(grid), 0.0);
    add_cone(qp, spec);
    return qp;
}

QpProblem build_custom_1d(const ProblemSpec& spec) {
    const Grid& grid = spec.grid;
    if (grid.dim() != 1) throw InvalidSpec("the source problem is defined on a 1D grid");
    if (!spec.source) throw InvalidSpec("the source problem requires a source term f");
    if (!(spec.source->grid == grid)) throw InvalidSpec("source grid does not match the problem grid");
    const int N = grid.size();
    QpProblem qp = skeleton(spec, 0);
    Vector w = quadrature_weights(grid, spec.quadrature).weights;
    qp.P = embed(gradient_energy(grid), qp.num_vars());
    qp.q.head(N) = w.cwiseProduct(spec.source->values);
    std::vector<int> ends{0, N - 1};
    append_rows(qp, selector_rows(ends, N), Vector::Zero(2), Vector::Zero(2));
    add_cone(qp, spec);
    return qp;
}

QpProblem build_problem(const ProblemSpec& spec) {
    QpProblem qp;
    switch (spec.kind) {
        case ProblemKind::projection: qp = build_projection(spec); break;
        case ProblemKind::convex_envelope: qp = build_envelope(spec); break;
        case ProblemKind::monopolist: qp = build_monopolist(spec); break;
        case ProblemKind::rochet_chone: qp = build_rochet_chone(spec); break;
        case ProblemKind::monopolist_variant: qp = build_monopolist_variant(spec); break;
        case ProblemKind::custom_1d_source: qp = build_custom_1d(spec); break;
    }
    for (const auto& a : spec.anchors) qp = anchor(std::move(qp), a.node, a.value);
    return qp;
}

QpProblem anchor(QpProblem qp, int node, double value) {
    if (node < 0 || node >= qp.layout.num_grid) {
        throw InvalidArgument("anchor node " + std::to_string(node) + " is outside the grid");
    }
    if (!std::isfinite(value)) throw InvalidArgument("anchor value must be finite");
    append_rows(qp, selector_rows({node}, qp.num_vars()), Vector::Constant(1, value), Vector::Constant(1, value));
    return qp;
}

double functional_value(const QpProblem& qp, const Vector& x) { return qp.objective(x) + qp.objective_constant; }

ProblemSpec problem_spec_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    try {
        ProblemSpec spec;
        spec.kind = parse_problem_kind(j.at("kind").get<std::string>());
        if (j.contains("norm")) spec.norm = parse_norm(j.at("norm").get<std::string>());
        const auto& g = j.at("grid");
        int default_dim = spec.kind == ProblemKind::custom_1d_source ? 1 : 2;
        nlohmann::json gj = g;
        if (!gj.contains("dim")) gj["dim"] = default_dim;
        spec.grid = grid_from_json(gj);
        spec.width = j.value("width", 1);
        spec.cone = parse_cone_kind(j.value("cone", std::string("outer")));
        spec.quadrature = parse_quadrature(j.value("quadrature", std::string("trapezoidal")));
        nlohmann::json params = j.value("params", nlohmann::json::object());
        spec.c = params.value("c", 1.0);
        spec.strictness_weight = params.value("strictness_weight", 0.0);
        spec.gradient_bound = params.value("gradient_bound", 1.0);
        TargetParams tp;
        tp.alpha = params.value("alpha", tp.alpha);
        tp.theta = params.value("theta", tp.theta);
        tp.c = spec.c;
        if (j.contains("target_csv")) {
            std::filesystem::path p = j.at("target_csv").get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            spec.target = from_csv(read_text_file(p), spec.grid);
        } else if (j.contains("target")) {
            spec.target = sample(spec.grid, builtin_target(j.at("target").get<std::string>(), tp));
        }
        if (spec.kind == ProblemKind::custom_1d_source) {
            std::string src = j.value("source", std::string("step"));
            spec.source = sample(spec.grid, builtin_target(src, tp));
        }
        if (j.contains("anchors")) {
            for (const auto& a : j.at("anchors")) spec.anchors.push_back({a.at("node").get<int>(), a.value("value", 0.0)});
        }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidSpec(std::string("malformed problem spec: ") + e.what());
    }
}

nlohmann::json to_json(const ProblemSpec& spec) {
    nlohmann::json j;
    j["kind"] = to_string(spec.kind);
    j["norm"] = to_string(spec.norm);
    j["grid"] = grid_to_json(spec.grid);
    j["width"] = spec.width;
    j["cone"] = to_string(spec.cone);
    j["quadrature"] = to_string(spec.quadrature);
    j["params"] = {{"c", spec.c}, {"strictness_weight", spec.strictness_weight}, {"gradient_bound", spec.gradient_bound}};
    nlohmann::json anchors = nlohmann::json::array();
    for (const auto& a : spec.anchors) anchors.push_back({{"node", a.node}, {"value", a.value}});
    j["anchors"] = anchors;
    return j;
}

}  // namespace cvxcone
