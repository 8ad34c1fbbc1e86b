#include "cvxcone/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cvxcone/errors.hpp"

namespace cvxcone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct StencilRow {
    int center;
    int plus;
    int minus;
    int direction;
    double scale;  // 1 / (h^2 |v|^2)
};

void check_dims(const Grid& grid, const StencilSet& stencil) {
    if (grid.dim() != stencil.dim) {
        throw InvalidArgument("grid is " + std::to_string(grid.dim()) + "D but stencil is " +
                              std::to_string(stencil.dim) + "D");
    }
}

// Rows ordered by (node, direction index); a row exists iff both neighbours are on the grid.
std::vector<StencilRow> enumerate_rows(const Grid& grid, const StencilSet& stencil) {
    check_dims(grid, stencil);
    std::vector<StencilRow> rows;
    const double h2 = grid.h() * grid.h();
    for (int k = 0; k < grid.size(); ++k) {
        auto [i, j] = grid.multi_index(k);
        for (int d = 0; d < static_cast<int>(stencil.directions.size()); ++d) {
            const Direction& v = stencil.directions[static_cast<std::size_t>(d)];
            if (!grid.contains(i + v.p, j + v.q) || !grid.contains(i - v.p, j - v.q)) continue;
            rows.push_back({k, grid.index(i + v.p, j + v.q), grid.index(i - v.p, j - v.q), d,
                            1.0 / (h2 * v.norm_squared())});
        }
    }
    return rows;
}

}  // namespace

ConeConstraints second_difference_rows(const Grid& grid, const StencilSet& stencil) {
    auto rows = enumerate_rows(grid, stencil);
    const int m = static_cast<int>(rows.size());
    std::vector<Triplet> entries;
    entries.reserve(rows.size() * 3);
    ConeConstraints c;
    c.kind = ConeKind::outer;
    c.num_grid = grid.size();
    c.row_index.reserve(rows.size());
    for (int r = 0; r < m; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        entries.emplace_back(r, row.plus, row.scale);
        entries.emplace_back(r, row.minus, row.scale);
        entries.emplace_back(r, row.center, -2.0 * row.scale);
        c.row_index.push_back({row.center, row.direction});
    }
    c.A.resize(m, grid.size());
    c.A.setFromTriplets(entries.begin(), entries.end());
    c.A.makeCompressed();
    c.lower = Vector::Zero(m);
    c.upper = Vector::Constant(m, kInf);
    return c;
}

ConeConstraints inner_cone_rows(const Grid& grid, const StencilSet& stencil, double strictness_weight) {
    if (strictness_weight < 0.0 || !std::isfinite(strictness_weight)) {
        throw InvalidArgument("strictness weight must be a nonnegative finite number");
    }
    auto rows = enumerate_rows(grid, stencil);
    const int nr = static_cast<int>(rows.size());
    const int N = grid.size();
    const int gamma = N;
    const int lambda = N + 1;
    const int m = 2 * nr + 2;

    ConeConstraints c;
    c.kind = ConeKind::inner;
    c.num_grid = N;
    c.num_aux = 2;
    c.strictness_weight = strictness_weight;
    c.row_index.reserve(static_cast<std::size_t>(m));

    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(nr) * 8 + 3);
    // s_v(u) - gamma >= 0
    for (int r = 0; r < nr; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        entries.emplace_back(r, row.plus, row.scale);
        entries.emplace_back(r, row.minus, row.scale);
        entries.emplace_back(r, row.center, -2.0 * row.scale);
        entries.emplace_back(r, gamma, -1.0);
        c.row_index.push_back({row.center, row.direction});
    }
    // Lambda - s_v(u) >= 0
    for (int r = 0; r < nr; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        entries.emplace_back(nr + r, row.plus, -row.scale);
        entries.emplace_back(nr + r, row.minus, -row.scale);
        entries.emplace_back(nr + r, row.center, 2.0 * row.scale);
        entries.emplace_back(nr + r, lambda, 1.0);
        c.row_index.push_back({row.center, row.direction});
    }
    // gamma >= 0
    entries.emplace_back(2 * nr, gamma, 1.0);
    c.row_index.push_back({});
    // gamma - tan^2(dtheta) Lambda >= 0
    entries.emplace_back(2 * nr + 1, gamma, 1.0);
    entries.emplace_back(2 * nr + 1, lambda, -stencil.tan2_dtheta);
    c.row_index.push_back({});

    c.A.resize(m, N + 2);
    c.A.setFromTriplets(entries.begin(), entries.end());
    c.A.makeCompressed();
    c.lower = Vector::Zero(m);
    c.upper = Vector::Constant(m, kInf);
    return c;
}

Vector second_differences(const GridFunction& u, const StencilSet& stencil) {
    auto rows = enumerate_rows(u.grid, stencil);
    Vector out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        out[static_cast<Eigen::Index>(r)] =
            (u.values[row.plus] + u.values[row.minus] - 2.0 * u.values[row.center]) * row.scale;
    }
    return out;
}

CertificateReport certify(const GridFunction& u, const StencilSet& stencil, double tolerance) {
    if (tolerance < 0.0) throw InvalidArgument("certification tolerance must be nonnegative");
    auto rows = enumerate_rows(u.grid, stencil);
    CertificateReport report;
    report.eigen_ratio_bound = -stencil.tan2_dtheta;
    report.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        double value = (u.values[row.plus] + u.values[row.minus] - 2.0 * u.values[row.center]) * row.scale;
        report.worst_margin = std::min(report.worst_margin, value);
        if (value < -tolerance) {
            report.violations.push_back(
                {u.grid.multi_index(row.center), stencil.directions[static_cast<std::size_t>(row.direction)], value});
        }
    }
    report.feasible = report.violations.empty();
    return report;
}

InnerConeCheck check_inner_cone(const GridFunction& u, const StencilSet& stencil, double tolerance) {
    Vector s = second_differences(u, stencil);
    InnerConeCheck check;
    if (s.size() == 0) {
        check.feasible = true;
        return check;
    }
    check.min_value = s.minCoeff();
    check.max_value = s.maxCoeff();
    // Best choice is gamma = min, Lambda = max.
    check.feasible = check.min_value >= -tolerance &&
                     check.min_value - stencil.tan2_dtheta * check.max_value >= -tolerance;
    return check;
}

nlohmann::json to_json(const CertificateReport& report) {
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : report.violations) {
        violations.push_back({{"node", {v.node[0], v.node[1]}},
                              {"direction", {v.direction.p, v.direction.q}},
                              {"value", v.value}});
    }
    nlohmann::json j;
    j["feasible"] = report.feasible;
    if (std::isfinite(report.worst_margin)) {
        j["worst_margin"] = report.worst_margin;
    } else {
        j["worst_margin"] = nullptr;
    }
    j["eigen_ratio_bound"] = report.eigen_ratio_bound;
    j["violations"] = std::move(violations);
    return j;
}

}  // namespace cvxcone
