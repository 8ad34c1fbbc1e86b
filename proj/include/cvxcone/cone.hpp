#pragma once

#include <array>
#include <vector>

#include <json.hpp>

#include "cvxcone/grid.hpp"
#include "cvxcone/stencil.hpp"

namespace cvxcone {

enum class ConeKind { outer, inner };

struct RowTag {
    int node = -1;       // -1 for rows that only involve auxiliaries
    int direction = -1;  // index into StencilSet::directions
};

/**
 * Linear inequalities lower <= A [u; aux] <= upper describing a polyhedral
 * approximation of the convex cone on a grid.
 *
 * outer: rows are normalized directional second differences s_v(u) >= 0.
 * inner: two auxiliaries (gamma, Lambda) follow the grid variables and the rows
 * encode 0 <= gamma <= s_v(u) <= Lambda and gamma - tan^2(dtheta) Lambda >= 0.
 */
struct ConeConstraints {
    ConeKind kind = ConeKind::outer;
    SparseMatrix A;
    Vector lower;
    Vector upper;
    int num_grid = 0;
    int num_aux = 0;
    std::vector<RowTag> row_index;
    /// Objective weight on (Lambda - gamma); zero for the outer cone.
    double strictness_weight = 0.0;

    int gamma_index() const { return num_grid; }
    int lambda_index() const { return num_grid + 1; }
    int rows() const { return static_cast<int>(A.rows()); }
};

struct Violation {
    std::array<int, 2> node{};
    Direction direction;
    double value = 0.0;
};

struct CertificateReport {
    bool feasible = true;
    double worst_margin = 0.0;
    std::vector<Violation> violations;
    double eigen_ratio_bound = 0.0;
};

ConeConstraints second_difference_rows(const Grid& grid, const StencilSet& stencil);
ConeConstraints inner_cone_rows(const Grid& grid, const StencilSet& stencil, double strictness_weight = 0.0);

/// Normalized second differences of u, one per outer-cone row.
Vector second_differences(const GridFunction& u, const StencilSet& stencil);

constexpr double kDefaultCertifyTolerance = 1e-9;

CertificateReport certify(const GridFunction& u, const StencilSet& stencil,
                          double tolerance = kDefaultCertifyTolerance);

struct InnerConeCheck {
    bool feasible = false;
    double min_value = 0.0;
    double max_value = 0.0;
};

/// Whether some (gamma, Lambda) makes u satisfy the inner-cone rows.
InnerConeCheck check_inner_cone(const GridFunction& u, const StencilSet& stencil,
                                double tolerance = kDefaultCertifyTolerance);

nlohmann::json to_json(const CertificateReport& report);

}  // namespace cvxcone
