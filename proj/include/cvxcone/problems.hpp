#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvxcone/cone.hpp"
#include "cvxcone/grid.hpp"
#include "cvxcone/qp.hpp"

namespace cvxcone {

enum class ProblemKind { projection, rochet_chone, monopolist, monopolist_variant, convex_envelope, custom_1d_source };
enum class Norm { L1, L2, Linf, H1, H1_0, H1_gradbox };
enum class QuadratureRule { zeroth, trapezoidal };

std::string to_string(ProblemKind kind);
std::string to_string(Norm norm);
std::string to_string(QuadratureRule rule);
std::string to_string(ConeKind kind);
ProblemKind parse_problem_kind(const std::string& s);
Norm parse_norm(const std::string& s);
QuadratureRule parse_quadrature(const std::string& s);
ConeKind parse_cone_kind(const std::string& s);

struct Anchor {
    int node = 0;
    double value = 0.0;
};

struct ProblemSpec {
    ProblemKind kind = ProblemKind::projection;
    Norm norm = Norm::L2;
    Grid grid = Grid::square(21);
    int width = 1;
    ConeKind cone = ConeKind::outer;
    double strictness_weight = 0.0;
    QuadratureRule quadrature = QuadratureRule::trapezoidal;
    std::optional<GridFunction> target;  // projections and envelopes
    std::optional<GridFunction> source;  // f in the 1D source problem
    double c = 1.0;                      // monopolist gradient cost
    double gradient_bound = 1.0;         // |D u| <= bound for H1_gradbox
    std::vector<Anchor> anchors;
};

struct Quadrature {
    Vector weights;
};

Quadrature quadrature_weights(const Grid& grid, QuadratureRule rule);

QpProblem build_projection(const ProblemSpec& spec);
QpProblem build_envelope(const ProblemSpec& spec);
QpProblem build_monopolist(const ProblemSpec& spec);
QpProblem build_rochet_chone(const ProblemSpec& spec);
QpProblem build_monopolist_variant(const ProblemSpec& spec);
QpProblem build_custom_1d(const ProblemSpec& spec);

/// Dispatches on spec.kind and applies spec.anchors.
QpProblem build_problem(const ProblemSpec& spec);

/// Adds the equality row u_node = value.
QpProblem anchor(QpProblem qp, int node, double value);

/// Objective of the continuous functional at x (solver objective plus dropped constants).
double functional_value(const QpProblem& qp, const Vector& x);

/// Nodes on the boundary of the grid, ascending.
std::vector<int> boundary_nodes(const Grid& grid);

/**
 * Reads {kind, norm?, grid: {n, bounds, dim?}, width, cone, quadrature,
 * target_csv?, target?, params: {c?, strictness_weight?, ...}}.
 * Relative CSV paths are resolved against `base_dir`.
 */
ProblemSpec problem_spec_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const ProblemSpec& spec);

}  // namespace cvxcone
