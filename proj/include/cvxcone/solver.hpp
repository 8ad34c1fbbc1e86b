#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "cvxcone/qp.hpp"

namespace cvxcone {

struct SolverSettings {
    double eps_abs = 1e-6;
    double eps_rel = 1e-6;
    double eps_prim_inf = 1e-5;
    double eps_dual_inf = 1e-5;
    int max_iter = 100000;
    double rho = 0.1;
    double sigma = 1e-6;
    double alpha = 1.6;
    bool adaptive_rho = true;
    int adaptive_rho_interval = 50;
    double adaptive_rho_tolerance = 5.0;
    int scaling_iter = 10;
    int check_interval = 10;
    bool polish = true;
    double polish_delta = 1e-6;
    int polish_refine_iter = 5;
    std::uint64_t seed = 0;
};

enum class SolveStatus { optimal, max_iter, primal_infeasible, dual_infeasible };

std::string to_string(SolveStatus status);

struct Solution {
    Vector x;
    Vector y;
    double objective = 0.0;
    SolveStatus status = SolveStatus::max_iter;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    bool polished = false;
};

/**
 * Operator-splitting (ADMM) solver for convex QPs and LPs.
 *
 * The problem is Ruiz-equilibrated, then iterates alternate between one
 * solve with the quasi-definite matrix [P + sigma I, A^T; A, -diag(1/rho)]
 * and a projection of the slack onto [lower, upper]. The factorization is
 * reused until the penalty is adapted. On convergence an optional polish
 * step solves the equality-constrained KKT system on the detected active set.
 *
 * Throws InvalidProblem for inconsistent data or when the KKT matrix does not
 * have the inertia of a convex problem.
 */
Solution solve(const QpProblem& qp, const SolverSettings& settings = {});

/// Exhaustive active-set solver for tiny problems; exact up to dense roundoff.
Solution oracle_solve(const QpProblem& qp);

inline constexpr int kOracleMaxVars = 10;
inline constexpr int kOracleMaxRows = 12;

struct KktReport {
    double stationarity = 0.0;     // |P x + q + A^T y|_inf
    double primal_violation = 0.0; // |clamp(Ax, l, u) - Ax|_inf
    double complementarity = 0.0;  // max_i |y_i| dist(A_i x, bound selected by sign(y_i))
    double stationarity_tol = 0.0;
    bool stationarity_ok = false;
    bool primal_ok = false;
    bool complementarity_ok = false;
    bool ok() const { return stationarity_ok && primal_ok && complementarity_ok; }
};

KktReport check_kkt(const QpProblem& qp, const Solution& sol, const SolverSettings& settings = {});

nlohmann::json to_json(const Solution& sol);

}  // namespace cvxcone
