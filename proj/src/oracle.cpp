#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvxcone/errors.hpp"
#include "cvxcone/solver.hpp"

namespace cvxcone {

namespace {

enum class RowState { inactive, lower, upper };

}  // namespace

Solution oracle_solve(const QpProblem& qp) {
    validate(qp);
    const int n = qp.num_vars();
    const int m = qp.num_rows();
    if (n > kOracleMaxVars || m > kOracleMaxRows) {
        throw OracleTooLarge("oracle_solve supports at most " + std::to_string(kOracleMaxVars) + " variables and " +
                             std::to_string(kOracleMaxRows) + " rows, got " + std::to_string(n) + " x " +
                             std::to_string(m));
    }
    const Eigen::MatrixXd P(qp.P);
    const Eigen::MatrixXd A(qp.A);
    const Eigen::VectorXd& q = qp.q;

    std::vector<std::vector<RowState>> options(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        auto& opt = options[static_cast<std::size_t>(i)];
        const double l = qp.lower[i];
        const double u = qp.upper[i];
        if (l == u) {
            opt = {RowState::lower};
            continue;
        }
        opt.push_back(RowState::inactive);
        if (std::isfinite(l)) opt.push_back(RowState::lower);
        if (std::isfinite(u)) opt.push_back(RowState::upper);
    }

    auto feasible = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd Ax = A * x;
        for (int i = 0; i < m; ++i) {
            double tol = 1e-9 * std::max(1.0, std::abs(Ax[i]));
            if (Ax[i] < qp.lower[i] - tol || Ax[i] > qp.upper[i] + tol) return false;
        }
        return true;
    };

    Solution best;
    best.objective = std::numeric_limits<double>::infinity();
    bool found = false;
    bool any_feasible = m == 0;
    int candidates = 0;

    std::vector<std::size_t> choice(static_cast<std::size_t>(m), 0);
    while (true) {
        ++candidates;
        std::vector<int> rows;
        std::vector<double> rhs_b;
        std::vector<RowState> states;
        for (int i = 0; i < m; ++i) {
            RowState st = options[static_cast<std::size_t>(i)][choice[static_cast<std::size_t>(i)]];
            if (st == RowState::inactive) continue;
            rows.push_back(i);
            states.push_back(st);
            rhs_b.push_back(st == RowState::upper ? qp.upper[i] : qp.lower[i]);
        }
        const int na = static_cast<int>(rows.size());
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + na, n + na);
        Eigen::VectorXd rhs(n + na);
        K.topLeftCorner(n, n) = P;
        rhs.head(n) = -q;
        for (int k = 0; k < na; ++k) {
            K.block(n + k, 0, 1, n) = A.row(rows[static_cast<std::size_t>(k)]);
            K.block(0, n + k, n, 1) = A.row(rows[static_cast<std::size_t>(k)]).transpose();
            rhs[n + k] = rhs_b[static_cast<std::size_t>(k)];
        }

        Eigen::VectorXd sol;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
        if (lu.isInvertible()) {
            sol = lu.solve(rhs);
        } else {
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(K);
            sol = cod.solve(rhs);
            double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
            if ((K * sol - rhs).lpNorm<Eigen::Infinity>() > 1e-9 * scale) sol.resize(0);
        }

        if (sol.size() == n + na && sol.allFinite()) {
            Eigen::VectorXd x = sol.head(n);
            if (feasible(x)) {
                any_feasible = true;
                // Our sign convention: P x + q + A^T y = 0, y <= 0 at lower, y >= 0 at upper.
                bool signs_ok = true;
                Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
                for (int k = 0; k < na; ++k) {
                    double yk = sol[n + k];
                    int i = rows[static_cast<std::size_t>(k)];
                    y[i] = yk;
                    double tol = 1e-9 * std::max(1.0, std::abs(yk));
                    if (qp.lower[i] == qp.upper[i]) continue;
                    if (states[static_cast<std::size_t>(k)] == RowState::lower && yk > tol) signs_ok = false;
                    if (states[static_cast<std::size_t>(k)] == RowState::upper && yk < -tol) signs_ok = false;
                }
                if (signs_ok) {
                    double obj = 0.5 * x.dot(P * x) + q.dot(x);
                    if (!found || obj < best.objective) {
                        found = true;
                        best.x = x;
                        best.y = y;
                        best.objective = obj;
                    }
                }
            }
        }

        // Next combination (odometer).
        int pos = 0;
        while (pos < m) {
            auto& c = choice[static_cast<std::size_t>(pos)];
            if (++c < options[static_cast<std::size_t>(pos)].size()) break;
            c = 0;
            ++pos;
        }
        if (pos == m) break;
    }

    best.iterations = candidates;
    best.primal_residual = 0.0;
    best.dual_residual = 0.0;
    if (found) {
        best.status = SolveStatus::optimal;
        return best;
    }
    best.x = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
    best.y = Vector::Constant(m, std::numeric_limits<double>::quiet_NaN());
    if (any_feasible) {
        best.status = SolveStatus::dual_infeasible;
        best.objective = -std::numeric_limits<double>::infinity();
    } else {
        best.status = SolveStatus::primal_infeasible;
        best.objective = std::numeric_limits<double>::infinity();
    }
    return best;
}

}  // namespace cvxcone
