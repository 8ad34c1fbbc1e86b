#pragma once

#include "cvxcone/grid.hpp"

namespace cvxcone {

/// Where each group of variables lives in the QP variable vector.
struct VariableLayout {
    int num_grid = 0;      // grid values occupy [0, num_grid)
    int gamma = -1;        // inner-cone auxiliaries, -1 when absent
    int lambda = -1;
    int t_begin = -1;      // epigraph variables of L1 / Linf objectives
    int t_count = 0;
};

/**
 * min 1/2 x^T P x + q^T x  subject to  lower <= A x <= upper.
 *
 * P is stored as a full symmetric matrix. Infinite bounds mark one-sided rows.
 * `objective_constant` holds terms dropped from the objective (e.g. |u0|^2)
 * so that reported values match the continuous functional.
 */
struct QpProblem {
    SparseMatrix P;
    Vector q;
    SparseMatrix A;
    Vector lower;
    Vector upper;
    VariableLayout layout;
    double objective_constant = 0.0;

    int num_vars() const { return static_cast<int>(q.size()); }
    int num_rows() const { return static_cast<int>(A.rows()); }

    double objective(const Vector& x) const { return 0.5 * x.dot(P * x) + q.dot(x); }
    Vector grid_values(const Vector& x) const { return x.head(layout.num_grid); }
};

/// Throws InvalidProblem when shapes, symmetry or bounds are inconsistent.
void validate(const QpProblem& qp);

/// Appends rows lower <= block * x <= upper; block may have fewer columns than qp.
void append_rows(QpProblem& qp, const SparseMatrix& block, const Vector& lower, const Vector& upper);

}  // namespace cvxcone
