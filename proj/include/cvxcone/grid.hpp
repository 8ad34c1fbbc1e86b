#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace cvxcone {

/// Compressed-column sparse matrix used for every operator and constraint block.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double, int>;
using Vector = Eigen::VectorXd;

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

/**
 * Uniform grid on an interval (dim 1) or a square (dim 2).
 *
 * Nodes are numbered row-major: k = j * n + i where i indexes x and j
 * indexes y. Both axes share the same bounds and spacing.
 */
class Grid {
public:
    Grid(int dim, int n, Interval bounds = {});

    static Grid line(int n, Interval bounds = {}) { return Grid(1, n, bounds); }
    static Grid square(int n, Interval bounds = {}) { return Grid(2, n, bounds); }

    int dim() const { return dim_; }
    int n() const { return n_; }
    Interval bounds() const { return bounds_; }
    double h() const { return h_; }
    int size() const { return size_; }

    int index(int i, int j = 0) const { return j * n_ + i; }
    std::array<int, 2> multi_index(int k) const { return {k % n_, dim_ == 2 ? k / n_ : 0}; }
    bool contains(int i, int j) const;

    double coord(int i) const;
    /// Physical coordinates of node k; y is 0 in 1D.
    std::array<double, 2> point(int k) const;

    /// Domain measure (length or area).
    double measure() const;

    bool operator==(const Grid& other) const = default;

private:
    int dim_;
    int n_;
    Interval bounds_;
    double h_;
    int size_;
};

struct GridFunction {
    Grid grid;
    Vector values;

    GridFunction(Grid g, Vector v);
    explicit GridFunction(Grid g) : GridFunction(g, Vector::Zero(g.size())) {}

    double operator[](int k) const { return values[k]; }
    double at(int i, int j = 0) const { return values[grid.index(i, j)]; }
};

using PointFunction = std::function<double(double x, double y)>;

/// Evaluates f at every node. Throws SamplingError on a non-finite value.
GridFunction sample(const Grid& grid, const PointFunction& f);

// Finite-difference operators. All carry their 1/h or 1/h^2 scaling.

/// (n-2) x n interior second difference, rows (1, -2, 1)/h^2.
SparseMatrix assemble_dxx_1d(int n, double h);
/// (n-1) x n forward difference, rows (-1, 1)/h.
SparseMatrix assemble_forward_dx_1d(int n, double h);
/// (D+)^T D+ : symmetric, PSD, null on constants.
SparseMatrix assemble_grad_quad_1d(int n, double h);
/// Five-point grid Laplacian on n x n nodes (positive sign, natural boundary).
SparseMatrix assemble_laplacian_2d(int n, double h);
/// Centered first difference with one-sided first and last rows.
SparseMatrix assemble_centered_dx(int n, double h);

/// Centered x- and y-derivatives on the full 2D grid (Kronecker lifts of
/// assemble_centered_dx). For a 1D grid `centered_dx` is the 1D operator.
SparseMatrix centered_dx(const Grid& grid);
SparseMatrix centered_dy(const Grid& grid);

/// Symmetric operator G with u^T G u approximating the integral of |grad u|^2
/// (includes the cell measure h^dim).
SparseMatrix gradient_energy(const Grid& grid);

}  // namespace cvxcone
