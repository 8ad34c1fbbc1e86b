#include "cvxcone/grid.hpp"

#include <cmath>
#include <string>

#include "cvxcone/errors.hpp"

namespace cvxcone {

Grid::Grid(int dim, int n, Interval bounds) : dim_(dim), n_(n), bounds_(bounds) {
    if (dim != 1 && dim != 2) {
        throw InvalidGrid("grid dimension must be 1 or 2, got " + std::to_string(dim));
    }
    if (n < 3) {
        throw InvalidGrid("grid needs at least 3 nodes per axis, got " + std::to_string(n));
    }
    if (!(bounds.hi > bounds.lo) || !std::isfinite(bounds.lo) || !std::isfinite(bounds.hi)) {
        throw InvalidGrid("grid bounds must be a finite interval with lo < hi");
    }
    h_ = bounds.length() / (n - 1);
    size_ = dim == 1 ? n : n * n;
}

bool Grid::contains(int i, int j) const {
    if (i < 0 || i >= n_) return false;
    if (dim_ == 1) return j == 0;
    return j >= 0 && j < n_;
}

double Grid::coord(int i) const {
    // Pin the last node to the upper bound exactly.
    if (i == n_ - 1) return bounds_.hi;
    return bounds_.lo + i * h_;
}

std::array<double, 2> Grid::point(int k) const {
    auto [i, j] = multi_index(k);
    return {coord(i), dim_ == 2 ? coord(j) : 0.0};
}

double Grid::measure() const {
    return dim_ == 1 ? bounds_.length() : bounds_.length() * bounds_.length();
}

GridFunction::GridFunction(Grid g, Vector v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) {
        throw InvalidArgument("grid function has " + std::to_string(values.size()) +
                              " values for a grid of " + std::to_string(grid.size()) + " nodes");
    }
}

GridFunction sample(const Grid& grid, const PointFunction& f) {
    Vector values(grid.size());
    for (int k = 0; k < grid.size(); ++k) {
        auto [x, y] = grid.point(k);
        double v = f(x, y);
        if (!std::isfinite(v)) {
            auto [i, j] = grid.multi_index(k);
            throw SamplingError("non-finite sample at node " + std::to_string(k) + " (i=" +
                                std::to_string(i) + ", j=" + std::to_string(j) + ")");
        }
        values[k] = v;
    }
    return GridFunction(grid, std::move(values));
}

namespace {

void require_nodes(int n, int minimum, const char* op) {
    if (n < minimum) {
        throw InvalidGrid(std::string(op) + ": need n >= " + std::to_string(minimum) + ", got " +
                          std::to_string(n));
    }
}

void require_spacing(double h, const char* op) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidGrid(std::string(op) + ": spacing must be positive and finite");
    }
}

SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& entries) {
    SparseMatrix m(rows, cols);
    m.setFromTriplets(entries.begin(), entries.end());
    m.makeCompressed();
    return m;
}

SparseMatrix identity(int n) {
    SparseMatrix id(n, n);
    id.setIdentity();
    return id;
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
    for (int ca = 0; ca < a.outerSize(); ++ca) {
        for (SparseMatrix::InnerIterator ia(a, ca); ia; ++ia) {
            for (int cb = 0; cb < b.outerSize(); ++cb) {
                for (SparseMatrix::InnerIterator ib(b, cb); ib; ++ib) {
                    entries.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                                         static_cast<int>(ia.col() * b.cols() + ib.col()),
                                         ia.value() * ib.value());
                }
            }
        }
    }
    return from_triplets(static_cast<int>(a.rows() * b.rows()),
                         static_cast<int>(a.cols() * b.cols()), entries);
}

}  // namespace

SparseMatrix assemble_dxx_1d(int n, double h) {
    require_nodes(n, 3, "assemble_dxx_1d");
    require_spacing(h, "assemble_dxx_1d");
    const double s = 1.0 / (h * h);
    std::vector<Triplet> entries;
    for (int r = 0; r < n - 2; ++r) {
        entries.emplace_back(r, r, s);
        entries.emplace_back(r, r + 1, -2.0 * s);
        entries.emplace_back(r, r + 2, s);
    }
    return from_triplets(n - 2, n, entries);
}

SparseMatrix assemble_forward_dx_1d(int n, double h) {
    require_nodes(n, 2, "assemble_forward_dx_1d");
    require_spacing(h, "assemble_forward_dx_1d");
    std::vector<Triplet> entries;
    for (int r = 0; r < n - 1; ++r) {
        entries.emplace_back(r, r, -1.0 / h);
        entries.emplace_back(r, r + 1, 1.0 / h);
    }
    return from_triplets(n - 1, n, entries);
}

SparseMatrix assemble_grad_quad_1d(int n, double h) {
    require_nodes(n, 2, "assemble_grad_quad_1d");
    require_spacing(h, "assemble_grad_quad_1d");
    SparseMatrix d = assemble_forward_dx_1d(n, h);
    SparseMatrix m = SparseMatrix(d.transpose()) * d;
    m.makeCompressed();
    return m;
}

SparseMatrix assemble_laplacian_2d(int n, double h) {
    require_nodes(n, 2, "assemble_laplacian_2d");
    require_spacing(h, "assemble_laplacian_2d");
    // Row-major ordering: k = j*n + i, so x-operators act on the fast index.
    SparseMatrix d = assemble_forward_dx_1d(n, h);
    SparseMatrix dx = kron(identity(n), d);
    SparseMatrix dy = kron(d, identity(n));
    SparseMatrix m = SparseMatrix(dx.transpose()) * dx + SparseMatrix(dy.transpose()) * dy;
    m.prune(0.0);
    m.makeCompressed();
    return m;
}

SparseMatrix assemble_centered_dx(int n, double h) {
    require_nodes(n, 3, "assemble_centered_dx");
    require_spacing(h, "assemble_centered_dx");
    const double s = 1.0 / (2.0 * h);
    std::vector<Triplet> entries;
    entries.emplace_back(0, 0, -2.0 * s);
    entries.emplace_back(0, 1, 2.0 * s);
    for (int r = 1; r < n - 1; ++r) {
        entries.emplace_back(r, r - 1, -s);
        entries.emplace_back(r, r + 1, s);
    }
    entries.emplace_back(n - 1, n - 2, -2.0 * s);
    entries.emplace_back(n - 1, n - 1, 2.0 * s);
    return from_triplets(n, n, entries);
}

SparseMatrix centered_dx(const Grid& grid) {
    SparseMatrix d = assemble_centered_dx(grid.n(), grid.h());
    if (grid.dim() == 1) return d;
    return kron(identity(grid.n()), d);
}

SparseMatrix centered_dy(const Grid& grid) {
    if (grid.dim() == 1) {
        throw InvalidArgument("centered_dy requires a 2D grid");
    }
    return kron(assemble_centered_dx(grid.n(), grid.h()), identity(grid.n()));
}

SparseMatrix gradient_energy(const Grid& grid) {
    const double h = grid.h();
    if (grid.dim() == 1) {
        SparseMatrix m = assemble_grad_quad_1d(grid.n(), h) * h;
        return m;
    }
    SparseMatrix m = assemble_laplacian_2d(grid.n(), h) * (h * h);
    return m;
}

}  // namespace cvxcone
