#include "cvxcone/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "cvxcone/errors.hpp"

namespace cvxcone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr double kRhoEqFactor = 1e3;
constexpr double kMinScaling = 1e-4;
constexpr double kMaxScaling = 1e4;

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

double clamp_scaling(double v) {
    if (v < kMinScaling) return 1.0;  // an empty row or column is left alone
    return std::min(v, kMaxScaling);
}

// Infinity norms of the columns of a column-major sparse matrix.
Vector col_inf_norms(const SparseMatrix& m) {
    Vector out = Vector::Zero(m.cols());
    for (int c = 0; c < m.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(m, c); it; ++it)
            out[c] = std::max(out[c], std::abs(it.value()));
    return out;
}

Vector row_inf_norms(const SparseMatrix& m) {
    Vector out = Vector::Zero(m.rows());
    for (int c = 0; c < m.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(m, c); it; ++it)
            out[it.row()] = std::max(out[it.row()], std::abs(it.value()));
    return out;
}

bool is_equality(double l, double u) { return std::isfinite(l) && std::isfinite(u) && u - l < 1e-12 * std::max(1.0, std::abs(l)); }

// Scaled copy of the problem: Pbar = c D P D, qbar = c D q, Abar = E A D.
struct ScaledProblem {
    SparseMatrix P;
    Vector q;
    SparseMatrix A;
    SparseMatrix At;
    Vector l;
    Vector u;
    Vector D;
    Vector E;
    Vector Dinv;
    Vector Einv;
    double c = 1.0;
    double cinv = 1.0;
};

ScaledProblem equilibrate(const QpProblem& qp, int iterations) {
    const int n = qp.num_vars();
    const int m = qp.num_rows();
    ScaledProblem s;
    s.P = qp.P;
    s.q = qp.q;
    s.A = qp.A;
    s.D = Vector::Ones(n);
    s.E = Vector::Ones(m);

    for (int it = 0; it < iterations; ++it) {
        Vector dcol = col_inf_norms(s.P).cwiseMax(col_inf_norms(s.A));
        Vector d(n);
        for (int j = 0; j < n; ++j) d[j] = 1.0 / std::sqrt(clamp_scaling(dcol[j]));
        Vector erow = row_inf_norms(s.A);
        Vector e(m);
        for (int i = 0; i < m; ++i) e[i] = 1.0 / std::sqrt(clamp_scaling(erow[i]));

        s.P = d.asDiagonal() * s.P * d.asDiagonal();
        s.A = e.asDiagonal() * s.A * d.asDiagonal();
        s.q = d.cwiseProduct(s.q);
        s.D = s.D.cwiseProduct(d);
        s.E = s.E.cwiseProduct(e);

        double mean_p = n > 0 ? col_inf_norms(s.P).mean() : 0.0;
        double cost = std::max(mean_p, inf_norm(s.q));
        double gamma = 1.0 / clamp_scaling(cost);
        s.P *= gamma;
        s.q *= gamma;
        s.c *= gamma;
    }
    s.P.makeCompressed();
    s.A.makeCompressed();
    s.At = s.A.transpose();
    s.cinv = 1.0 / s.c;
    s.Dinv = s.D.cwiseInverse();
    s.Einv = s.E.cwiseInverse();
    s.l = Vector(m);
    s.u = Vector(m);
    for (int i = 0; i < m; ++i) {
        s.l[i] = std::isfinite(qp.lower[i]) ? s.E[i] * qp.lower[i] : -kInf;
        s.u[i] = std::isfinite(qp.upper[i]) ? s.E[i] * qp.upper[i] : kInf;
    }
    return s;
}

struct Residuals {
    double prim = 0.0;
    double dual = 0.0;
    double prim_scale = 0.0;
    double dual_scale = 0.0;
    double box_violation = 0.0;  // distance of A x to [l, u], unscaled
};

// Residuals in the original (unscaled) units for a scaled iterate.
Residuals compute_residuals(const ScaledProblem& s, const Vector& x, const Vector& z, const Vector& y) {
    Residuals r;
    Vector Ax = s.A * x;
    Vector Px = s.P * x;
    Vector Aty = s.At * y;
    r.prim = inf_norm(s.Einv.cwiseProduct(Ax - z));
    r.box_violation = inf_norm(s.Einv.cwiseProduct(Ax - Ax.cwiseMax(s.l).cwiseMin(s.u)));
    r.prim_scale = std::max(inf_norm(s.Einv.cwiseProduct(Ax)), inf_norm(s.Einv.cwiseProduct(z)));
    r.dual = s.cinv * inf_norm(s.Dinv.cwiseProduct(Px + s.q + Aty));
    r.dual_scale = s.cinv * std::max({inf_norm(s.Dinv.cwiseProduct(Px)), inf_norm(s.Dinv.cwiseProduct(Aty)),
                                      inf_norm(s.Dinv.cwiseProduct(s.q))});
    return r;
}

bool converged(const Residuals& r, const SolverSettings& st) {
    return r.prim <= st.eps_abs + st.eps_rel * r.prim_scale && r.box_violation <= st.eps_abs &&
           r.dual <= st.eps_abs + st.eps_rel * r.dual_scale;
}

Vector project_box(const Vector& v, const Vector& l, const Vector& u) { return v.cwiseMax(l).cwiseMin(u); }

// Quasi-definite KKT matrix with a fixed sparsity pattern; only the lower-right
// diagonal changes when rho is updated.
class KktSystem {
public:
    KktSystem(const ScaledProblem& s, double sigma, const Vector& rho) : n_(static_cast<int>(s.q.size())) {
        const int m = static_cast<int>(s.A.rows());
        std::vector<Triplet> entries;
        entries.reserve(static_cast<std::size_t>(s.P.nonZeros() + 2 * s.A.nonZeros() + n_ + m));
        for (int c = 0; c < s.P.outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(s.P, c); it; ++it)
                if (it.row() >= c) entries.emplace_back(it.row(), c, it.value());
        for (int j = 0; j < n_; ++j) entries.emplace_back(j, j, sigma);
        for (int c = 0; c < s.A.outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(s.A, c); it; ++it)
                entries.emplace_back(n_ + it.row(), c, it.value());
        for (int i = 0; i < m; ++i) entries.emplace_back(n_ + i, n_ + i, -1.0 / rho[i]);
        K_.resize(n_ + m, n_ + m);
        K_.setFromTriplets(entries.begin(), entries.end());
        K_.makeCompressed();
        diag_.resize(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const int col = n_ + i;
            for (int k = K_.outerIndexPtr()[col]; k < K_.outerIndexPtr()[col + 1]; ++k) {
                if (K_.innerIndexPtr()[k] == col) diag_[static_cast<std::size_t>(i)] = k;
            }
        }
        ldlt_.analyzePattern(K_);
        factor();
    }

    void update_rho(const Vector& rho) {
        for (std::size_t i = 0; i < diag_.size(); ++i) K_.valuePtr()[diag_[i]] = -1.0 / rho[static_cast<Eigen::Index>(i)];
        factor();
    }

    Vector solve(const Vector& rhs) const { return ldlt_.solve(rhs); }

private:
    void factor() {
        ldlt_.factorize(K_);
        if (ldlt_.info() != Eigen::Success) {
            throw InvalidProblem("KKT factorization failed; P may not be positive semidefinite");
        }
        const Vector& d = ldlt_.vectorD();
        Eigen::Index positive = (d.array() > 0.0).count();
        if (positive != n_) {
            throw InvalidProblem("KKT matrix has the wrong inertia; P is not positive semidefinite");
        }
    }

    int n_;
    SparseMatrix K_;
    std::vector<int> diag_;
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt_;
};

Vector rho_vector(const ScaledProblem& s, double rho) {
    const auto m = s.l.size();
    Vector out(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!std::isfinite(s.l[i]) && !std::isfinite(s.u[i])) {
            out[i] = kRhoMin;
        } else if (is_equality(s.l[i], s.u[i])) {
            out[i] = kRhoEqFactor * rho;
        } else {
            out[i] = rho;
        }
    }
    return out;
}

bool primal_infeasible(const ScaledProblem& s, const Vector& dy, double eps) {
    Vector dy_unscaled = s.E.cwiseProduct(dy);
    double norm = inf_norm(dy_unscaled);
    if (norm < 1e-30) return false;
    Vector Atdy = s.Dinv.cwiseProduct(s.At * dy);  // unscaled A^T dy up to c
    if (inf_norm(Atdy) > eps * norm) return false;
    double support = 0.0;
    for (Eigen::Index i = 0; i < dy.size(); ++i) {
        double v = dy_unscaled[i];
        if (v > 0) {
            double ui = s.u[i] * s.Einv[i];
            if (!std::isfinite(ui)) return false;
            support += ui * v;
        } else if (v < 0) {
            double li = s.l[i] * s.Einv[i];
            if (!std::isfinite(li)) return false;
            support += li * v;
        }
    }
    return support < -eps * norm;
}

bool dual_infeasible(const ScaledProblem& s, const Vector& dx, double eps) {
    Vector dx_unscaled = s.D.cwiseProduct(dx);
    double norm = inf_norm(dx_unscaled);
    if (norm < 1e-30) return false;
    if (s.cinv * inf_norm(s.Dinv.cwiseProduct(s.P * dx)) > eps * norm) return false;
    if (s.cinv * s.q.dot(dx) > -eps * norm) return false;
    Vector Adx = s.Einv.cwiseProduct(s.A * dx);
    for (Eigen::Index i = 0; i < Adx.size(); ++i) {
        bool lo = std::isfinite(s.l[i]);
        bool hi = std::isfinite(s.u[i]);
        if (hi && Adx[i] > eps * norm) return false;
        if (lo && Adx[i] < -eps * norm) return false;
    }
    return true;
}

constexpr int kInactive = 2;

struct PolishResult {
    bool ok = false;
    Vector x;
    Vector z;
    Vector y;
    Residuals res;
};

// Solve the equality-constrained QP with the rows in `side` held at a bound
// (-1 lower, +1 upper, 0 equality). Multipliers are returned unclipped.
// The regularization is proximal around (x0, y0), so on a degenerate face the
// result stays near the ADMM iterate.
PolishResult solve_active(const ScaledProblem& s, const std::vector<int>& side_of_row, const Vector& x0,
                          const Vector& y0, const SolverSettings& st) {
    const int n = static_cast<int>(s.q.size());
    const int m = static_cast<int>(s.l.size());
    std::vector<int> active;
    for (int i = 0; i < m; ++i)
        if (side_of_row[static_cast<std::size_t>(i)] != kInactive) active.push_back(i);
    const int na = static_cast<int>(active.size());

    std::vector<Triplet> entries;
    std::vector<Triplet> exact;
    // Regularization relative to the diagonal of P keeps refinement fast when P is tiny.
    Vector delta = Vector::Constant(n, st.polish_delta);
    for (int c = 0; c < s.P.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(s.P, c); it; ++it)
            if (it.row() >= c) {
                entries.emplace_back(it.row(), c, it.value());
                exact.emplace_back(it.row(), c, it.value());
                if (it.row() != c) exact.emplace_back(c, it.row(), it.value());
                if (it.row() == c && it.value() > 0.0) delta[c] = st.polish_delta * it.value();
            }
    for (int j = 0; j < n; ++j) entries.emplace_back(j, j, delta[j]);
    std::vector<int> row_to_active(static_cast<std::size_t>(m), -1);
    for (int k = 0; k < na; ++k) row_to_active[static_cast<std::size_t>(active[static_cast<std::size_t>(k)])] = k;
    for (int c = 0; c < s.A.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(s.A, c); it; ++it) {
            int k = row_to_active[static_cast<std::size_t>(it.row())];
            if (k < 0) continue;
            entries.emplace_back(n + k, c, it.value());
            exact.emplace_back(n + k, c, it.value());
            exact.emplace_back(c, n + k, it.value());
        }
    for (int k = 0; k < na; ++k) entries.emplace_back(n + k, n + k, -st.polish_delta);

    SparseMatrix Kreg(n + na, n + na);
    Kreg.setFromTriplets(entries.begin(), entries.end());
    SparseMatrix K(n + na, n + na);
    K.setFromTriplets(exact.begin(), exact.end());

    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt(Kreg);
    PolishResult out;
    if (ldlt.info() != Eigen::Success) return out;

    Vector rhs(n + na);
    rhs.head(n) = -s.q;
    Vector prox(n + na);
    prox.head(n) = delta.cwiseProduct(x0);
    for (int k = 0; k < na; ++k) {
        int i = active[static_cast<std::size_t>(k)];
        int sd = side_of_row[static_cast<std::size_t>(i)];
        rhs[n + k] = sd > 0 ? s.u[i] : s.l[i];
        prox[n + k] = -st.polish_delta * y0[i];
    }
    Vector sol = ldlt.solve(rhs + prox);
    // Refinement stops as soon as it no longer reduces the residual, which
    // happens when the active rows are inconsistent.
    double resid = inf_norm(rhs - K * sol);
    for (int r = 0; r < st.polish_refine_iter; ++r) {
        Vector next = sol + ldlt.solve(rhs - K * sol);
        double next_resid = inf_norm(rhs - K * next);
        if (!(next_resid < resid)) break;
        sol = std::move(next);
        resid = next_resid;
    }
    if (!sol.allFinite()) return out;

    out.x = sol.head(n);
    out.y = Vector::Zero(m);
    for (int k = 0; k < na; ++k) out.y[active[static_cast<std::size_t>(k)]] = sol[n + k];
    out.ok = true;
    return out;
}

// Residuals of an active-set solution after clipping multipliers of the
// wrong sign to zero.
void finish_candidate(const ScaledProblem& s, const std::vector<int>& side, PolishResult& p) {
    const auto m = s.l.size();
    for (Eigen::Index i = 0; i < m; ++i) {
        int sd = side[static_cast<std::size_t>(i)];
        if (sd > 0 && p.y[i] < 0) p.y[i] = 0;
        if (sd < 0 && p.y[i] > 0) p.y[i] = 0;
    }
    p.z = project_box(s.A * p.x, s.l, s.u);
    p.res = compute_residuals(s, p.x, p.z, p.y);
}

double polish_score(const Residuals& r, const SolverSettings& st) {
    return std::max({r.prim / (st.eps_abs + st.eps_rel * r.prim_scale),
                     r.dual / (st.eps_abs + st.eps_rel * r.dual_scale), r.box_violation / st.eps_abs});
}

// Active-set polishing. Candidate sets come from the multiplier signs and from
// the distance of the slack to each bound at several thresholds.
PolishResult polish(const ScaledProblem& s, const Vector& x, const Vector& z, const Vector& y, const SolverSettings& st) {
    const int m = static_cast<int>(s.l.size());
    auto guess = [&](double tol, bool use_dual) {
        std::vector<int> side(static_cast<std::size_t>(m), kInactive);
        for (int i = 0; i < m; ++i) {
            auto& sd = side[static_cast<std::size_t>(i)];
            double dl = z[i] - s.l[i];
            double du = s.u[i] - z[i];
            if (is_equality(s.l[i], s.u[i]))
                sd = 0;
            else if (std::isfinite(s.l[i]) && ((use_dual && dl < -y[i]) || dl <= tol * std::max(1.0, std::abs(s.l[i]))))
                sd = -1;
            else if (std::isfinite(s.u[i]) && ((use_dual && du < y[i]) || du <= tol * std::max(1.0, std::abs(s.u[i]))))
                sd = 1;
        }
        return side;
    };

    PolishResult best;
    double best_score = kInf;
    std::vector<std::vector<int>> tried;
    const std::pair<double, bool> rules[] = {{-1.0, true}, {1e-7, true}, {1e-5, true}, {1e-7, false}, {1e-5, false}, {1e-3, false}};
    for (const auto& [tol, use_dual] : rules) {
        std::vector<int> side = guess(tol, use_dual);
        if (std::find(tried.begin(), tried.end(), side) != tried.end()) continue;
        PolishResult p = solve_active(s, side, x, y, st);
        tried.push_back(std::move(side));
        if (!p.ok) continue;
        finish_candidate(s, tried.back(), p);
        double score = polish_score(p.res, st);
        if (score < best_score) {
            best_score = score;
            best = std::move(p);
        }
        if (best_score <= 1.0) break;
    }
    return best;
}

}  // namespace

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::primal_infeasible: return "primal_infeasible";
        case SolveStatus::dual_infeasible: return "dual_infeasible";
    }
    return "unknown";
}

void validate(const QpProblem& qp) {
    const int n = qp.num_vars();
    const int m = qp.num_rows();
    if (qp.P.rows() != n || qp.P.cols() != n) throw InvalidProblem("P must be num_vars x num_vars");
    if (qp.A.cols() != n) throw InvalidProblem("A must have num_vars columns");
    if (qp.lower.size() != m || qp.upper.size() != m) throw InvalidProblem("bound vectors must match rows(A)");
    if (!qp.q.allFinite()) throw InvalidProblem("q has non-finite entries");
    for (int i = 0; i < m; ++i) {
        if (std::isnan(qp.lower[i]) || std::isnan(qp.upper[i])) throw InvalidProblem("NaN bound");
        if (qp.lower[i] > qp.upper[i]) {
            throw InvalidProblem("lower > upper in row " + std::to_string(i));
        }
    }
    SparseMatrix diff = qp.P - SparseMatrix(qp.P.transpose());
    for (int c = 0; c < diff.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(diff, c); it; ++it)
            if (it.value() != 0.0) throw InvalidProblem("P is not symmetric");
    for (int c = 0; c < qp.P.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(qp.P, c); it; ++it)
            if (!std::isfinite(it.value())) throw InvalidProblem("P has non-finite entries");
    for (int c = 0; c < qp.A.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(qp.A, c); it; ++it)
            if (!std::isfinite(it.value())) throw InvalidProblem("A has non-finite entries");
}

void append_rows(QpProblem& qp, const SparseMatrix& block, const Vector& lower, const Vector& upper) {
    const int n = qp.num_vars();
    if (block.cols() > n) throw InvalidProblem("constraint block has more columns than variables");
    if (block.rows() != lower.size() || block.rows() != upper.size()) {
        throw InvalidProblem("constraint block and bounds disagree");
    }
    const int m0 = qp.num_rows();
    const int m1 = m0 + static_cast<int>(block.rows());
    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(qp.A.nonZeros() + block.nonZeros()));
    for (int c = 0; c < qp.A.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(qp.A, c); it; ++it) entries.emplace_back(it.row(), c, it.value());
    for (int c = 0; c < block.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(block, c); it; ++it) entries.emplace_back(m0 + it.row(), c, it.value());
    SparseMatrix A(m1, n);
    A.setFromTriplets(entries.begin(), entries.end());
    A.makeCompressed();
    qp.A = std::move(A);
    Vector l(m1), u(m1);
    l << qp.lower, lower;
    u << qp.upper, upper;
    qp.lower = std::move(l);
    qp.upper = std::move(u);
}

Solution solve(const QpProblem& qp, const SolverSettings& st) {
    validate(qp);
    if (!(st.eps_abs > 0) || !(st.eps_rel > 0) || st.max_iter < 1) {
        throw InvalidArgument("solver tolerances must be positive and max_iter >= 1");
    }
    const int n = qp.num_vars();
    const int m = qp.num_rows();

    ScaledProblem s = equilibrate(qp, st.scaling_iter);
    double rho = st.rho;
    Vector rho_vec = rho_vector(s, rho);
    Vector rho_inv = rho_vec.cwiseInverse();
    KktSystem kkt(s, st.sigma, rho_vec);

    Vector x = Vector::Zero(n);
    Vector z = Vector::Zero(m);
    Vector y = Vector::Zero(m);
    Vector x_prev = x;
    Vector y_prev = y;
    Vector rhs(n + m);

    Solution sol;
    sol.status = SolveStatus::max_iter;
    Residuals res;
    int last_rho_update = 0;
    int next_polish = 200;

    auto finish_polish = [&](bool force_accept_if_better) -> bool {
        if (!st.polish) return false;
        PolishResult p = polish(s, x, z, y, st);
        if (!p.ok) return false;
        bool good = converged(p.res, st);
        bool better = p.res.prim <= res.prim && p.res.dual <= res.dual;
        if (good || (force_accept_if_better && better)) {
            x = p.x;
            z = p.z;
            y = p.y;
            res = p.res;
            sol.polished = true;
            return good;
        }
        return false;
    };

    int iter = 0;
    for (iter = 1; iter <= st.max_iter; ++iter) {
        x_prev = x;
        Vector z_prev = z;
        y_prev = y;

        rhs.head(n) = st.sigma * x_prev - s.q;
        rhs.tail(m) = z_prev - rho_inv.cwiseProduct(y);
        Vector sol_kkt = kkt.solve(rhs);
        Vector x_tilde = sol_kkt.head(n);
        Vector z_tilde = z_prev + rho_inv.cwiseProduct(sol_kkt.tail(m) - y);

        x = st.alpha * x_tilde + (1.0 - st.alpha) * x_prev;
        Vector z_relaxed = st.alpha * z_tilde + (1.0 - st.alpha) * z_prev;
        Vector v = z_relaxed + rho_inv.cwiseProduct(y);
        z = project_box(v, s.l, s.u);
        // Equal to y + rho (z_relaxed - z), but exactly zero on rows off their bounds.
        y = rho_vec.cwiseProduct(v - z);

        bool check = iter % st.check_interval == 0 || iter == st.max_iter;
        if (!check) continue;

        res = compute_residuals(s, x, z, y);
        if (converged(res, st)) {
            sol.status = SolveStatus::optimal;
            finish_polish(true);
            break;
        }
        if (primal_infeasible(s, y - y_prev, st.eps_prim_inf)) {
            sol.status = SolveStatus::primal_infeasible;
            break;
        }
        if (dual_infeasible(s, x - x_prev, st.eps_dual_inf)) {
            sol.status = SolveStatus::dual_infeasible;
            break;
        }
        // Early polish: an accurate active-set guess often appears long before
        // the ADMM residuals are small, especially for LPs.
        if (st.polish && iter >= next_polish) {
            next_polish *= 2;
            if (finish_polish(false)) {
                sol.status = SolveStatus::optimal;
                break;
            }
        }
        if (st.adaptive_rho && iter - last_rho_update >= st.adaptive_rho_interval) {
            double ratio = std::sqrt((res.prim / (res.prim_scale + 1e-30)) / (res.dual / (res.dual_scale + 1e-30) + 1e-30));
            double new_rho = std::clamp(rho * ratio, kRhoMin, kRhoMax);
            if (new_rho > st.adaptive_rho_tolerance * rho || new_rho < rho / st.adaptive_rho_tolerance) {
                rho = new_rho;
                rho_vec = rho_vector(s, rho);
                rho_inv = rho_vec.cwiseInverse();
                kkt.update_rho(rho_vec);
            }
            last_rho_update = iter;
        }
    }
    sol.iterations = std::min(iter, st.max_iter);
    if (sol.status == SolveStatus::max_iter && finish_polish(true)) sol.status = SolveStatus::optimal;

    if (sol.status == SolveStatus::optimal || sol.status == SolveStatus::max_iter) {
        sol.x = s.D.cwiseProduct(x);
        sol.y = s.cinv * s.E.cwiseProduct(y);
    } else if (sol.status == SolveStatus::primal_infeasible) {
        // Certificate direction.
        sol.x = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
        sol.y = s.E.cwiseProduct(y - y_prev);
    } else {
        sol.x = s.D.cwiseProduct(x - x_prev);
        sol.y = Vector::Constant(m, std::numeric_limits<double>::quiet_NaN());
    }
    sol.primal_residual = res.prim;
    sol.dual_residual = res.dual;
    sol.objective = sol.x.allFinite() ? qp.objective(sol.x) : std::numeric_limits<double>::quiet_NaN();
    if (sol.status == SolveStatus::dual_infeasible) sol.objective = -kInf;
    if (sol.status == SolveStatus::primal_infeasible) sol.objective = kInf;
    return sol;
}

KktReport check_kkt(const QpProblem& qp, const Solution& sol, const SolverSettings& st) {
    KktReport r;
    Vector Ax = qp.A * sol.x;
    Vector Px = qp.P * sol.x;
    Vector Aty = qp.A.transpose() * sol.y;
    r.stationarity = inf_norm(Px + qp.q + Aty);
    double scale = std::max({inf_norm(Px), inf_norm(Aty), inf_norm(qp.q)});
    r.stationarity_tol = st.eps_abs + st.eps_rel * scale;
    r.stationarity_ok = r.stationarity <= r.stationarity_tol;
    r.primal_violation = inf_norm(project_box(Ax, qp.lower, qp.upper) - Ax);
    r.primal_ok = r.primal_violation <= st.eps_abs;
    double comp = 0.0;
    for (Eigen::Index i = 0; i < Ax.size(); ++i) {
        double yi = sol.y[i];
        if (yi == 0.0) continue;
        double bound = yi > 0 ? qp.upper[i] : qp.lower[i];
        double dist = std::isfinite(bound) ? std::abs(Ax[i] - bound) : kInf;
        comp = std::max(comp, std::abs(yi) * dist);
    }
    r.complementarity = comp;
    r.complementarity_ok = comp <= 10.0 * st.eps_abs;
    return r;
}

nlohmann::json to_json(const Solution& sol) {
    nlohmann::json xs = nlohmann::json::array();
    for (Eigen::Index i = 0; i < sol.x.size(); ++i) xs.push_back(sol.x[i]);
    auto num = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) return v;
        return nullptr;
    };
    return {{"status", to_string(sol.status)},
            {"objective", num(sol.objective)},
            {"iterations", sol.iterations},
            {"primal_residual", num(sol.primal_residual)},
            {"dual_residual", num(sol.dual_residual)},
            {"x", xs}};
}

}  // namespace cvxcone
