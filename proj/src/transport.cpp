#include "drs/transport.hpp"

#include "drs/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

namespace drs {

namespace {

void check_simplex(const Vector& w, const char* name) {
    if (w.size() == 0)
        throw ValidationError(std::string(name) + " must be non-empty");
    if (!w.allFinite() || (w.array() < 0).any())
        throw ValidationError(std::string(name) + " must be non-negative and finite");
    if (std::abs(w.sum() - 1.0) > 1e-9)
        throw ValidationError(std::string(name) + " must sum to 1, got " +
                              std::to_string(w.sum()));
}

void check_cost(const Matrix& c, const char* name) {
    if (c.rows() == 0 || c.cols() == 0)
        throw ValidationError(std::string(name) + " must be non-empty");
    if (!c.allFinite())
        throw ValidationError(std::string(name) + " must be finite");
    if ((c.array() < 0).any())
        throw ValidationError(std::string(name) + " must be non-negative");
}

void check_intra_cost(const Matrix& c, const char* name) {
    check_cost(c, name);
    if (c.rows() != c.cols())
        throw ValidationError(std::string(name) + " must be square");
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw ValidationError(std::string(name) + " must be symmetric");
    if (c.diagonal().cwiseAbs().maxCoeff() > 1e-9)
        throw ValidationError(std::string(name) + " must have a zero diagonal");
}

[[noreturn]] void throw_nonfinite(double beta) {
    std::ostringstream msg;
    msg << "transport solve produced non-finite values (beta=" << beta
        << "); increase beta or rescale the costs";
    throw ValidationError(msg.str());
}

// Proximal-point scaling iterations; assumes validated inputs.
std::pair<Matrix, double> ipot_core(const Matrix& cost, const Vector& p,
                                    const Vector& q, const OTConfig& cfg) {
    const auto m = cost.rows();
    const auto n = cost.cols();
    const Matrix kernel = (-cost / cfg.beta).array().exp();
    Matrix phi = Matrix::Ones(m, n);
    Vector delta = p;
    Vector sigma = q;
    for (int outer = 0; outer < cfg.outer_iters; ++outer) {
        const Matrix q_mat = kernel.cwiseProduct(phi);
        for (int inner = 0; inner < cfg.inner_iters; ++inner) {
            delta = p.array() / (q_mat * sigma).array();
            sigma = q.array() / (q_mat.transpose() * delta).array();
        }
        phi = delta.asDiagonal() * q_mat * sigma.asDiagonal();
        if (!phi.allFinite())
            throw_nonfinite(cfg.beta);
    }
    return {phi, cost.cwiseProduct(phi).sum()};
}

// Orders an instance against its transpose so that (C, p, q) and
// (C^T, q, p) resolve to the same computation: wider-than-tall solves
// as-is, taller-than-wide solves transposed, and square instances break
// the tie lexicographically.  This makes transpose symmetry exact
// rather than approximate, since the scaling sweeps themselves are not
// symmetric at finite iteration counts.
bool prefer_transposed(const Matrix& c, const Vector& p, const Vector& q) {
    if (c.rows() != c.cols())
        return c.rows() > c.cols();
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            if (c(j, i) < c(i, j)) return true;
            if (c(j, i) > c(i, j)) return false;
        }
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (q(i) < p(i)) return true;
        if (q(i) > p(i)) return false;
    }
    return false; // instance equals its own transpose
}

TransportPlan make_plan(Matrix values) {
    TransportPlan plan;
    plan.row_marginal = values.rowwise().sum();
    plan.col_marginal = values.colwise().sum().transpose();
    plan.values = std::move(values);
    return plan;
}

void check_feasible(const TransportPlan& plan, const Vector& p, const Vector& q,
                    double tol) {
    const double row_err = (plan.row_marginal - p).cwiseAbs().maxCoeff();
    const double col_err = (plan.col_marginal - q).cwiseAbs().maxCoeff();
    if (row_err > tol || col_err > tol) {
        std::ostringstream msg;
        msg << "transport plan infeasible: marginal error "
            << std::max(row_err, col_err) << " exceeds " << tol
            << "; raise iteration counts";
        throw Error(msg.str());
    }
}

Matrix identity_bias_init(const Vector& p, const Vector& q) {
    // Product coupling nudged toward the identity matching; breaks the
    // saddle that the plain product coupling sits on for symmetric
    // instances.
    const auto m = p.size();
    const auto n = q.size();
    Matrix init(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double u = static_cast<double>(i) / std::max<Eigen::Index>(1, m - 1);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = static_cast<double>(j) / std::max<Eigen::Index>(1, n - 1);
            init(i, j) = p(i) * q(j) * (1.0 + 0.1 * std::exp(-8.0 * (u - v) * (u - v)));
        }
    }
    return init;
}

} // namespace

void OTConfig::validate() const {
    if (!(beta > 0) || !std::isfinite(beta))
        throw ValidationError("beta must be positive and finite");
    if (outer_iters < 1 || inner_iters < 1 || gw_outer_iters < 1)
        throw ValidationError("iteration counts must be at least 1");
    if (!(marginal_tol > 0))
        throw ValidationError("marginal_tol must be positive");
}

OTResult wasserstein(const Matrix& cost, const Vector& z_q, const Vector& z_k,
                     const OTConfig& cfg) {
    cfg.validate();
    check_cost(cost, "cost matrix");
    if (cost.rows() != z_q.size() || cost.cols() != z_k.size())
        throw ValidationError("cost matrix shape does not match the marginals");
    check_simplex(z_q, "row marginal");
    check_simplex(z_k, "column marginal");

    OTResult result;
    if (prefer_transposed(cost, z_q, z_k)) {
        auto [phi, dist] = ipot_core(cost.transpose(), z_k, z_q, cfg);
        result.plan = make_plan(phi.transpose());
        result.distance = dist;
    } else {
        auto [phi, dist] = ipot_core(cost, z_q, z_k, cfg);
        result.plan = make_plan(std::move(phi));
        result.distance = dist;
    }
    check_feasible(result.plan, z_q, z_k, cfg.marginal_tol);
    return result;
}

OTResult gromov_wasserstein(const Matrix& cx, const Matrix& cy,
                            const Vector& p, const Vector& q,
                            const OTConfig& cfg) {
    cfg.validate();
    check_intra_cost(cx, "first intra-graph matrix");
    check_intra_cost(cy, "second intra-graph matrix");
    if (cx.rows() != p.size() || cy.rows() != q.size())
        throw ValidationError("intra-graph matrix shapes do not match the weights");
    check_simplex(p, "first node weights");
    check_simplex(q, "second node weights");

    const auto m = p.size();
    const auto n = q.size();
    // Constant part of the linearized cost; only the cross term depends
    // on the plan.
    const Matrix cxy = (cx.cwiseProduct(cx) * p) * Matrix::Ones(1, n) +
                       Matrix::Ones(m, 1) * (cy.cwiseProduct(cy) * q).transpose();

    const Matrix bias = identity_bias_init(p, q);
    const std::vector<Matrix> inits = {p * q.transpose(), bias,
                                       bias.colwise().reverse()};

    bool have_best = false;
    Matrix best_plan;
    double best_dist = 0;
    for (const Matrix& init : inits) {
        Matrix phi = init;
        Matrix lin;
        for (int iter = 0; iter < cfg.gw_outer_iters; ++iter) {
            lin = cxy - 2.0 * cx * phi * cy.transpose();
            phi = wasserstein(lin.cwiseMax(0.0), p, q, cfg).plan.values;
        }
        // Objective uses the unclamped linearization from the final
        // round together with the freshly updated plan.
        const double dist = lin.cwiseProduct(phi).sum();
        if (!std::isfinite(dist))
            throw_nonfinite(cfg.beta);
        if (!have_best || dist < best_dist) {
            have_best = true;
            best_plan = std::move(phi);
            best_dist = dist;
        }
    }

    OTResult result;
    result.plan = make_plan(std::move(best_plan));
    result.distance = best_dist;
    return result;
}

ExactPlan exact_ot(const Matrix& cost, const Vector& p, const Vector& q) {
    check_cost(cost, "cost matrix");
    const int m = static_cast<int>(cost.rows());
    const int n = static_cast<int>(cost.cols());
    if (m != p.size() || n != q.size())
        throw ValidationError("cost matrix shape does not match the marginals");
    if (static_cast<long>(m) * n > 400)
        throw ValidationError("exact oracle limited to 400 cells, got " +
                              std::to_string(static_cast<long>(m) * n));
    check_simplex(p, "row marginal");
    check_simplex(q, "column marginal");

    Matrix x = Matrix::Zero(m, n);
    std::vector<std::pair<int, int>> basis;
    basis.reserve(m + n - 1);
    std::vector<char> basic(static_cast<std::size_t>(m) * n, 0);

    // Northwest-corner start: greedily exhausts row or column supplies,
    // advancing so that exactly m+n-1 cells enter the basis.
    {
        Vector a = p;
        Vector b = q;
        int i = 0, j = 0;
        while (true) {
            const double move = std::min(a(i), b(j));
            x(i, j) = move;
            a(i) -= move;
            b(j) -= move;
            basis.emplace_back(i, j);
            basic[static_cast<std::size_t>(i) * n + j] = 1;
            if (i == m - 1 && j == n - 1) break;
            if (a(i) <= b(j) && i < m - 1)
                ++i;
            else
                ++j;
        }
        if (static_cast<int>(basis.size()) != m + n - 1)
            throw Error("northwest-corner start produced a non-spanning basis");
    }

    const double kNaN = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> u(m), v(n);

    auto solve_potentials = [&] {
        std::fill(u.begin(), u.end(), kNaN);
        std::fill(v.begin(), v.end(), kNaN);
        std::vector<std::vector<int>> row_adj(m), col_adj(n);
        for (auto [bi, bj] : basis) {
            row_adj[bi].push_back(bj);
            col_adj[bj].push_back(bi);
        }
        u[0] = 0.0;
        std::vector<std::pair<bool, int>> stack = {{true, 0}}; // (is_row, index)
        while (!stack.empty()) {
            auto [is_row, k] = stack.back();
            stack.pop_back();
            if (is_row) {
                for (int bj : row_adj[k])
                    if (std::isnan(v[bj])) {
                        v[bj] = cost(k, bj) - u[k];
                        stack.emplace_back(false, bj);
                    }
            } else {
                for (int bi : col_adj[k])
                    if (std::isnan(u[bi])) {
                        u[bi] = cost(bi, k) - v[k];
                        stack.emplace_back(true, bi);
                    }
            }
        }
        for (double val : u)
            if (std::isnan(val)) throw Error("disconnected transport basis");
        for (double val : v)
            if (std::isnan(val)) throw Error("disconnected transport basis");
    };

    int pivots = 0;
    constexpr int kMaxPivots = 100000;
    while (true) {
        solve_potentials();

        // First cell in row-major order with negative reduced cost
        // enters; this rule cannot cycle even on degenerate bases.
        int ei = -1, ej = -1;
        for (int i = 0; i < m && ei < 0; ++i)
            for (int j = 0; j < n; ++j)
                if (!basic[static_cast<std::size_t>(i) * n + j] &&
                    cost(i, j) - u[i] - v[j] < -1e-12) {
                    ei = i;
                    ej = j;
                    break;
                }
        if (ei < 0) break;
        if (++pivots > kMaxPivots)
            throw Error("transportation simplex exceeded the pivot limit");

        // The basis is a spanning tree over row-nodes 0..m-1 and
        // col-nodes m..m+n-1; the unique row(ei) -> col(ej) path plus
        // the entering cell closes the pivot cycle.
        std::vector<std::vector<int>> adj(m + n);
        for (auto [bi, bj] : basis) {
            adj[bi].push_back(m + bj);
            adj[m + bj].push_back(bi);
        }
        const int start = ei, goal = m + ej;
        std::vector<int> prev(m + n, -2);
        prev[start] = -1;
        std::vector<int> stack = {start};
        while (!stack.empty()) {
            const int node = stack.back();
            stack.pop_back();
            if (node == goal) break;
            for (int next : adj[node])
                if (prev[next] == -2) {
                    prev[next] = node;
                    stack.push_back(next);
                }
        }
        if (prev[goal] == -2) throw Error("disconnected transport basis");

        std::vector<int> path; // goal .. start, then reversed
        for (int node = goal; node != -1; node = prev[node]) path.push_back(node);
        std::reverse(path.begin(), path.end());

        std::vector<std::pair<int, int>> cycle = {{ei, ej}};
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            const int n1 = path[k], n2 = path[k + 1];
            cycle.emplace_back(n1 < m ? n1 : n2, n1 < m ? n2 - m : n1 - m);
        }

        // Odd positions lose mass; the tightest of them leaves.
        double theta = std::numeric_limits<double>::infinity();
        std::size_t leave_idx = 0;
        for (std::size_t t = 1; t < cycle.size(); t += 2) {
            const auto [ci, cj] = cycle[t];
            if (x(ci, cj) < theta - 1e-15) {
                theta = x(ci, cj);
                leave_idx = t;
            }
        }

        for (std::size_t t = 0; t < cycle.size(); ++t) {
            const auto [ci, cj] = cycle[t];
            x(ci, cj) += (t % 2 == 0) ? theta : -theta;
        }
        const auto leave = cycle[leave_idx];
        x(leave.first, leave.second) = 0.0;
        basic[static_cast<std::size_t>(leave.first) * n + leave.second] = 0;
        basic[static_cast<std::size_t>(ei) * n + ej] = 1;
        *std::find(basis.begin(), basis.end(), leave) = {ei, ej};
    }

    ExactPlan result;
    result.distance = cost.cwiseProduct(x).sum();
    result.values = std::move(x);
    result.pivots = pivots;
    return result;
}

double gw_reference(const Matrix& cx, const Matrix& cy, const Matrix& plan,
                    GwLoss loss) {
    check_intra_cost(cx, "first intra-graph matrix");
    check_intra_cost(cy, "second intra-graph matrix");
    if (plan.rows() != cx.rows() || plan.cols() != cy.rows())
        throw ValidationError("plan shape does not match the intra-graph matrices");
    const auto m = plan.rows();
    const auto n = plan.cols();
    double total = 0;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i2 = 0; i2 < m; ++i2)
                for (Eigen::Index j2 = 0; j2 < n; ++j2) {
                    const double gap = cx(i, i2) - cy(j, j2);
                    total += plan(i, j) * plan(i2, j2) *
                             (loss == GwLoss::squared ? gap * gap : std::abs(gap));
                }
    return total;
}

} // namespace drs
