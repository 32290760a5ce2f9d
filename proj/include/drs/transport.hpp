#pragma once

#include <Eigen/Dense>

namespace drs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Tuning for the proximal-point transport solvers.  The defaults are
// pinned by the accuracy gates in the acceptance suite; loosening them
// trades precision for speed.
struct OTConfig {
    double beta = 0.25;     // proximal regularization strength
    int outer_iters = 200;  // proximal steps per transport solve
    int inner_iters = 20;   // scaling sweeps per proximal step
    int gw_outer_iters = 30; // cost-relinearization rounds for the quadratic solver
    double marginal_tol = 1e-4; // feasibility tolerance on returned plans

    void validate() const; // throws ValidationError on nonsense values
};

// A feasible coupling between two discrete distributions.
struct TransportPlan {
    Matrix values;       // m x n, entries >= 0
    Vector row_marginal; // values * 1
    Vector col_marginal; // values^T * 1
};

struct OTResult {
    TransportPlan plan;
    double distance = 0;
};

// First-order transport distance: minimizes <C, plan> over couplings of
// (z_q, z_k) with a proximal-point scheme that converges to the exact
// optimum.  Cost entries must be finite and non-negative; marginals
// must sum to 1.  The result is exactly transpose-symmetric:
// wasserstein(C, p, q) and wasserstein(C^T, q, p) return bitwise equal
// distances and transposed plans.
OTResult wasserstein(const Matrix& cost, const Vector& z_q, const Vector& z_k,
                     const OTConfig& cfg = {});

// Second-order (structural) transport distance between two weighted
// graphs given only their intra-graph distance matrices.  Both matrices
// must be square, symmetric, zero-diagonal, finite and non-negative.
// Solved by alternating cost linearization with a small set of starting
// plans to step around the saddle at the product coupling.
OTResult gromov_wasserstein(const Matrix& cx, const Matrix& cy,
                            const Vector& p, const Vector& q,
                            const OTConfig& cfg = {});

// Exact first-order oracle: transportation simplex (northwest-corner
// start, potentials, first-negative-reduced-cost pivoting).  Intended
// for validation at small sizes; instances above 400 cells are
// rejected.
struct ExactPlan {
    Matrix values;
    double distance = 0;
    int pivots = 0;
};
ExactPlan exact_ot(const Matrix& cost, const Vector& p, const Vector& q);

// Direct evaluation of the quadratic objective
//   sum_{i,j,i',j'} plan[i,j] * plan[i',j'] * loss(cx[i,i'], cy[j,j'])
// for diagnostics and identity tests.
enum class GwLoss { squared, absolute };
double gw_reference(const Matrix& cx, const Matrix& cy, const Matrix& plan,
                    GwLoss loss = GwLoss::squared);

} // namespace drs
