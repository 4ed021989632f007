#pragma once

#include <optional>

#include "pcs/common.hpp"
#include "pcs/sampling.hpp"
#include "pcs/signals.hpp"

namespace pcs {

/// Settings for min ||z||_1 subject to ||A z - y||_2 <= eta.
struct BpConfig {
    double eta = 0.0;
    int max_iterations = 20000;
    /// Relative iterate change and primal/dual splitting gap at convergence.
    double tol_rel = 1e-8;
    /// Feasibility slack, relative to ||y||_2.
    double tol_feas = 1e-8;
    /// Initial shrinkage threshold; 0 picks a data-scaled default.
    double threshold = 0.0;
    /// Over-relaxation factor in (0, 2).
    double relaxation = 1.6;
};

struct BpResult {
    CVector x;
    double objective = 0.0;  // ||x||_1
    double residual = 0.0;   // ||A x - y||_2
    int iterations = 0;
    bool converged = false;
    /// eta < dist(y, range(A)): no feasible point exists; x is then the
    /// minimizer over the least-squares set.
    bool infeasible = false;
    /// max_i dist(g_i, d|x_i|) for the dual certificate g recovered from the
    /// splitting; 0 at an exact optimum.
    double certificate_residual = 0.0;
};

/// Basis pursuit (denoising) for complex data. Douglas-Rachford splitting
/// between complex soft-thresholding and the exact projection onto
/// {z : ||A z - y|| <= eta}, computed from an eigendecomposition of A A^*. Returns the best
/// iterate with converged = false when the iteration budget runs out.
BpResult solve_bp(const MeasurementOperator& op, const CVector& y, const BpConfig& config = {});

/// Test oracle: a long-horizon Chambolle-Pock primal-dual iteration that only
/// touches A through apply/adjoint_apply. Independent of solve_bp.
BpResult reference_solve(const MeasurementOperator& op, const CVector& y, double eta, long budget = 200000);

/// Largest singular value of A by power iteration on A^* A.
double operator_norm_estimate(const MeasurementOperator& op, int iterations = 20, double rel_tol = 1e-4);

/// Complex soft-threshold: shrink magnitudes by t, keep phases, exact zero below t.
CVector soft_threshold(const CVector& v, double t);

struct RecoveryError {
    double l2_error = 0.0;
    /// sigma(x)_1 + sqrt(s) * eta, without the unknown absolute constant.
    double bound_rhs = 0.0;
    /// l2_error / bound_rhs; 0 when both vanish, +inf when only the rhs does.
    double ratio = 0.0;
};

/// Observed error against the sparse-model bound sigma_s(x)_1 + sqrt(s) eta.
RecoveryError recovery_error(const CVector& x_hat, const CVector& x, Index s, double eta);

/// Same for the sparse and distributed model, with sigma_{s,lambda,I}(x)_1.
RecoveryError recovery_error(const CVector& x_hat, const CVector& x, Index s, double eta, double lambda,
                             const LevelPartition& partition);

} // namespace pcs
