#include "pcs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace pcs {

CVector soft_threshold(const CVector& v, double t) {
    CVector out(v.size());
    for (Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        out(i) = mag > t ? v(i) * ((mag - t) / mag) : Complex{};
    }
    return out;
}

namespace {

// Exact Euclidean projection onto {z : ||A z - y|| <= eta} in the coordinates of
// a thin SVD A = U S V^*. With b = S V^* p - U^* y, the projection is
// p - V diag(mu s / (1 + mu s^2)) b, where mu >= 0 solves ||b / (1 + mu s^2)|| = eta_eff
// and eta_eff^2 = eta^2 - ||(I - U U^*) y||^2 accounts for the part of y outside range(A).
class BallProjector {
public:
    // Factorization through the m x m Gram matrix A A^*: an order of magnitude
    // cheaper than a Jacobi SVD of A at m ~ N, and accurate for the singular
    // values kept (sigma > 1e-7 sigma_max).
    BallProjector(const CMatrix& a, const CVector& y, double eta) {
        const CMatrix gram = a * a.adjoint();
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
        const RVector& ev = eig.eigenvalues();  // ascending
        const Index m = ev.size();
        const double top = m > 0 ? std::max(ev(m - 1), 0.0) : 0.0;
        Index rank = 0;
        while (rank < m && ev(m - 1 - rank) > 1e-14 * top) ++rank;
        const CMatrix u = eig.eigenvectors().rightCols(rank).rowwise().reverse();
        s_ = ev.tail(rank).reverse().cwiseSqrt();
        v_ = a.adjoint() * u * s_.cwiseInverse().cast<Complex>().asDiagonal();
        y_range_ = u.adjoint() * y;
        const double outside = std::max(0.0, y.squaredNorm() - y_range_.squaredNorm());
        const double eta_eff2 = eta * eta - outside;
        infeasible_ = eta_eff2 < -1e-12 * std::max(1.0, y.squaredNorm());
        eta_eff_ = std::sqrt(std::max(0.0, eta_eff2));
        norm_ = std::sqrt(top);
    }

    bool infeasible() const { return infeasible_; }
    double norm() const { return norm_; }

    CVector project(const CVector& p) const {
        if (s_.size() == 0) return p;
        const CVector b = s_.cast<Complex>().cwiseProduct(v_.adjoint() * p) - y_range_;
        const double bnorm = b.norm();
        if (bnorm <= eta_eff_) return p;
        RVector gain(s_.size());
        if (eta_eff_ == 0.0) {
            gain = s_.cwiseInverse();
        } else {
            const double mu = multiplier(b);
            gain = (mu * s_.array() / (1.0 + mu * s_.array().square())).matrix();
        }
        return p - v_ * gain.cast<Complex>().cwiseProduct(b);
    }

private:
    // Newton on 1/||r(mu)|| - 1/eta, which is concave and increasing in mu, so
    // iterates from mu = 0 increase monotonically to the root.
    double multiplier(const CVector& b) const {
        const RVector b2 = b.cwiseAbs2();
        const RVector s2 = s_.array().square().matrix();
        double mu = 0.0;
        for (int it = 0; it < 100; ++it) {
            const RVector denom = (1.0 + mu * s2.array()).matrix();
            const double r2 = (b2.array() / denom.array().square()).sum();
            const double r = std::sqrt(r2);
            const double dr2 = -2.0 * (b2.array() * s2.array() / denom.array().cube()).sum();
            const double psi = 1.0 / r - 1.0 / eta_eff_;
            const double dpsi = -0.5 * dr2 / (r2 * r);
            if (!(dpsi > 0.0)) break;
            const double step = -psi / dpsi;
            mu = std::max(mu + step, 0.5 * mu);
            if (std::abs(step) <= 1e-15 * std::max(mu, 1e-300)) break;
        }
        return mu;
    }

    RVector s_;
    CMatrix v_;
    CVector y_range_;
    double eta_eff_ = 0.0;
    double norm_ = 0.0;
    bool infeasible_ = false;
};

double l1(const CVector& x) { return x.cwiseAbs().sum(); }

double certificate_gap(const CVector& x, const CVector& g) {
    double worst = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        const double mag = std::abs(x(i));
        const double d = mag > 0.0 ? std::abs(g(i) - x(i) / mag) : std::max(0.0, std::abs(g(i)) - 1.0);
        worst = std::max(worst, d);
    }
    return worst;
}

} // namespace

BpResult solve_bp(const MeasurementOperator& op, const CVector& y, const BpConfig& config) {
    if (y.size() != op.rows()) throw DimensionError("solve_bp: y length differs from m");
    if (!(config.eta >= 0.0)) throw ConfigError("solve_bp: eta must be nonnegative");
    if (!(config.tol_rel > 0.0) || !(config.tol_feas > 0.0)) throw ConfigError("solve_bp: tolerances must be positive");
    if (!(config.relaxation > 0.0 && config.relaxation < 2.0))
        throw ConfigError("solve_bp: relaxation must lie in (0, 2)");

    const Index n = op.cols();
    const CMatrix& a = op.matrix();
    const double ynorm = y.norm();
    const double feas_slack = config.tol_feas * std::max(ynorm, std::numeric_limits<double>::min());

    BpResult result;
    if (ynorm <= config.eta) {
        result.x = CVector::Zero(n);
        result.residual = ynorm;
        result.converged = true;
        return result;
    }

    const BallProjector ball(a, y, config.eta);
    result.infeasible = ball.infeasible();

    const CVector aty = op.adjoint_apply(y);
    const double lip = ball.norm() * ball.norm();
    double tau = config.threshold > 0.0 ? config.threshold : 0.1 * aty.cwiseAbs().maxCoeff() / lip;
    if (!(tau > 0.0)) tau = 1.0;

    const double alpha = config.relaxation;
    CVector v = ball.project(CVector::Zero(n));
    CVector u = CVector::Zero(n);
    CVector x = v;
    CVector v_old;
    int it = 0;
    bool done = false;
    for (; it < config.max_iterations && !done; ++it) {
        x = soft_threshold(v - u, tau);
        const CVector relaxed = alpha * x + (1.0 - alpha) * v;
        v_old = v;
        v = ball.project(relaxed + u);
        u += relaxed - v;

        const double scale = std::max({x.norm(), v.norm(), std::numeric_limits<double>::min()});
        const double primal = (x - v).norm();
        const double dual = (v - v_old).norm();
        done = primal <= config.tol_rel * scale && dual <= config.tol_rel * scale;

        // Residual balancing: keep the primal gap and the dual change within a
        // factor of 10. The scaled dual u is rescaled so the multiplier u / tau
        // is unchanged.
        if (!done && it % 10 == 9) {
            if (primal > 10.0 * dual) {
                tau *= 0.5;
                u *= 0.5;
            } else if (dual > 10.0 * primal) {
                tau *= 2.0;
                u *= 2.0;
            }
        }
    }
    result.iterations = it;

    // Prefer the sparse prox iterate when it is feasible; otherwise the
    // projected one, which is feasible by construction.
    const double x_res = (op.apply(x) - y).norm();
    const bool x_feasible = x_res <= config.eta + feas_slack;
    result.x = x_feasible ? x : v;
    result.residual = x_feasible ? x_res : (op.apply(v) - y).norm();
    result.objective = l1(result.x);
    result.certificate_residual = certificate_gap(result.x, -u / tau);
    result.converged = done && !result.infeasible && result.residual <= config.eta + feas_slack;
    return result;
}

double operator_norm_estimate(const MeasurementOperator& op, int iterations, double rel_tol) {
    const Index n = op.cols();
    Rng rng = substream(0x9073, {static_cast<std::uint64_t>(n)});
    std::normal_distribution<double> normal;
    CVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = Complex(normal(rng), normal(rng));
    v.normalize();
    double estimate = 0.0;
    for (int it = 0; it < iterations; ++it) {
        CVector w = op.adjoint_apply(op.apply(v));
        const double next = std::sqrt(w.norm());
        if (w.norm() == 0.0) return 0.0;
        v = w / w.norm();
        const bool settled = std::abs(next - estimate) <= rel_tol * next;
        estimate = next;
        if (settled) break;
    }
    return estimate;
}

BpResult reference_solve(const MeasurementOperator& op, const CVector& y, double eta, long budget) {
    if (y.size() != op.rows()) throw DimensionError("reference_solve: y length differs from m");
    if (!(eta >= 0.0)) throw ConfigError("reference_solve: eta must be nonnegative");
    if (op.cols() > 256) throw ConfigError("reference_solve: desk-scale oracle, N <= 256");
    const Index n = op.cols();
    BpResult result;
    if (y.norm() <= eta) {
        result.x = CVector::Zero(n);
        result.residual = y.norm();
        result.converged = true;
        return result;
    }

    const double lip = operator_norm_estimate(op, 500, 1e-12) * 1.01;
    // Primal iterates live on the scale of x, dual ones on the scale of the
    // sign certificate (entries of A^* w at most 1); balance the steps to that.
    const CVector aty = op.adjoint_apply(y);
    const double gamma = std::max(aty.norm() / (lip * lip), 1e-300) * std::sqrt(static_cast<double>(op.rows()));
    const double tau = gamma / lip;
    const double sigma = 1.0 / (gamma * lip);

    auto project_ball = [&](const CVector& z) -> CVector {
        const CVector d = z - y;
        const double dn = d.norm();
        if (dn <= eta) return z;
        return y + d * (eta / dn);
    };

    CVector x = CVector::Zero(n);
    CVector xbar = x;
    CVector w = CVector::Zero(op.rows());
    long it = 0;
    for (; it < budget; ++it) {
        const CVector q = w + sigma * op.apply(xbar);
        w = q - sigma * project_ball(q / sigma);
        const CVector x_next = soft_threshold(x - tau * op.adjoint_apply(w), tau);
        xbar = 2.0 * x_next - x;
        x = x_next;
    }
    result.x = x;
    result.iterations = static_cast<int>(std::min<long>(it, std::numeric_limits<int>::max()));
    result.objective = l1(x);
    result.residual = (op.apply(x) - y).norm();
    result.certificate_residual = certificate_gap(x, -op.adjoint_apply(w));
    result.converged = result.residual <= eta + 1e-6 * y.norm();
    return result;
}

namespace {

RecoveryError make_error(const CVector& x_hat, const CVector& x, double sigma, Index s, double eta) {
    if (x_hat.size() != x.size()) throw DimensionError("recovery_error: length mismatch");
    RecoveryError out;
    out.l2_error = (x_hat - x).norm();
    out.bound_rhs = sigma + std::sqrt(static_cast<double>(s)) * eta;
    if (out.bound_rhs > 0.0)
        out.ratio = out.l2_error / out.bound_rhs;
    else
        out.ratio = out.l2_error == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return out;
}

} // namespace

RecoveryError recovery_error(const CVector& x_hat, const CVector& x, Index s, double eta) {
    return make_error(x_hat, x, best_s_term_error(x, s), s, eta);
}

RecoveryError recovery_error(const CVector& x_hat, const CVector& x, Index s, double eta, double lambda,
                             const LevelPartition& partition) {
    return make_error(x_hat, x, best_distributed_error(x, s, lambda, partition), s, eta);
}

} // namespace pcs
