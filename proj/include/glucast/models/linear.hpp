// Linear model solvers. All three center the data so the intercept is never
// penalized; coordinate descent additionally assumes the caller standardized
// the features (the pipeline always does before fitting).
//
// Pinned objectives:
//   ridge        minimize ‖y − Xw − b‖² + alpha·‖w‖²        (closed form)
//   elastic net  minimize (1/2n)·‖y − Xw − b‖²
//                 + alpha·(l1_ratio·‖w‖₁ + (1−l1_ratio)/2·‖w‖²)
//   huber        minimize Σ L_delta(y_i − x_i·w − b)          (IRLS)
// so elastic_net(l1_ratio=0, alpha) equals ridge(n·alpha) coefficient for
// coefficient, which the test suite checks against the closed form.
#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "glucast/core/errors.hpp"

namespace glucast {

struct LinearFit {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    bool converged = true;
    bool singular = false;
    int iterations = 0;
};

namespace detail {

inline void check_design(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() == 0) throw EmptyInputError("cannot fit a linear model on zero samples");
    if (X.rows() != y.size()) {
        throw ShapeError("design has " + std::to_string(X.rows()) + " rows but " +
                         std::to_string(y.size()) + " targets");
    }
}

inline double soft_threshold(double value, double threshold) {
    if (value > threshold) return value - threshold;
    if (value < -threshold) return value + threshold;
    return 0.0;
}

}  // namespace detail

/// Ridge regression by the normal equations, or the least-norm least-squares
/// solution when alpha is zero (flagged singular if the design is
/// rank-deficient). alpha = 0 with a full-rank design is plain OLS.
inline LinearFit solve_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha,
                             bool fit_intercept = true) {
    detail::check_design(X, y);
    if (!(alpha >= 0.0)) throw InvalidValueError("ridge alpha must be non-negative");
    const Eigen::Index p = X.cols();
    Eigen::RowVectorXd xmean = Eigen::RowVectorXd::Zero(p);
    double ymean = 0.0;
    if (fit_intercept) {
        xmean = X.colwise().mean();
        ymean = y.mean();
    }
    const Eigen::MatrixXd Xc = X.rowwise() - xmean;
    const Eigen::VectorXd yc = y.array() - ymean;

    LinearFit fit;
    if (alpha > 0.0) {
        Eigen::MatrixXd gram = Xc.transpose() * Xc;
        gram.diagonal().array() += alpha;
        fit.weights = gram.ldlt().solve(Xc.transpose() * yc);
    } else {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Xc);
        fit.weights = cod.solve(yc);
        fit.singular = cod.rank() < p;
    }
    fit.intercept = fit_intercept ? ymean - xmean.dot(fit.weights) : 0.0;
    return fit;
}

/// Cyclic coordinate descent for the elastic net (lasso when l1_ratio = 1).
/// Converged means the largest coefficient update in a full sweep fell below
/// tol; hitting max_sweeps instead clears the flag but still returns the fit.
inline LinearFit solve_elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   double alpha, double l1_ratio, double tol = 1e-6,
                                   int max_sweeps = 10000) {
    detail::check_design(X, y);
    if (!(alpha >= 0.0)) throw InvalidValueError("elastic net alpha must be non-negative");
    if (!(l1_ratio >= 0.0 && l1_ratio <= 1.0)) {
        throw InvalidValueError("l1_ratio must lie in [0, 1]");
    }
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    const Eigen::RowVectorXd xmean = X.colwise().mean();
    const double ymean = y.mean();
    const Eigen::MatrixXd Xc = X.rowwise() - xmean;
    const Eigen::VectorXd yc = y.array() - ymean;

    // (1/n)·‖Xc_j‖², the curvature of the smooth part along coordinate j
    Eigen::VectorXd col_sq(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        col_sq(j) = Xc.col(j).squaredNorm() / static_cast<double>(n);
    }
    const double l1_penalty = alpha * l1_ratio;
    const double l2_penalty = alpha * (1.0 - l1_ratio);

    LinearFit fit;
    fit.weights = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd residual = yc;
    fit.converged = false;
    int sweep = 0;
    while (sweep < max_sweeps) {
        ++sweep;
        double max_delta = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double denom = col_sq(j) + l2_penalty;
            double updated = 0.0;
            if (denom > 0.0) {
                const double rho =
                    Xc.col(j).dot(residual) / static_cast<double>(n) + col_sq(j) * fit.weights(j);
                updated = detail::soft_threshold(rho, l1_penalty) / denom;
            }
            const double delta = updated - fit.weights(j);
            if (delta != 0.0) {
                residual -= Xc.col(j) * delta;
                fit.weights(j) = updated;
            }
            max_delta = std::max(max_delta, std::abs(delta));
        }
        if (max_delta < tol) {
            fit.converged = true;
            break;
        }
    }
    fit.iterations = sweep;
    fit.intercept = ymean - xmean.dot(fit.weights);
    return fit;
}

/// Huber regression by iteratively reweighted least squares. Rows with
/// residuals inside ±delta keep full weight, rows outside are downweighted by
/// delta/|residual|, so delta → ∞ recovers OLS.
inline LinearFit solve_huber(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double delta,
                             double tol = 1e-6, int max_iterations = 1000) {
    detail::check_design(X, y);
    if (!(delta > 0.0)) throw InvalidValueError("huber delta must be positive");
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    Eigen::MatrixXd aug(n, p + 1);
    aug.leftCols(p) = X;
    aug.col(p).setOnes();

    Eigen::VectorXd beta =
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(aug).solve(y);
    LinearFit fit;
    fit.converged = false;
    int iteration = 0;
    while (iteration < max_iterations) {
        ++iteration;
        const Eigen::VectorXd residual = y - aug * beta;
        Eigen::VectorXd root_weight(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double r = std::abs(residual(i));
            root_weight(i) = r <= delta ? 1.0 : std::sqrt(delta / r);
        }
        const Eigen::MatrixXd weighted_aug = root_weight.asDiagonal() * aug;
        const Eigen::VectorXd weighted_y = root_weight.asDiagonal() * y;
        const Eigen::VectorXd next =
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(weighted_aug)
                .solve(weighted_y);
        const double max_delta = (next - beta).cwiseAbs().maxCoeff();
        beta = next;
        if (max_delta < tol) {
            fit.converged = true;
            break;
        }
    }
    fit.iterations = iteration;
    fit.weights = beta.head(p);
    fit.intercept = beta(p);
    return fit;
}

}  // namespace glucast
