#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>

#include "tsr/errors.hpp"

namespace tsr {

/// Ordinary least squares fit with classical (homoskedastic) standard errors.
struct LinearFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd se;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd xtx_inv;
    double ssr = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
};

inline LinearFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const std::size_t n = static_cast<std::size_t>(X.rows());
    const std::size_t k = static_cast<std::size_t>(X.cols());
    if (n <= k) throw InsufficientData("fit_ols: fewer observations than parameters");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < static_cast<Eigen::Index>(k))
        throw SingularRegression("fit_ols: design matrix is rank deficient");

    LinearFit fit;
    fit.n = n;
    fit.k = k;
    fit.coef = qr.solve(y);
    fit.residuals = y - X * fit.coef;
    fit.ssr = fit.residuals.squaredNorm();
    fit.xtx_inv = (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));

    const double sigma2 = fit.ssr / static_cast<double>(n - k);
    fit.se = (sigma2 * fit.xtx_inv.diagonal().array()).sqrt();

    const double ybar = y.mean();
    const double tss = (y.array() - ybar).square().sum();
    fit.r_squared = tss > 0.0 ? 1.0 - fit.ssr / tss : 0.0;
    return fit;
}

}  // namespace tsr
