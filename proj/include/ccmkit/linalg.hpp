#pragma once

#include <Eigen/Dense>

namespace ccmkit {

struct LeastSquaresFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    double rss = 0.0;
    Eigen::Index rank = 0;
    bool rank_deficient = false;
    /// (X'X)^{-1}, only filled when the design has full column rank.
    Eigen::MatrixXd unscaled_covariance;
};

/// Ordinary least squares through a column-pivoted Householder QR; never
/// forms the normal equations. A column counts as dependent when its pivot
/// falls below `relative_threshold` times the largest pivot.
LeastSquaresFit least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                              double relative_threshold = 1e-10);

} // namespace ccmkit
