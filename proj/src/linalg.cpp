#include "ccmkit/linalg.hpp"

#include "ccmkit/error.hpp"

namespace ccmkit {

LeastSquaresFit least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                              double relative_threshold) {
    if (design.rows() != response.size()) fail(ErrorCode::length_mismatch, "least_squares: row count mismatch");
    if (design.rows() < design.cols()) {
        fail(ErrorCode::insufficient_data, "least_squares: fewer observations than regressors");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.rows(), design.cols());
    qr.setThreshold(relative_threshold);
    qr.compute(design);

    LeastSquaresFit fit;
    fit.rank = qr.rank();
    fit.rank_deficient = fit.rank < design.cols();
    fit.coefficients = qr.solve(response);
    fit.residuals = response - design * fit.coefficients;
    fit.rss = fit.residuals.squaredNorm();
    if (!fit.rank_deficient) {
        const Eigen::Index p = design.cols();
        const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
        const Eigen::MatrixXd r_inv =
            r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
        const Eigen::MatrixXd permuted = r_inv * r_inv.transpose();
        const auto& perm = qr.colsPermutation();
        fit.unscaled_covariance = perm * permuted * perm.transpose();
    }
    return fit;
}

} // namespace ccmkit
