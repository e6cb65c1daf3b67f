#include "ssr/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

void check_input(const Matrix& B, double tol) {
    if (B.rows() == 0 || B.cols() == 0)
        throw ParameterError("matrix must be nonempty");
    if (tol <= 0.0)
        throw ParameterError("rank tolerance must be positive");
    if (!B.allFinite())
        throw ParameterError("matrix has non-finite entries");
}

} // namespace

Matrix orthonormal_basis(const Matrix& B, double tol) {
    check_input(B, tol);
    if (B.rows() < B.cols())
        throw ParameterError("orthonormal_basis: need rows >= cols");

    Eigen::ColPivHouseholderQR<Matrix> qr(B);
    qr.setThreshold(tol);
    if (qr.rank() < B.cols())
        throw RankDeficiencyError("orthonormal_basis: column-rank-deficient matrix");

    return qr.householderQ() * Matrix::Identity(B.rows(), B.cols());
}

double residual_norm_sq(const Matrix& B, const Vector& y, double tol) {
    if (y.size() != B.rows())
        throw ParameterError("residual_norm_sq: vector length must equal row count");
    if (!y.allFinite())
        throw ParameterError("residual_norm_sq: vector has non-finite entries");

    const Matrix Q = orthonormal_basis(B, tol);
    const Vector r = y - Q * (Q.transpose() * y);
    const double v = r.squaredNorm();
    return v > 0.0 ? v : 0.0;
}

Eigen::Index numerical_rank(const Matrix& B, double tol) {
    check_input(B, tol);
    Eigen::JacobiSVD<Matrix> svd(B);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double cutoff = tol * sv(0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    return rank;
}

} // namespace ssr
