#pragma once

#include <Eigen/Dense>

namespace ssr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default relative tolerance for rank decisions: a singular value counts
/// as nonzero when it exceeds tol * (largest singular value). The sampled
/// ensembles sit far from this threshold with overwhelming probability.
inline constexpr double default_rank_tol = 1e-10;

/// Orthonormal basis Q of the column space of B (Householder QR).
/// Q has B.cols() columns and Q^T Q = I to ~1e-10 per entry.
/// Throws ParameterError if B is empty, non-finite, or has rows < cols;
/// throws RankDeficiencyError if B is column-rank-deficient at `tol`.
Matrix orthonormal_basis(const Matrix& B, double tol = default_rank_tol);

/// Squared l2 norm of the projection of y onto the orthogonal complement
/// of the column space of B, computed as ||y - Q (Q^T y)||^2 with Q an
/// orthonormal basis. Never forms the projector explicitly. Rounding can
/// produce tiny negative values; the result is clamped to 0.
/// Throws like orthonormal_basis, plus ParameterError on length mismatch.
double residual_norm_sq(const Matrix& B, const Vector& y, double tol = default_rank_tol);

/// Number of singular values strictly greater than tol * (largest singular
/// value). All-zero and empty matrices have rank 0.
Eigen::Index numerical_rank(const Matrix& B, double tol = default_rank_tol);

} // namespace ssr
