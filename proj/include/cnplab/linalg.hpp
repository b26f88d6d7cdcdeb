#pragma once

#include <Eigen/Dense>
#include <complex>

namespace cnp {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Relative threshold for numerical range / kernel decisions.
inline constexpr double kRankTol = 1e-10;

/// (A + A*) / 2.
Matrix hermitian_part(const Matrix& a);

/// Eigen-decomposition of the Hermitian part of a, ascending eigenvalues.
/// Each eigenvector is rotated so its largest entry is real and positive,
/// which makes reported bases reproducible.
struct HermitianEigen {
  Eigen::VectorXd values;
  Matrix vectors;
};
HermitianEigen hermitian_eigen(const Matrix& a);

/// Largest singular value; 0 for empty matrices.
double spectral_norm(const Matrix& a);

/// Smallest eigenvalue of the Hermitian part; +inf for empty matrices.
double min_eigenvalue(const Matrix& a);

/// Positive square root of a Hermitian matrix after clipping eigenvalues
/// below zero. range_basis holds the eigenvectors whose eigenvalue exceeds
/// rank_tol times the largest eigenvalue.
struct PsdRoot {
  Matrix root;
  Matrix range_basis;
  double min_eigenvalue = 0.0;
  bool clipped = false;  ///< some eigenvalue was below -neg_tol
};
PsdRoot psd_sqrt(const Matrix& a, double neg_tol, double rank_tol = kRankTol);

/// a (x) I_r, acting on block-major coordinates (block index outer).
Matrix kron_identity(const Matrix& a, Index r);

/// Orthonormal basis of the orthogonal complement of the column span of a,
/// plus the singular values used for the rank decision.
struct Complement {
  Matrix basis;
  Eigen::VectorXd singular_values;
  Index rank = 0;
  bool ambiguous = false;  ///< a singular value within 10x of the threshold
};
Complement range_complement(const Matrix& a, double rank_tol = kRankTol);

}  // namespace cnp
