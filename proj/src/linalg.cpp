#include "cnplab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cnp {

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

HermitianEigen hermitian_eigen(const Matrix& a) {
  HermitianEigen out;
  if (a.rows() == 0) {
    out.values.resize(0);
    out.vectors.resize(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a));
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  for (Index c = 0; c < out.vectors.cols(); ++c) {
    Index arg = 0;
    out.vectors.col(c).cwiseAbs().maxCoeff(&arg);
    const std::complex<double> v = out.vectors(arg, c);
    if (std::abs(v) > 0.0) out.vectors.col(c) *= std::conj(v) / std::abs(v);
  }
  return out;
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  // Largest eigenvalue of the smaller Gram matrix; avoids BDCSVD, whose
  // deflation step reads out of bounds on some rank-deficient inputs (Eigen 3.4).
  const Matrix g = a.rows() <= a.cols() ? Matrix(a * a.adjoint()) : Matrix(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(es.eigenvalues().size() - 1)));
}

double min_eigenvalue(const Matrix& a) {
  if (a.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

PsdRoot psd_sqrt(const Matrix& a, double neg_tol, double rank_tol) {
  PsdRoot out;
  const Index n = a.rows();
  if (n == 0) {
    out.root.resize(0, 0);
    out.range_basis.resize(0, 0);
    out.min_eigenvalue = std::numeric_limits<double>::infinity();
    return out;
  }
  const HermitianEigen he = hermitian_eigen(a);
  out.min_eigenvalue = he.values(0);
  out.clipped = out.min_eigenvalue < -neg_tol;

  Eigen::VectorXd clipped = he.values.cwiseMax(0.0);
  const double top = clipped.maxCoeff();
  out.root = he.vectors * clipped.cwiseSqrt().asDiagonal() * he.vectors.adjoint();

  std::vector<Index> keep;
  // Descending order so the dominant directions come first.
  for (Index k = n - 1; k >= 0; --k)
    if (top > 0.0 && clipped(k) > rank_tol * top) keep.push_back(k);
  out.range_basis.resize(n, static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    out.range_basis.col(static_cast<Index>(c)) = he.vectors.col(keep[c]);
  return out;
}

Matrix kron_identity(const Matrix& a, Index r) {
  Matrix out = Matrix::Zero(a.rows() * r, a.cols() * r);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) {
      const auto v = a(i, j);
      if (v == std::complex<double>(0.0, 0.0)) continue;
      for (Index k = 0; k < r; ++k) out(i * r + k, j * r + k) = v;
    }
  return out;
}

Complement range_complement(const Matrix& a, double rank_tol) {
  Complement out;
  const Index m = a.rows();
  if (a.cols() == 0) {
    out.basis = Matrix::Identity(m, m);
    out.singular_values.resize(0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU);
  out.singular_values = svd.singularValues();
  const double top = out.singular_values.size() ? out.singular_values(0) : 0.0;
  const double threshold = rank_tol * top;
  for (Index k = 0; k < out.singular_values.size(); ++k) {
    const double s = out.singular_values(k);
    if (top > 0.0 && s > threshold) ++out.rank;
    if (top > 0.0 && s > threshold / 10.0 && s < threshold * 10.0) out.ambiguous = true;
  }
  out.basis = svd.matrixU().rightCols(m - out.rank);
  return out;
}

}  // namespace cnp
