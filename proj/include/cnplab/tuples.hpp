#pragma once

#include <cstddef>
#include <vector>

#include "cnplab/coeffs.hpp"
#include "cnplab/linalg.hpp"
#include "cnplab/multi_index.hpp"

namespace cnp {

/// d complex h x h matrices, intended to commute pairwise.
class OperatorTuple {
 public:
  OperatorTuple() = default;
  explicit OperatorTuple(std::vector<Matrix> mats);

  static OperatorTuple zero(std::size_t d, std::size_t h);

  std::size_t d() const { return mats_.size(); }
  std::size_t h() const { return h_; }
  const Matrix& operator[](std::size_t i) const { return mats_[i]; }
  const std::vector<Matrix>& matrices() const { return mats_; }

  /// (U* T_1 U, ..., U* T_d U).
  OperatorTuple conjugated(const Matrix& u) const;

 private:
  std::vector<Matrix> mats_;
  std::size_t h_ = 0;
};

/// max over i < j of ||T_i T_j - T_j T_i|| / max(1, ||T_i|| ||T_j||).
double commutator_residual(const OperatorTuple& t);

/// Throws PreconditionError when the relative commutator exceeds tol.
void require_commuting(const OperatorTuple& t, double tol = 1e-12);

struct TruncationParams {
  int N = 40;
  double tol = 1e-9;
  int tail_window = 5;

  /// Throws PreconditionError unless N >= 1, tol > 0 and tail_window >= 1.
  void validate() const;
};

/// T^alpha = T_1^{alpha_1} ... T_d^{alpha_d}; identity when alpha = 0 or
/// alpha has a negative entry.
Matrix tuple_power(const OperatorTuple& t, const MultiIndex& alpha);

/// All powers T^alpha, |alpha| <= N, in graded order. Computation stops at
/// the first degree whose powers are all exactly zero; higher powers are
/// then known to vanish and the table "terminates".
class PowerTable {
 public:
  PowerTable(const OperatorTuple& t, int max_degree);
  /// Wraps externally computed powers (one per basis index up to
  /// last_nonzero_degree).
  PowerTable(GradedBasis basis, std::vector<Matrix> powers, std::size_t h, bool terminates);

  const GradedBasis& basis() const { return basis_; }
  std::size_t h() const { return h_; }
  int max_degree() const { return basis_.max_degree(); }
  int last_nonzero_degree() const { return last_nonzero_; }
  /// True when every power of degree max_degree + 1 is exactly zero, so
  /// truncated series over this table are exact.
  bool terminates() const { return terminates_; }

  const Matrix& power(std::size_t k) const;
  const Matrix& power(const MultiIndex& alpha) const;

 private:
  GradedBasis basis_;
  std::vector<Matrix> powers_;
  Matrix zero_;
  std::size_t h_ = 0;
  int last_nonzero_ = 0;
  bool terminates_ = false;
};

/// sum_{from <= |alpha| <= N} c_alpha T^alpha X (T^alpha)^*, with c from
/// the a- or b-sequence and X = I when x is null. increments[n] is the
/// Frobenius norm of the degree-n contribution.
struct SeriesSum {
  Matrix sum;
  std::vector<double> increments;
};
SeriesSum conjugation_series(const PowerTable& powers, const CoeffTable& table, Which which,
                             const Matrix* x, int from_degree, int N);

/// Largest of the last `window` increments, or 0 when the power table
/// terminates (the series is then exactly finite).
double tail_norm(const std::vector<double>& increments, int window, bool terminates);

struct DefectData {
  Matrix delta_sq;         ///< I - sum_{1<=|alpha|<=N} b_alpha T^alpha T^alpha*
  Matrix delta;            ///< positive square root (eigenvalue-clipped)
  Matrix ran_delta_basis;  ///< orthonormal columns spanning Ran delta
  double tail_norm = 0.0;
  double min_eigenvalue = 0.0;
  bool positive = true;  ///< false when min eigenvalue < -tol
};

DefectData defect(const OperatorTuple& t, const CoeffTable& table, const TruncationParams& p);
DefectData defect(const PowerTable& powers, const CoeffTable& table, const TruncationParams& p);

enum class ContractionVerdict { Yes, No, Inconclusive };

struct ContractionResult {
  ContractionVerdict verdict = ContractionVerdict::Inconclusive;
  double min_eigenvalue = 0.0;
  double tail_norm = 0.0;
  Vector witness;  ///< eigenvector of the smallest eigenvalue of delta_sq
};

ContractionResult is_contraction(const OperatorTuple& t, const CoeffTable& table,
                                 const TruncationParams& p);
ContractionResult is_contraction(const PowerTable& powers, const CoeffTable& table,
                                 const TruncationParams& p);

enum class PurityVerdict { Pure, NotPure, Inconclusive };

struct PurityResult {
  PurityVerdict verdict = PurityVerdict::Inconclusive;
  double residual = 0.0;  ///< ||R_N - I||
  double tail_norm = 0.0;
  std::vector<double> increments;
};

/// R_N = sum_{|alpha|<=N} a_alpha T^alpha delta^2 T^alpha*. Throws
/// PreconditionError when T is not a 1/k-contraction at degree N.
PurityResult is_pure(const OperatorTuple& t, const CoeffTable& table, const TruncationParams& p);
PurityResult is_pure(const PowerTable& powers, const DefectData& def, const CoeffTable& table,
                     const TruncationParams& p);

/// Compressions of M_{z_i} to span{e(alpha) : |alpha| <= N}, e(alpha) =
/// sqrt(a_alpha) z^alpha, together with the basis ordering used.
struct ShiftTuple {
  GradedBasis basis;
  OperatorTuple tuple;
};
ShiftTuple shift_matrices(const CoeffTable& table, int N, std::size_t d);
ShiftTuple shift_matrices(const CoeffTable& table, int N);

struct ShiftNorm {
  double value = 0.0;
  int argmax_degree = 0;
  /// The ratio is still increasing at degree N, so value only bounds the
  /// untruncated ||M_{z_i}||^2 from below.
  bool lower_bound = false;
};

/// max over |alpha| <= N of a_alpha / a_{alpha + e_i}.
ShiftNorm shift_norm_sq(const CoeffTable& table, std::size_t i, int N, std::size_t d);

const char* to_string(ContractionVerdict v);
const char* to_string(PurityVerdict v);

}  // namespace cnp
