#pragma once

#include <cstddef>
#include <vector>

#include "cnplab/coeffs.hpp"
#include "cnplab/linalg.hpp"
#include "cnplab/multi_index.hpp"
#include "cnplab/tuples.hpp"

namespace cnp {

/// Matrix of V_T : C^h -> (truncated H_k) (x) Ran(delta). Rows are
/// block-major: row basis_index * rank + j.
struct DilationMap {
  Matrix matrix;
  GradedBasis basis;
  int N = 0;
  std::size_t domain_dim = 0;
  std::size_t rank = 0;
  Matrix delta;
  Matrix ran_delta_basis;
  double isometry_defect = 0.0;
  /// delta has rank zero; matrix is 0 x h and no isometry exists.
  bool degenerate = false;
};

DilationMap build_V(const OperatorTuple& t, const CoeffTable& table, const TruncationParams& p);
DilationMap build_V(const PowerTable& powers, const DefectData& def, const CoeffTable& table,
                    const TruncationParams& p);

/// (M^alpha (x) I_r) in the truncated basis, block-major.
Matrix lifted_shift_power(const ShiftTuple& shifts, const MultiIndex& alpha, std::size_t r);

/// max over alpha of ||V*(M^alpha (x) I) - T^alpha V*|| on the columns of
/// degree <= N - |alpha|. Throws BasisMismatch when the shifts were built on
/// another basis.
double check_intertwining(const DilationMap& v, const OperatorTuple& t, const ShiftTuple& shifts,
                          const std::vector<MultiIndex>& polys);

enum class FactorVerdict { Factorable, NotFactorable, Inconclusive };

struct FactorabilityReport {
  std::vector<double> cond1;  ///< min eigenvalue of c_i X - T_i X T_i*
  double cond2_min_eigenvalue = 0.0;
  double cond2_tail_norm = 0.0;
  double cond3_residual = 0.0;
  double cond3_tail_norm = 0.0;
  FactorVerdict verdict = FactorVerdict::Inconclusive;
  int failed_condition = 0;  ///< 1..3 when not factorable
};

/// Conditions (1)-(3) of the factorability criterion at truncation p.N,
/// with c the per-coordinate shift norms. X must be Hermitian.
FactorabilityReport check_factorability(const Matrix& x, const OperatorTuple& t,
                                        const CoeffTable& table, const TruncationParams& p,
                                        const std::vector<double>& c);

/// Restriction of the lifted shifts to Ker V*. kernel_basis holds
/// orthonormal columns; invariance_residual is ||(I - KK*)(M_i (x) I)K||.
struct AssociatedTuple {
  Matrix kernel_basis;
  OperatorTuple tuple;
  double invariance_residual = 0.0;
  Eigen::VectorXd singular_values;
};

/// Throws DegenerateDilation for a degenerate map, PreconditionError when
/// the isometry defect exceeds tol, AmbiguousRank when the kernel rank is
/// not clear-cut.
AssociatedTuple associated_tuple(const DilationMap& v, const ShiftTuple& shifts, double tol);

/// Powers K*(M^alpha (x) I)K, |alpha| <= N, as an exactly terminating table.
PowerTable associated_powers(const AssociatedTuple& assoc, const ShiftTuple& shifts,
                             std::size_t r);

enum class ExistenceVerdict { Admits, DoesNotAdmit, Inconclusive };

struct ExistenceResult {
  ExistenceVerdict verdict = ExistenceVerdict::Inconclusive;
  Vector witness;  ///< in the model space coordinates, unit norm
  double value = 0.0;  ///< quadratic form at the witness (min eigenvalue)
  double invariance_residual = 0.0;
  std::size_t kernel_dim = 0;
};

/// Decides whether the associated tuple is a 1/k-contraction. Requires a
/// pure T (PreconditionError otherwise).
ExistenceResult admits_charfn(const OperatorTuple& t, const CoeffTable& table,
                              const TruncationParams& p);

struct CounterexampleRow {
  int m = 0;
  int N = 0;
  std::size_t d = 1;
  double ratio = 0.0;  ///< m (N+2) / (m+N+1)
  double closed_form = 0.0;
  double numeric = 0.0;
  double match_error = 0.0;
};

/// The compressed shift on polynomials of degree <= N under bergman(m),
/// and its associated-tuple quadratic form at e((N+2, 0, ..., 0)).
CounterexampleRow bergman_counterexample(int m, int N, std::size_t d, const TruncationParams& p);

struct ProbeValue {
  int n = 0;
  double ratio = 0.0;
};

/// For the zero tuple on C (d = 1), the associated-tuple quadratic form at
/// e(n) for n = 2..N, computed from operators rather than coefficients.
std::vector<ProbeValue> cnp_zero_tuple_probe(const CoeffTable& table, int N);

const char* to_string(FactorVerdict v);
const char* to_string(ExistenceVerdict v);

}  // namespace cnp
