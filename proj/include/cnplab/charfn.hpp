#pragma once

#include <memory>
#include <span>
#include <vector>

#include "cnplab/coeffs.hpp"
#include "cnplab/linalg.hpp"
#include "cnplab/model.hpp"
#include "cnplab/tuples.hpp"

namespace cnp {

/// z^alpha.
Complex monomial(std::span<const Complex> z, const MultiIndex& alpha);

/// s_w(T) = sum_{|alpha|<=N} a_alpha conj(w^alpha) T^alpha.
struct SCalculus {
  Matrix value;
  double tail_norm = 0.0;
  /// ||(I - sum_{alpha != 0} b_alpha conj(w^alpha) T^alpha) s_w(T) - I||
  double inverse_residual = 0.0;
  bool converged = true;
};

SCalculus s_calculus(const OperatorTuple& t, const CoeffTable& table,
                     std::span<const Complex> w, const TruncationParams& p);
SCalculus s_calculus(const PowerTable& powers, const CoeffTable& table,
                     std::span<const Complex> w, const TruncationParams& p);

/// The column lift T~ = [sqrt(b_alpha) T^alpha] over the multi-indices with
/// b_alpha > 0, and the defect D of T~ on the truncated direct sum.
/// Block k of the direct sum belongs to active[k].
struct TupleLift {
  std::size_t h = 0;
  std::size_t d = 0;
  int N = 0;
  std::vector<MultiIndex> active;
  std::vector<double> sqrt_b;
  Matrix t_tilde;        ///< h x (h * active.size())
  Matrix d_tilde;        ///< positive root of I - T~* T~
  Matrix d_tilde_basis;  ///< orthonormal basis of Ran D
  DefectData defect;
  std::shared_ptr<const PowerTable> powers;
  double gram_residual = 0.0;          ///< ||T~ T~* - (I - delta^2)||
  double intertwining_residual = 0.0;  ///< ||T~ D - delta T~||
};

/// Throws NotCnp when some b_n < -1e-12 and PreconditionError when T is not
/// a 1/k-contraction.
TupleLift build_lift(const OperatorTuple& t, const CoeffTable& table, const TruncationParams& p);

/// sum_{1<=|alpha|<=N} b_alpha |z^alpha|^2, the squared norm of Z(z).
double z_norm_sq(const CoeffTable& table, std::span<const Complex> z, int N);

struct CharFnEval {
  std::vector<Complex> z;
  Matrix theta;    ///< Ran D coordinates -> Ran delta coordinates
  Matrix ambient;  ///< the same map on C^{h m} -> C^h, independent of bases
  double norm = 0.0;
  double inverse_residual = 0.0;  ///< ||(I - Z T~*) s_z(T)* - I||
  double z_norm_sq = 0.0;
};

/// Throws DomainError outside the ball and NotConverged when the inverse
/// residual exceeds p.tol.
CharFnEval theta_eval(const TupleLift& lift, const CoeffTable& table, std::span<const Complex> z,
                      const TruncationParams& p);

/// ||(I - theta(z) theta(w)*) - delta s_z(T)* s_w(T) delta / s(z, w)|| on
/// Ran delta.
double verify_identity_I1(const TupleLift& lift, const CoeffTable& table,
                          std::span<const Complex> z, std::span<const Complex> w,
                          const TruncationParams& p);

struct MultiplierReport {
  double gram_min_eigenvalue = 0.0;
  double vv_identity_residual = 0.0;
  double v_star_residual = 0.0;  ///< max ||V*(s_w (x) I) - s_w(T) delta||
};

MultiplierReport verify_multiplier(const TupleLift& lift, const CoeffTable& table,
                                   const std::vector<std::vector<Complex>>& points,
                                   const TruncationParams& p);

/// Taylor coefficients theta_gamma, |gamma| <= L, in GradedBasis(d, L)
/// order. They are recovered from samples of theta on a torus grid; since
/// the truncated theta is a polynomial of degree <= 2N the grid transform
/// is exact. fit_residual compares the expansion against direct
/// evaluation at a few off-grid points.
std::vector<Matrix> theta_taylor(const TupleLift& lift, const CoeffTable& table, int L,
                                 double* fit_residual = nullptr);

struct ModelReport {
  double intertwining_residual = 0.0;  ///< max_i ||V*(M_i (x) I)V - T_i||
  double projection_residual = 0.0;    ///< ||(I - VV*) - M_theta M_theta*||
  double taylor_fit_residual = 0.0;
};

/// Requires a pure T and a kernel whose b-coefficients are non-negative
/// through N.
ModelReport verify_model(const TupleLift& lift, const CoeffTable& table,
                         const TruncationParams& p);

}  // namespace cnp
