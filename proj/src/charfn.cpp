#include "cnplab/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cnplab/error.hpp"

namespace cnp {

Complex monomial(std::span<const Complex> z, const MultiIndex& alpha) {
  Complex out{1.0, 0.0};
  for (std::size_t i = 0; i < alpha.dim(); ++i)
    for (int k = 0; k < alpha[i]; ++k) out *= z[i];
  return out;
}

namespace {

void require_point(std::span<const Complex> z, std::size_t d, const char* what) {
  if (z.size() != d) throw DomainError(std::string(what) + ": point has the wrong dimension");
  if (std::real(inner(z, z)) >= 1.0)
    throw DomainError(std::string(what) + ": point outside the open unit ball");
}

// sum_{|alpha|<=N} a_alpha z^alpha (T^alpha)* = s_z(T)*.
Matrix s_star(const PowerTable& powers, const CoeffTable& table, std::span<const Complex> z,
              int N) {
  const auto h = static_cast<Index>(powers.h());
  Matrix out = Matrix::Zero(h, h);
  const GradedBasis& basis = powers.basis();
  const int top = std::min(N, powers.last_nonzero_degree());
  for (std::size_t k = 0; k < basis.degree_end(top); ++k) {
    const MultiIndex& alpha = basis.at(k);
    out.noalias() += (table.a_multi(alpha) * monomial(z, alpha)) * powers.power(k).adjoint();
  }
  return out;
}

struct ThetaParts {
  Matrix full;  // h x hm, before restriction to Ran D
  Matrix s_star;
  double inverse_residual = 0.0;
};

ThetaParts theta_parts(const TupleLift& lift, const CoeffTable& table,
                       std::span<const Complex> z) {
  const auto h = static_cast<Index>(lift.h);
  ThetaParts out;
  out.s_star = s_star(*lift.powers, table, z, lift.N);

  Matrix zt = Matrix::Zero(h, h);
  Matrix zd = Matrix::Zero(h, lift.d_tilde.cols());
  for (std::size_t k = 0; k < lift.active.size(); ++k) {
    const Complex zk = monomial(z, lift.active[k]);
    const Index row = static_cast<Index>(k) * h;
    zt.noalias() += (lift.sqrt_b[k] * zk) * lift.t_tilde.middleCols(row, h).adjoint();
    zd.noalias() += (lift.sqrt_b[k] * zk) * lift.d_tilde.middleRows(row, h);
  }
  out.inverse_residual =
      spectral_norm((Matrix::Identity(h, h) - zt) * out.s_star - Matrix::Identity(h, h));
  out.full = -lift.t_tilde + lift.defect.delta * out.s_star * zd;
  return out;
}

// The scalar kernel uses every cached coefficient, independent of the
// operator truncation degree.
Complex kernel_value(const CoeffTable& table, std::span<const Complex> z,
                     std::span<const Complex> w) {
  return kernel_eval(table, z, w, table.max_degree()).value;
}

Matrix theta_coords(const TupleLift& lift, const Matrix& full) {
  return lift.defect.ran_delta_basis.adjoint() * full * lift.d_tilde_basis;
}

}  // namespace

SCalculus s_calculus(const PowerTable& powers, const CoeffTable& table,
                     std::span<const Complex> w, const TruncationParams& p) {
  p.validate();
  require_point(w, powers.basis().dim(), "s_calculus");
  if (p.N > powers.max_degree())
    throw InsufficientCache("s_calculus: power table shorter than the truncation degree");

  const auto h = static_cast<Index>(powers.h());
  const GradedBasis& basis = powers.basis();
  SCalculus out;
  out.value = Matrix::Zero(h, h);
  Matrix inv = Matrix::Identity(h, h);
  std::vector<double> increments(static_cast<std::size_t>(p.N) + 1, 0.0);
  const int top = std::min(p.N, powers.last_nonzero_degree());
  for (int n = 0; n <= top; ++n) {
    Matrix level = Matrix::Zero(h, h);
    for (std::size_t k = basis.degree_begin(n); k < basis.degree_end(n); ++k) {
      const MultiIndex& alpha = basis.at(k);
      const Complex wc = std::conj(monomial(w, alpha));
      level.noalias() += (table.a_multi(alpha) * wc) * powers.power(k);
      if (n > 0) inv.noalias() -= (table.b_multi(alpha) * wc) * powers.power(k);
    }
    increments[n] = level.norm();
    out.value += level;
  }
  out.tail_norm = tail_norm(increments, p.tail_window, powers.terminates());
  out.inverse_residual = spectral_norm(inv * out.value - Matrix::Identity(h, h));
  out.converged = out.tail_norm <= p.tol;
  return out;
}

SCalculus s_calculus(const OperatorTuple& t, const CoeffTable& table,
                     std::span<const Complex> w, const TruncationParams& p) {
  p.validate();
  return s_calculus(PowerTable(t, p.N), table, w, p);
}

TupleLift build_lift(const OperatorTuple& t, const CoeffTable& table, const TruncationParams& p) {
  p.validate();
  for (int n = 1; n <= p.N; ++n)
    if (table.b(n) < -kCnpTolZero)
      throw NotCnp("build_lift: b_" + std::to_string(n) + " = " + std::to_string(table.b(n)) +
                   " is negative; the lift needs real square roots");

  TupleLift lift;
  lift.h = t.h();
  lift.d = t.d();
  lift.N = p.N;
  auto powers = std::make_shared<PowerTable>(t, p.N);
  lift.defect = defect(*powers, table, p);
  if (!lift.defect.positive)
    throw PreconditionError("build_lift: tuple is not a 1/k-contraction (min eigenvalue " +
                            std::to_string(lift.defect.min_eigenvalue) + ")");

  const GradedBasis& basis = powers->basis();
  for (std::size_t k = basis.degree_begin(1); k < basis.size(); ++k) {
    const MultiIndex& alpha = basis.at(k);
    if (table.b(alpha.degree()) <= kCnpTolZero) continue;
    lift.active.push_back(alpha);
    lift.sqrt_b.push_back(std::sqrt(table.b_multi(alpha)));
  }

  const auto h = static_cast<Index>(lift.h);
  const auto m = static_cast<Index>(lift.active.size());
  lift.t_tilde = Matrix::Zero(h, h * m);
  for (Index k = 0; k < m; ++k)
    lift.t_tilde.middleCols(k * h, h) = lift.sqrt_b[k] * powers->power(lift.active[k]);

  const Matrix c = Matrix::Identity(h * m, h * m) - lift.t_tilde.adjoint() * lift.t_tilde;
  const PsdRoot root = psd_sqrt(c, p.tol);
  lift.d_tilde = root.root;
  lift.d_tilde_basis = root.range_basis;

  const Matrix& delta = lift.defect.delta;
  lift.gram_residual = spectral_norm(lift.t_tilde * lift.t_tilde.adjoint() -
                                     (Matrix::Identity(h, h) - lift.defect.delta_sq));
  lift.intertwining_residual =
      spectral_norm(lift.t_tilde * lift.d_tilde - delta * lift.t_tilde);
  lift.powers = std::move(powers);
  return lift;
}

double z_norm_sq(const CoeffTable& table, std::span<const Complex> z, int N) {
  // sum over |alpha| = n of multinomial(alpha) |z^alpha|^2 is |z|^(2n).
  const double r = std::real(inner(z, z));
  double s = 0.0;
  double power = 1.0;
  for (int n = 1; n <= N; ++n) {
    power *= r;
    s += table.b(n) * power;
  }
  return s;
}

CharFnEval theta_eval(const TupleLift& lift, const CoeffTable& table, std::span<const Complex> z,
                      const TruncationParams& p) {
  require_point(z, lift.d, "theta_eval");
  CharFnEval ev;
  ev.z.assign(z.begin(), z.end());
  ev.z_norm_sq = z_norm_sq(table, z, lift.N);
  if (ev.z_norm_sq >= 1.0)
    throw DomainError("theta_eval: Z(z) is not a strict contraction at this truncation");

  const ThetaParts parts = theta_parts(lift, table, z);
  ev.inverse_residual = parts.inverse_residual;
  if (ev.inverse_residual > p.tol)
    throw NotConverged("theta_eval: inverse residual " + std::to_string(ev.inverse_residual) +
                       " exceeds tolerance; increase N");
  ev.theta = theta_coords(lift, parts.full);
  ev.ambient = parts.full * lift.d_tilde_basis * lift.d_tilde_basis.adjoint();
  ev.norm = spectral_norm(ev.theta);
  return ev;
}

double verify_identity_I1(const TupleLift& lift, const CoeffTable& table,
                          std::span<const Complex> z, std::span<const Complex> w,
                          const TruncationParams& p) {
  const CharFnEval tz = theta_eval(lift, table, z, p);
  const CharFnEval tw = theta_eval(lift, table, w, p);
  const Matrix& q = lift.defect.ran_delta_basis;
  const Matrix& delta = lift.defect.delta;
  const Matrix sz_star = s_star(*lift.powers, table, z, lift.N);
  const Matrix sw = s_star(*lift.powers, table, w, lift.N).adjoint();
  const Complex s = kernel_value(table, z, w);

  const auto r = q.cols();
  const Matrix lhs = Matrix::Identity(r, r) - tz.theta * tw.theta.adjoint();
  const Matrix rhs = q.adjoint() * delta * sz_star * sw * delta * q / s;
  return spectral_norm(lhs - rhs);
}

MultiplierReport verify_multiplier(const TupleLift& lift, const CoeffTable& table,
                                   const std::vector<std::vector<Complex>>& points,
                                   const TruncationParams& p) {
  if (points.empty()) throw PreconditionError("verify_multiplier: no sample points");
  MultiplierReport rep;
  const Matrix& q = lift.defect.ran_delta_basis;
  const auto r = q.cols();
  const auto n = static_cast<Index>(points.size());

  std::vector<Matrix> thetas;
  for (const auto& z : points) thetas.push_back(theta_eval(lift, table, z, p).theta);

  Matrix gram = Matrix::Zero(n * r, n * r);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const Complex s = kernel_value(table, points[i], points[j]);
      gram.block(i * r, j * r, r, r) =
          s * (Matrix::Identity(r, r) - thetas[i] * thetas[j].adjoint());
    }
  rep.gram_min_eigenvalue = r == 0 ? 0.0 : min_eigenvalue(gram);

  const DilationMap v = build_V(*lift.powers, lift.defect, table, p);
  if (v.degenerate) return rep;

  // V*(s_w (x) I_r): block alpha of s_w is sqrt(a_alpha) conj(w^alpha).
  std::vector<Matrix> images;
  for (const auto& w : points) {
    Matrix a = Matrix::Zero(static_cast<Index>(lift.h), r);
    for (std::size_t k = 0; k < v.basis.size(); ++k) {
      const MultiIndex& alpha = v.basis.at(k);
      const Complex c = std::sqrt(table.a_multi(alpha)) * std::conj(monomial(w, alpha));
      a.noalias() += c * v.matrix.middleRows(static_cast<Index>(k) * r, r).adjoint();
    }
    const Matrix sw = s_star(*lift.powers, table, w, lift.N).adjoint();
    rep.v_star_residual =
        std::max(rep.v_star_residual, spectral_norm(a - sw * lift.defect.delta * q));
    images.push_back(std::move(a));
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      // <V*(s_w xi), V*(s_z eta)> with z = points[i], w = points[j].
      const Complex s = kernel_value(table, points[i], points[j]);
      const Matrix lhs = images[i].adjoint() * images[j];
      const Matrix rhs = s * (Matrix::Identity(r, r) - thetas[i] * thetas[j].adjoint());
      if (r > 0)
        rep.vv_identity_residual =
            std::max(rep.vv_identity_residual, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  return rep;
}

std::vector<Matrix> theta_taylor(const TupleLift& lift, const CoeffTable& table, int L,
                                 double* fit_residual) {
  const std::size_t d = lift.d;
  const int deg = 2 * lift.N;
  const int K = deg + 1;
  const double rho = 0.97 / std::sqrt(static_cast<double>(d));
  const double step = 2.0 * std::numbers::pi / K;

  std::size_t samples = 1;
  for (std::size_t i = 0; i < d; ++i) samples *= static_cast<std::size_t>(K);

  const GradedBasis full(d, deg);
  const auto rows = lift.defect.ran_delta_basis.cols();
  const auto cols = lift.d_tilde_basis.cols();
  std::vector<Matrix> coeffs(full.size(), Matrix::Zero(rows, cols));

  std::vector<int> grid(d, 0);
  std::vector<Complex> z(d);
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t rest = s;
    for (std::size_t i = 0; i < d; ++i) {
      grid[i] = static_cast<int>(rest % K);
      rest /= K;
      z[i] = std::polar(rho, step * grid[i]);
    }
    const Matrix theta = theta_coords(lift, theta_parts(lift, table, z).full);
    for (std::size_t g = 0; g < full.size(); ++g) {
      const MultiIndex& gamma = full.at(g);
      long phase = 0;
      for (std::size_t i = 0; i < d; ++i) phase += static_cast<long>(gamma[i]) * grid[i];
      coeffs[g] += std::polar(1.0, -step * static_cast<double>(phase % K)) * theta;
    }
  }
  for (std::size_t g = 0; g < full.size(); ++g)
    coeffs[g] /= static_cast<double>(samples) * std::pow(rho, full.at(g).degree());

  if (fit_residual) {
    double worst = 0.0;
    const double r0 = 0.5 / std::sqrt(static_cast<double>(d));
    for (int j = 0; j < 4; ++j) {
      for (std::size_t i = 0; i < d; ++i) z[i] = std::polar(r0, 0.7 + 1.3 * j + 0.9 * i);
      Matrix approx = Matrix::Zero(rows, cols);
      for (std::size_t g = 0; g < full.size(); ++g) approx += monomial(z, full.at(g)) * coeffs[g];
      const Matrix exact = theta_coords(lift, theta_parts(lift, table, z).full);
      worst = std::max(worst, spectral_norm(approx - exact));
    }
    *fit_residual = worst;
  }

  const GradedBasis want(d, L);
  std::vector<Matrix> out;
  out.reserve(want.size());
  for (std::size_t g = 0; g < want.size(); ++g) {
    const auto idx = full.index_of(want.at(g));
    out.push_back(idx >= 0 ? coeffs[idx] : Matrix::Zero(rows, cols));
  }
  return out;
}

ModelReport verify_model(const TupleLift& lift, const CoeffTable& table,
                         const TruncationParams& p) {
  const CnpClassification cls = is_cnp(table, p.N);
  if (!cls.cnp_consistent)
    throw NotCnp("verify_model: kernel is not CNP (b_" + std::to_string(cls.first_failure) +
                 " < 0)");
  const PurityResult pur = is_pure(*lift.powers, lift.defect, table, p);
  if (pur.verdict != PurityVerdict::Pure)
    throw PreconditionError(std::string("verify_model: tuple is not pure (verdict ") +
                            to_string(pur.verdict) + ")");

  const DilationMap v = build_V(*lift.powers, lift.defect, table, p);
  if (v.degenerate) throw DegenerateDilation("verify_model: dilation is degenerate");
  const ShiftTuple shifts = shift_matrices(table, p.N, lift.d);
  const auto r = static_cast<Index>(v.rank);

  ModelReport rep;
  for (std::size_t i = 0; i < lift.d; ++i) {
    const Matrix lifted = kron_identity(shifts.tuple[i], r);
    const Matrix& ti = lift.powers->power(MultiIndex::unit(lift.d, i));
    rep.intertwining_residual = std::max(
        rep.intertwining_residual, spectral_norm(v.matrix.adjoint() * lifted * v.matrix - ti));
  }

  const std::vector<Matrix> coeffs = theta_taylor(lift, table, p.N, &rep.taylor_fit_residual);
  const GradedBasis& basis = v.basis;
  const auto q = lift.d_tilde_basis.cols();
  const auto n = static_cast<Index>(basis.size());
  Matrix m_theta = Matrix::Zero(n * r, n * q);
  for (std::size_t b = 0; b < basis.size(); ++b) {
    const MultiIndex& beta = basis.at(b);
    const double a_beta = table.a_multi(beta);
    for (std::size_t g = 0; g < basis.size(); ++g) {
      const MultiIndex& gamma = basis.at(g);
      if (beta.degree() + gamma.degree() > p.N) break;
      const MultiIndex sum = beta + gamma;
      const auto row = basis.index_of(sum);
      m_theta.block(row * r, static_cast<Index>(b) * q, r, q) =
          std::sqrt(a_beta / table.a_multi(sum)) * coeffs[g];
    }
  }
  const Matrix proj = Matrix::Identity(n * r, n * r) - v.matrix * v.matrix.adjoint();
  rep.projection_residual = spectral_norm(proj - m_theta * m_theta.adjoint());
  return rep;
}

}  // namespace cnp
