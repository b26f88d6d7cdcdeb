#include "cnplab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cnplab/error.hpp"

namespace cnp {

DilationMap build_V(const PowerTable& powers, const DefectData& def, const CoeffTable& table,
                    const TruncationParams& p) {
  p.validate();
  if (!def.positive)
    throw PreconditionError("build_V: tuple is not a 1/k-contraction (min eigenvalue " +
                            std::to_string(def.min_eigenvalue) + ")");
  if (powers.max_degree() < p.N)
    throw InsufficientCache("build_V: power table shorter than the truncation degree");

  DilationMap v;
  v.N = p.N;
  v.basis = GradedBasis(powers.basis().dim(), p.N);
  v.domain_dim = powers.h();
  v.rank = static_cast<std::size_t>(def.ran_delta_basis.cols());
  v.delta = def.delta;
  v.ran_delta_basis = def.ran_delta_basis;

  const auto h = static_cast<Index>(v.domain_dim);
  const auto r = static_cast<Index>(v.rank);
  if (r == 0) {
    v.degenerate = h > 0;
    v.matrix = Matrix::Zero(0, h);
    v.isometry_defect = h > 0 ? 1.0 : 0.0;
    return v;
  }

  const Matrix qd = def.ran_delta_basis.adjoint() * def.delta;
  v.matrix = Matrix::Zero(static_cast<Index>(v.basis.size()) * r, h);
  for (std::size_t k = 0; k < v.basis.size(); ++k) {
    const MultiIndex& alpha = v.basis.at(k);
    if (alpha.degree() > powers.last_nonzero_degree()) break;
    const double w = std::sqrt(table.a_multi(alpha));
    v.matrix.middleRows(static_cast<Index>(k) * r, r) = w * (qd * powers.power(alpha).adjoint());
  }
  v.isometry_defect = spectral_norm(v.matrix.adjoint() * v.matrix - Matrix::Identity(h, h));
  return v;
}

DilationMap build_V(const OperatorTuple& t, const CoeffTable& table, const TruncationParams& p) {
  p.validate();
  const PowerTable powers(t, p.N);
  return build_V(powers, defect(powers, table, p), table, p);
}

Matrix lifted_shift_power(const ShiftTuple& shifts, const MultiIndex& alpha, std::size_t r) {
  return kron_identity(tuple_power(shifts.tuple, alpha), static_cast<Index>(r));
}

double check_intertwining(const DilationMap& v, const OperatorTuple& t, const ShiftTuple& shifts,
                          const std::vector<MultiIndex>& polys) {
  if (!(shifts.basis == v.basis) || shifts.tuple.h() != v.basis.size())
    throw BasisMismatch("check_intertwining: shifts and dilation use different bases");
  if (t.d() != shifts.tuple.d() || t.h() != v.domain_dim)
    throw BasisMismatch("check_intertwining: tuple does not match the dilation");
  if (v.degenerate) throw DegenerateDilation("check_intertwining: dilation is degenerate");

  const Matrix vs = v.matrix.adjoint();
  const auto r = static_cast<Index>(v.rank);
  double worst = 0.0;
  for (const auto& alpha : polys) {
    if (alpha.dim() != t.d()) throw BasisMismatch("check_intertwining: multi-index dimension");
    const int top = v.N - alpha.degree();
    if (top < 0 || !alpha.is_nonnegative()) continue;
    const Index cols = static_cast<Index>(v.basis.degree_end(top)) * r;
    const Matrix lifted = lifted_shift_power(shifts, alpha, v.rank);
    const Matrix lhs = vs * lifted.leftCols(cols);
    const Matrix rhs = tuple_power(t, alpha) * vs.leftCols(cols);
    worst = std::max(worst, spectral_norm(lhs - rhs));
  }
  return worst;
}

FactorabilityReport check_factorability(const Matrix& x, const OperatorTuple& t,
                                        const CoeffTable& table, const TruncationParams& p,
                                        const std::vector<double>& c) {
  p.validate();
  if (x.rows() != x.cols() || static_cast<std::size_t>(x.rows()) != t.h())
    throw PreconditionError("check_factorability: X has the wrong shape");
  if (spectral_norm(x - x.adjoint()) > 1e-10 * std::max(1.0, spectral_norm(x)))
    throw PreconditionError("check_factorability: X is not Hermitian");
  if (c.size() != t.d())
    throw PreconditionError("check_factorability: one shift norm per coordinate required");

  FactorabilityReport rep;
  const Matrix xh = hermitian_part(x);
  for (std::size_t i = 0; i < t.d(); ++i)
    rep.cond1.push_back(min_eigenvalue(c[i] * xh - t[i] * xh * t[i].adjoint()));

  const PowerTable powers(t, p.N);
  const SeriesSum ps = conjugation_series(powers, table, Which::B, &xh, 1, p.N);
  const Matrix y = hermitian_part(xh - ps.sum);
  rep.cond2_min_eigenvalue = min_eigenvalue(y);
  rep.cond2_tail_norm = tail_norm(ps.increments, p.tail_window, powers.terminates());

  const SeriesSum rs = conjugation_series(powers, table, Which::A, &y, 0, p.N);
  rep.cond3_residual = spectral_norm(rs.sum - xh);
  rep.cond3_tail_norm = tail_norm(rs.increments, p.tail_window, powers.terminates());

  const double inf = std::numeric_limits<double>::infinity();
  const double cond1_min =
      rep.cond1.empty() ? inf : *std::min_element(rep.cond1.begin(), rep.cond1.end());
  const bool settled = powers.terminates() || rs.increments.back() < p.tol;

  if (cond1_min < -p.tol) {
    rep.verdict = FactorVerdict::NotFactorable;
    rep.failed_condition = 1;
  } else if (rep.cond2_min_eigenvalue < -p.tol) {
    rep.verdict = FactorVerdict::NotFactorable;
    rep.failed_condition = 2;
  } else if (rep.cond2_tail_norm <= p.tol && rep.cond3_residual <= p.tol &&
             rep.cond3_tail_norm <= p.tol) {
    rep.verdict = FactorVerdict::Factorable;
  } else if (settled && rep.cond3_residual > 10.0 * p.tol) {
    rep.verdict = FactorVerdict::NotFactorable;
    rep.failed_condition = 3;
  }
  return rep;
}

AssociatedTuple associated_tuple(const DilationMap& v, const ShiftTuple& shifts, double tol) {
  if (v.degenerate) throw DegenerateDilation("associated_tuple: dilation is degenerate");
  if (!(shifts.basis == v.basis) || shifts.tuple.h() != v.basis.size())
    throw BasisMismatch("associated_tuple: shifts and dilation use different bases");
  if (v.isometry_defect > tol)
    throw PreconditionError("associated_tuple: dilation is not isometric (defect " +
                            std::to_string(v.isometry_defect) + ")");

  const Complement comp = range_complement(v.matrix);
  if (comp.ambiguous)
    throw AmbiguousRank("associated_tuple: singular values of V straddle the rank threshold");

  AssociatedTuple out;
  out.kernel_basis = comp.basis;
  out.singular_values = comp.singular_values;
  const Matrix& k = out.kernel_basis;
  std::vector<Matrix> mats;
  for (std::size_t i = 0; i < shifts.tuple.d(); ++i) {
    const Matrix mk = kron_identity(shifts.tuple[i], static_cast<Index>(v.rank)) * k;
    Matrix b = k.adjoint() * mk;
    out.invariance_residual = std::max(out.invariance_residual, spectral_norm(mk - k * b));
    mats.push_back(std::move(b));
  }
  out.tuple = OperatorTuple(std::move(mats));
  return out;
}

PowerTable associated_powers(const AssociatedTuple& assoc, const ShiftTuple& shifts,
                             std::size_t r) {
  const PowerTable sp(shifts.tuple, shifts.basis.max_degree());
  const Matrix& k = assoc.kernel_basis;
  std::vector<Matrix> powers;
  const std::size_t count = sp.basis().degree_end(sp.last_nonzero_degree());
  powers.reserve(count);
  for (std::size_t j = 0; j < count; ++j)
    powers.push_back(k.adjoint() * kron_identity(sp.power(j), static_cast<Index>(r)) * k);
  return PowerTable(sp.basis(), std::move(powers), static_cast<std::size_t>(k.cols()),
                    sp.terminates());
}

ExistenceResult admits_charfn(const OperatorTuple& t, const CoeffTable& table,
                              const TruncationParams& p) {
  p.validate();
  const PowerTable powers(t, p.N);
  const DefectData def = defect(powers, table, p);
  if (!def.positive)
    throw PreconditionError("admits_charfn: tuple is not a 1/k-contraction");
  const PurityResult pur = is_pure(powers, def, table, p);
  if (pur.verdict != PurityVerdict::Pure)
    throw PreconditionError(std::string("admits_charfn: tuple is not pure (verdict ") +
                            to_string(pur.verdict) + ")");

  const DilationMap v = build_V(powers, def, table, p);
  const ShiftTuple shifts = shift_matrices(table, p.N, t.d());
  const AssociatedTuple assoc = associated_tuple(v, shifts, 10.0 * p.tol);

  ExistenceResult res;
  res.invariance_residual = assoc.invariance_residual;
  res.kernel_dim = static_cast<std::size_t>(assoc.kernel_basis.cols());
  if (res.kernel_dim == 0) {
    res.verdict = ExistenceVerdict::Admits;
    return res;
  }

  const PowerTable bp = associated_powers(assoc, shifts, v.rank);
  const ContractionResult cr = is_contraction(bp, table, p);
  res.value = cr.min_eigenvalue;
  res.witness = assoc.kernel_basis * cr.witness;
  if (assoc.invariance_residual > p.tol) {
    res.verdict = ExistenceVerdict::Inconclusive;
    return res;
  }
  switch (cr.verdict) {
    case ContractionVerdict::Yes:
      res.verdict = ExistenceVerdict::Admits;
      break;
    case ContractionVerdict::No:
      res.verdict = ExistenceVerdict::DoesNotAdmit;
      break;
    default:
      res.verdict = ExistenceVerdict::Inconclusive;
  }
  return res;
}

namespace {

// <(I - sum_{alpha != 0} b_alpha B^alpha B^alpha*) k, k> for the associated
// powers bp.
double associated_form(const PowerTable& bp, const CoeffTable& table, const Vector& k) {
  double value = k.squaredNorm();
  const GradedBasis& basis = bp.basis();
  for (int n = 1; n <= bp.last_nonzero_degree(); ++n)
    for (std::size_t j = basis.degree_begin(n); j < basis.degree_end(n); ++j) {
      const double b = table.b_multi(basis.at(j));
      if (b != 0.0) value -= b * (bp.power(j).adjoint() * k).squaredNorm();
    }
  return value;
}

struct ZeroModel {
  DilationMap v;
  ShiftTuple shifts;
  AssociatedTuple assoc;
  PowerTable powers;
};

ZeroModel model_for(const OperatorTuple& t, const CoeffTable& table, const TruncationParams& p) {
  const PowerTable tp(t, p.N);
  DilationMap v = build_V(tp, defect(tp, table, p), table, p);
  ShiftTuple shifts = shift_matrices(table, p.N, t.d());
  AssociatedTuple assoc = associated_tuple(v, shifts, 10.0 * p.tol);
  PowerTable bp = associated_powers(assoc, shifts, v.rank);
  return {std::move(v), std::move(shifts), std::move(assoc), std::move(bp)};
}

}  // namespace

CounterexampleRow bergman_counterexample(int m, int N, std::size_t d, const TruncationParams& p) {
  if (m < 2)
    throw PreconditionError(
        "bergman_counterexample: m must be >= 2 (m = 1 is the Drury-Arveson kernel, where "
        "m(N+2)/(m+N+1) <= 1 and the quadratic form stays non-negative)");
  if (N < 0) throw PreconditionError("bergman_counterexample: N must be >= 0");
  if (d < 1) throw PreconditionError("bergman_counterexample: d must be >= 1");

  const int L = N + 2;
  const CoeffTable table = make_table(KernelSpec{d, Bergman{m}, "bergman"}, L + 1);
  const OperatorTuple tn = shift_matrices(table, N, d).tuple;
  TruncationParams q = p;
  q.N = L;
  const ZeroModel model = model_for(tn, table, q);

  MultiIndex top(d);
  top[0] = N + 2;
  Vector e = Vector::Zero(model.v.matrix.rows());
  e(model.shifts.basis.index_of(top) * static_cast<Index>(model.v.rank)) = 1.0;
  const Vector k = model.assoc.kernel_basis.adjoint() * e;

  CounterexampleRow row;
  row.m = m;
  row.N = N;
  row.d = d;
  row.ratio = static_cast<double>(m) * (N + 2) / (m + N + 1);
  row.closed_form = 1.0 - row.ratio;
  row.numeric = associated_form(model.powers, table, k);
  row.match_error = std::abs(row.numeric - row.closed_form);
  return row;
}

std::vector<ProbeValue> cnp_zero_tuple_probe(const CoeffTable& table, int N) {
  if (N < 2) throw PreconditionError("cnp_zero_tuple_probe: N must be >= 2");
  if (N > table.max_degree())
    throw InsufficientCache("cnp_zero_tuple_probe: coefficients needed through degree " +
                            std::to_string(N));
  TruncationParams q;
  q.N = N;
  const ZeroModel model = model_for(OperatorTuple::zero(1, 1), table, q);

  std::vector<ProbeValue> out;
  for (int n = 2; n <= N; ++n) {
    Vector e = Vector::Zero(model.v.matrix.rows());
    e(model.shifts.basis.index_of(MultiIndex{n})) = 1.0;
    const Vector k = model.assoc.kernel_basis.adjoint() * e;
    out.push_back({n, associated_form(model.powers, table, k)});
  }
  return out;
}

const char* to_string(FactorVerdict v) {
  switch (v) {
    case FactorVerdict::Factorable:
      return "factorable";
    case FactorVerdict::NotFactorable:
      return "not_factorable";
    default:
      return "inconclusive";
  }
}

const char* to_string(ExistenceVerdict v) {
  switch (v) {
    case ExistenceVerdict::Admits:
      return "admits";
    case ExistenceVerdict::DoesNotAdmit:
      return "does_not_admit";
    default:
      return "inconclusive";
  }
}

}  // namespace cnp
