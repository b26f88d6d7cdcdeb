#include "cnplab/tuples.hpp"

#include <algorithm>
#include <cmath>

#include "cnplab/error.hpp"

namespace cnp {

namespace {

bool exactly_zero(const Matrix& m) { return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0; }

std::size_t first_nonzero(const MultiIndex& alpha) {
  for (std::size_t i = 0; i < alpha.dim(); ++i)
    if (alpha[i] != 0) return i;
  return alpha.dim();
}

}  // namespace

OperatorTuple::OperatorTuple(std::vector<Matrix> mats) : mats_(std::move(mats)) {
  if (mats_.empty()) throw PreconditionError("operator tuple needs at least one matrix");
  h_ = static_cast<std::size_t>(mats_[0].rows());
  for (const auto& m : mats_)
    if (static_cast<std::size_t>(m.rows()) != h_ || static_cast<std::size_t>(m.cols()) != h_)
      throw PreconditionError("operator tuple matrices must be square and of equal size");
}

OperatorTuple OperatorTuple::zero(std::size_t d, std::size_t h) {
  const auto n = static_cast<Index>(h);
  return OperatorTuple(std::vector<Matrix>(d, Matrix::Zero(n, n)));
}

OperatorTuple OperatorTuple::conjugated(const Matrix& u) const {
  std::vector<Matrix> out;
  out.reserve(mats_.size());
  for (const auto& m : mats_) out.push_back(u.adjoint() * m * u);
  return OperatorTuple(std::move(out));
}

double commutator_residual(const OperatorTuple& t) {
  double worst = 0.0;
  for (std::size_t i = 0; i < t.d(); ++i)
    for (std::size_t j = i + 1; j < t.d(); ++j) {
      const double scale = std::max(1.0, spectral_norm(t[i]) * spectral_norm(t[j]));
      worst = std::max(worst, spectral_norm(t[i] * t[j] - t[j] * t[i]) / scale);
    }
  return worst;
}

void require_commuting(const OperatorTuple& t, double tol) {
  const double r = commutator_residual(t);
  if (r > tol)
    throw PreconditionError("tuple does not commute: relative commutator " + std::to_string(r));
}

void TruncationParams::validate() const {
  if (N < 1) throw PreconditionError("truncation degree N must be >= 1");
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  if (tail_window < 1) throw PreconditionError("tail_window must be >= 1");
}

Matrix tuple_power(const OperatorTuple& t, const MultiIndex& alpha) {
  const auto h = static_cast<Index>(t.h());
  Matrix out = Matrix::Identity(h, h);
  if (!alpha.is_nonnegative()) return out;
  // Coordinate order: T_1^{a_1} ... T_d^{a_d}, built right to left.
  for (std::size_t i = t.d(); i-- > 0;)
    for (int k = 0; k < alpha[i]; ++k) out = t[i] * out;
  return out;
}

PowerTable::PowerTable(const OperatorTuple& t, int max_degree)
    : basis_(t.d(), max_degree), h_(t.h()) {
  const auto h = static_cast<Index>(h_);
  zero_ = Matrix::Zero(h, h);
  powers_.push_back(Matrix::Identity(h, h));
  last_nonzero_ = 0;
  if (h_ == 0) {
    terminates_ = true;
    return;
  }

  auto power_from_parent = [&](const MultiIndex& alpha) {
    const std::size_t i = first_nonzero(alpha);
    const MultiIndex parent = alpha - MultiIndex::unit(alpha.dim(), i);
    return Matrix(t[i] * powers_[basis_.index_of(parent)]);
  };

  for (int n = 1; n <= max_degree; ++n) {
    bool all_zero = true;
    for (std::size_t k = basis_.degree_begin(n); k < basis_.degree_end(n); ++k) {
      powers_.push_back(power_from_parent(basis_.at(k)));
      all_zero = all_zero && exactly_zero(powers_.back());
    }
    if (all_zero) {
      powers_.resize(basis_.degree_begin(n));
      terminates_ = true;
      return;
    }
    last_nonzero_ = n;
  }

  // One degree past the table decides whether truncation is exact.
  terminates_ = true;
  for (const auto& beta : indices_of_degree(t.d(), max_degree + 1)) {
    const std::size_t i = first_nonzero(beta);
    const MultiIndex parent = beta - MultiIndex::unit(beta.dim(), i);
    if (!exactly_zero(t[i] * powers_[basis_.index_of(parent)])) {
      terminates_ = false;
      break;
    }
  }
}

PowerTable::PowerTable(GradedBasis basis, std::vector<Matrix> powers, std::size_t h,
                       bool terminates)
    : basis_(std::move(basis)), powers_(std::move(powers)), h_(h), terminates_(terminates) {
  const auto n = static_cast<Index>(h_);
  zero_ = Matrix::Zero(n, n);
  if (powers_.empty() || powers_.size() > basis_.size())
    throw PreconditionError("PowerTable: power count does not match the basis");
  last_nonzero_ = 0;
  for (int deg = 1; deg <= basis_.max_degree(); ++deg)
    if (basis_.degree_end(deg) <= powers_.size()) last_nonzero_ = deg;
}

const Matrix& PowerTable::power(std::size_t k) const {
  return k < powers_.size() ? powers_[k] : zero_;
}

const Matrix& PowerTable::power(const MultiIndex& alpha) const {
  const auto k = basis_.index_of(alpha);
  if (k < 0) throw InsufficientCache("PowerTable: multi-index outside the table");
  return power(static_cast<std::size_t>(k));
}

SeriesSum conjugation_series(const PowerTable& powers, const CoeffTable& table, Which which,
                             const Matrix* x, int from_degree, int N) {
  if (N > powers.max_degree())
    throw InsufficientCache("conjugation_series: power table holds degree " +
                            std::to_string(powers.max_degree()) + ", " + std::to_string(N) +
                            " requested");
  const auto h = static_cast<Index>(powers.h());
  SeriesSum out;
  out.sum = Matrix::Zero(h, h);
  out.increments.assign(static_cast<std::size_t>(N) + 1, 0.0);
  const GradedBasis& basis = powers.basis();
  const int top = std::min(N, powers.last_nonzero_degree());
  for (int n = std::max(0, from_degree); n <= top; ++n) {
    Matrix level = Matrix::Zero(h, h);
    for (std::size_t k = basis.degree_begin(n); k < basis.degree_end(n); ++k) {
      const MultiIndex& alpha = basis.at(k);
      const double c = which == Which::A ? table.a_multi(alpha) : table.b_multi(alpha);
      if (c == 0.0) continue;
      const Matrix& p = powers.power(k);
      if (x)
        level.noalias() += c * (p * (*x) * p.adjoint());
      else
        level.noalias() += c * (p * p.adjoint());
    }
    out.increments[n] = level.norm();
    out.sum += level;
  }
  return out;
}

double tail_norm(const std::vector<double>& increments, int window, bool terminates) {
  if (terminates || increments.empty()) return 0.0;
  double worst = 0.0;
  const int n = static_cast<int>(increments.size());
  for (int k = std::max(0, n - window); k < n; ++k) worst = std::max(worst, increments[k]);
  return worst;
}

DefectData defect(const PowerTable& powers, const CoeffTable& table, const TruncationParams& p) {
  p.validate();
  const auto h = static_cast<Index>(powers.h());
  const SeriesSum s = conjugation_series(powers, table, Which::B, nullptr, 1, p.N);
  DefectData out;
  out.delta_sq = hermitian_part(Matrix::Identity(h, h) - s.sum);
  out.tail_norm = tail_norm(s.increments, p.tail_window, powers.terminates());
  const PsdRoot root = psd_sqrt(out.delta_sq, p.tol);
  out.delta = root.root;
  out.ran_delta_basis = root.range_basis;
  out.min_eigenvalue = root.min_eigenvalue;
  out.positive = !root.clipped;
  return out;
}

DefectData defect(const OperatorTuple& t, const CoeffTable& table, const TruncationParams& p) {
  p.validate();
  return defect(PowerTable(t, p.N), table, p);
}

ContractionResult is_contraction(const PowerTable& powers, const CoeffTable& table,
                                 const TruncationParams& p) {
  const DefectData def = defect(powers, table, p);
  ContractionResult r;
  r.min_eigenvalue = def.min_eigenvalue;
  r.tail_norm = def.tail_norm;
  if (def.delta_sq.rows() > 0) {
    const HermitianEigen he = hermitian_eigen(def.delta_sq);
    r.witness = he.vectors.col(0);
  }
  if (def.min_eigenvalue < -p.tol)
    r.verdict = ContractionVerdict::No;
  else if (def.tail_norm <= p.tol)
    r.verdict = ContractionVerdict::Yes;
  else
    r.verdict = ContractionVerdict::Inconclusive;
  return r;
}

ContractionResult is_contraction(const OperatorTuple& t, const CoeffTable& table,
                                 const TruncationParams& p) {
  p.validate();
  return is_contraction(PowerTable(t, p.N), table, p);
}

PurityResult is_pure(const PowerTable& powers, const DefectData& def, const CoeffTable& table,
                     const TruncationParams& p) {
  if (!def.positive)
    throw PreconditionError("is_pure: tuple is not a 1/k-contraction (min eigenvalue " +
                            std::to_string(def.min_eigenvalue) + ")");
  const auto h = static_cast<Index>(powers.h());
  const SeriesSum s = conjugation_series(powers, table, Which::A, &def.delta_sq, 0, p.N);

  PurityResult r;
  r.increments = s.increments;
  r.residual = spectral_norm(s.sum - Matrix::Identity(h, h));
  r.tail_norm = tail_norm(s.increments, p.tail_window, powers.terminates());

  bool shrinking = true;
  const int n = static_cast<int>(s.increments.size());
  for (int k = std::max(1, n - p.tail_window); k < n; ++k)
    if (s.increments[k] > s.increments[k - 1]) shrinking = false;
  const bool settled = powers.terminates() || s.increments.back() < p.tol;

  // R_N increases towards its limit, so once the tail is below tol its
  // ordering is rounding noise.
  if (r.residual <= p.tol && (powers.terminates() || shrinking || r.tail_norm <= p.tol))
    r.verdict = PurityVerdict::Pure;
  else if (settled && r.residual > 10.0 * p.tol)
    r.verdict = PurityVerdict::NotPure;
  else
    r.verdict = PurityVerdict::Inconclusive;
  return r;
}

PurityResult is_pure(const OperatorTuple& t, const CoeffTable& table, const TruncationParams& p) {
  p.validate();
  const PowerTable powers(t, p.N);
  return is_pure(powers, defect(powers, table, p), table, p);
}

ShiftTuple shift_matrices(const CoeffTable& table, int N, std::size_t d) {
  if (N > table.max_degree())
    throw InsufficientCache("shift_matrices: a-coefficients needed through degree " +
                            std::to_string(N));
  ShiftTuple out{GradedBasis(d, N), {}};
  const auto n = static_cast<Index>(out.basis.size());
  std::vector<Matrix> mats(d, Matrix::Zero(n, n));
  for (std::size_t k = 0; k < out.basis.size(); ++k) {
    const MultiIndex& alpha = out.basis.at(k);
    if (alpha.degree() >= N) break;
    const double a_alpha = table.a_multi(alpha);
    for (std::size_t i = 0; i < d; ++i) {
      const MultiIndex beta = alpha + MultiIndex::unit(d, i);
      const auto j = out.basis.index_of(beta);
      mats[i](j, static_cast<Index>(k)) = std::sqrt(a_alpha / table.a_multi(beta));
    }
  }
  out.tuple = OperatorTuple(std::move(mats));
  return out;
}

ShiftTuple shift_matrices(const CoeffTable& table, int N) {
  return shift_matrices(table, N, table.dim());
}

ShiftNorm shift_norm_sq(const CoeffTable& table, std::size_t i, int N, std::size_t d) {
  if (i >= d) throw PreconditionError("shift_norm_sq: coordinate out of range");
  if (N + 1 > table.max_degree())
    throw InsufficientCache("shift_norm_sq: a-coefficients needed through degree " +
                            std::to_string(N + 1));
  // For |alpha| = n, a_alpha / a_{alpha+e_i} = (a_n / a_{n+1}) (alpha_i + 1) / (n + 1),
  // maximised at alpha = n e_i.
  ShiftNorm out;
  std::vector<double> ratio(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) {
    ratio[n] = table.a(n) / table.a(n + 1);
    if (ratio[n] > out.value) {
      out.value = ratio[n];
      out.argmax_degree = n;
    }
  }
  out.lower_bound = N == 0 || ratio[N] > ratio[N - 1];
  return out;
}

const char* to_string(ContractionVerdict v) {
  switch (v) {
    case ContractionVerdict::Yes:
      return "yes";
    case ContractionVerdict::No:
      return "no";
    default:
      return "inconclusive";
  }
}

const char* to_string(PurityVerdict v) {
  switch (v) {
    case PurityVerdict::Pure:
      return "pure";
    case PurityVerdict::NotPure:
      return "not_pure";
    default:
      return "inconclusive";
  }
}

}  // namespace cnp
