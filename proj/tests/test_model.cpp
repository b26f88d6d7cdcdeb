#include <doctest.h>

#include <cmath>

#include "cnplab/error.hpp"
#include "cnplab/model.hpp"
#include "support.hpp"

using namespace cnp;
using cnptest::kernel;

namespace {

TruncationParams params(int N, double tol = 1e-10) {
  TruncationParams p;
  p.N = N;
  p.tol = tol;
  return p;
}

OperatorTuple scalar(Complex t) { return OperatorTuple({Matrix::Constant(1, 1, t)}); }

FactorabilityReport factorability_of(const OperatorTuple& t, const CoeffTable& table,
                                     const TruncationParams& p) {
  const DilationMap v = build_V(t, table, p);
  const ShiftTuple shifts = shift_matrices(table, p.N, t.d());
  std::vector<Matrix> lifted;
  std::vector<double> c;
  for (std::size_t i = 0; i < t.d(); ++i) {
    lifted.push_back(kron_identity(shifts.tuple[i], static_cast<Index>(v.rank)));
    c.push_back(shift_norm_sq(table, i, p.N, t.d()).value);
  }
  const auto n = v.matrix.rows();
  return check_factorability(Matrix::Identity(n, n) - v.matrix * v.matrix.adjoint(),
                             OperatorTuple(lifted), table, p, c);
}

// Compression of the drury_arveson shifts on degrees <= 8 to the smallest
// backward-shift invariant subspace containing a few random low-degree vectors.
OperatorTuple random_coinvariant_compression(std::mt19937_64& gen, const CoeffTable& da) {
  const ShiftTuple s = shift_matrices(da, 8, 2);
  const auto n = static_cast<Index>(s.basis.size());
  std::uniform_int_distribution<int> pick(1, 2);
  std::uniform_int_distribution<int> top(1, 3);
  const int generators = pick(gen);
  const auto low = static_cast<Index>(s.basis.degree_end(top(gen)));
  std::vector<Vector> span;
  for (int g = 0; g < generators; ++g) {
    Vector v = Vector::Zero(n);
    v.head(low) = cnptest::random_matrix(gen, low, 1);
    for (const auto& alpha : s.basis.indices())
      if (alpha.degree() <= 3) span.push_back(tuple_power(s.tuple, alpha).adjoint() * v);
  }
  Matrix cols(n, static_cast<Index>(span.size()));
  for (std::size_t k = 0; k < span.size(); ++k) cols.col(static_cast<Index>(k)) = span[k];
  const Complement orth = range_complement(cols, 1e-9);
  // Orthonormal basis of the span = complement of its complement.
  const Complement q = range_complement(orth.basis, 1e-9);
  std::vector<Matrix> mats;
  for (std::size_t i = 0; i < 2; ++i) mats.push_back(q.basis.adjoint() * s.tuple[i] * q.basis);
  return OperatorTuple(mats);
}

}  // namespace

TEST_CASE("build_V on zero tuples keeps only the constant block") {
  const auto da = make_table(kernel(DruryArveson{}, 2), 20);
  const DilationMap v = build_V(OperatorTuple::zero(2, 2), da, params(6));
  CHECK(v.rank == 2);
  CHECK(v.isometry_defect <= 1e-15);
  const Matrix constant = v.ran_delta_basis * v.matrix.topRows(2);
  CHECK((constant - Matrix::Identity(2, 2)).norm() <= 1e-15);
  CHECK(v.matrix.bottomRows(v.matrix.rows() - 2).norm() == 0.0);
}

TEST_CASE("build_V on the scalar szego tuple is the geometric column") {
  const auto sz = make_table(kernel(Szego{}), 200);
  const double t = 0.5;
  const DilationMap v = build_V(scalar(t), sz, params(60));
  CHECK(v.matrix.cols() == 1);
  CHECK(v.matrix.rows() == 61);
  const Complex phase = v.ran_delta_basis(0, 0);
  for (int n = 0; n <= 60; ++n)
    CHECK(std::abs(phase * v.matrix(n, 0) - std::sqrt(1 - t * t) * std::pow(t, n)) <= 1e-15);
  CHECK(v.isometry_defect <= 1e-9);

  const DilationMap flat = build_V(scalar(1.0), sz, params(10));
  CHECK(flat.degenerate);
  CHECK(flat.isometry_defect == 1.0);
  CHECK(flat.matrix.rows() == 0);
  CHECK_THROWS_AS(build_V(scalar(2.0), sz, params(10)), PreconditionError);
}

TEST_CASE("intertwining residuals") {
  const auto da = make_table(kernel(DruryArveson{}, 2), 20);
  const DilationMap v0 = build_V(OperatorTuple::zero(2, 2), da, params(6));
  const ShiftTuple s0 = shift_matrices(da, 6, 2);
  CHECK(check_intertwining(v0, OperatorTuple::zero(2, 2), s0, {{1, 0}, {0, 1}, {1, 1}}) == 0.0);

  const auto sz = make_table(kernel(Szego{}), 200);
  const DilationMap v = build_V(scalar(0.5), sz, params(60));
  CHECK(check_intertwining(v, scalar(0.5), shift_matrices(sz, 60, 1), {{3}}) <= 1e-9);

  const ShiftTuple wrong = shift_matrices(sz, 40, 1);
  CHECK_THROWS_AS(check_intertwining(v, scalar(0.5), wrong, {{1}}), BasisMismatch);
  const DilationMap flat = build_V(scalar(1.0), sz, params(10));
  CHECK_THROWS_AS(check_intertwining(flat, scalar(1.0), shift_matrices(sz, 10, 1), {{1}}),
                  DegenerateDilation);
}

TEST_CASE("intertwining does not grow with the truncation degree") {
  const auto sz = make_table(kernel(Szego{}), 200);
  for (double t : {0.3, 0.5, 0.9}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int N : {40, 60}) {
      const DilationMap v = build_V(scalar(t), sz, params(N));
      const double r = check_intertwining(v, scalar(t), shift_matrices(sz, N, 1), {{1}, {2}, {3}});
      CHECK(r <= prev + 1e-15);
      prev = r;
    }
  }
}

TEST_CASE("check_factorability examples") {
  const auto sz = make_table(kernel(Szego{}), 40);
  const ShiftTuple s = shift_matrices(sz, 8, 1);
  const std::vector<double> c{shift_norm_sq(sz, 0, 8, 1).value};

  const auto zero = check_factorability(Matrix::Zero(9, 9), s.tuple, sz, params(8), c);
  CHECK(zero.verdict == FactorVerdict::Factorable);

  const auto ident = check_factorability(Matrix::Identity(9, 9), s.tuple, sz, params(8), c);
  CHECK(ident.verdict == FactorVerdict::Factorable);

  const auto berg = make_table(kernel(Bergman{2}), 40);
  const OperatorTuple t0 = shift_matrices(berg, 0, 1).tuple;
  const auto f = factorability_of(t0, berg, params(2));
  CHECK(f.verdict == FactorVerdict::NotFactorable);
  CHECK(f.failed_condition == 2);
  CHECK(f.cond2_min_eigenvalue == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(check_factorability(Matrix::Zero(9, 9), s.tuple, sz, params(8), {}),
                  PreconditionError);
  Matrix skew = Matrix::Zero(9, 9);
  skew(0, 1) = 1.0;
  CHECK_THROWS_AS(check_factorability(skew, s.tuple, sz, params(8), c), PreconditionError);
}

TEST_CASE("associated tuples") {
  // The truncated shifts themselves: V is onto, Ker V* = 0.
  const auto da = make_table(kernel(DruryArveson{}, 2), 20);
  const ShiftTuple s = shift_matrices(da, 4, 2);
  const DilationMap vs = build_V(s.tuple, da, params(4));
  const AssociatedTuple empty = associated_tuple(vs, s, 1e-9);
  CHECK(empty.kernel_basis.cols() == 0);

  // Scalar szego: B is the model-space compression, a contraction.
  const auto sz = make_table(kernel(Szego{}), 200);
  const DilationMap v = build_V(scalar(0.5), sz, params(60));
  const ShiftTuple s1 = shift_matrices(sz, 60, 1);
  const AssociatedTuple b = associated_tuple(v, s1, 1e-9);
  CHECK(b.kernel_basis.cols() == 60);
  CHECK(b.invariance_residual <= 1e-9);
  CHECK(spectral_norm(b.tuple[0]) <= 1.0 + 1e-12);

  // Bergman T_0: Ker V* is spanned by the non-constant monomials.
  const auto berg = make_table(kernel(Bergman{2}), 20);
  const DilationMap v0 = build_V(shift_matrices(berg, 0, 1).tuple, berg, params(2));
  const AssociatedTuple k = associated_tuple(v0, shift_matrices(berg, 2, 1), 1e-9);
  CHECK(k.kernel_basis.cols() == 2);
  CHECK(k.kernel_basis.row(0).norm() <= 1e-15);

  const DilationMap flat = build_V(scalar(1.0), sz, params(10));
  CHECK_THROWS_AS(associated_tuple(flat, shift_matrices(sz, 10, 1), 1e-9), DegenerateDilation);
}

TEST_CASE("admits_charfn examples") {
  const auto da = make_table(kernel(DruryArveson{}, 2), 40);
  CHECK(admits_charfn(OperatorTuple::zero(2, 1), da, params(6)).verdict ==
        ExistenceVerdict::Admits);

  const auto berg = make_table(kernel(Bergman{2}), 40);
  const ExistenceResult no = admits_charfn(OperatorTuple::zero(1, 1), berg, params(4));
  CHECK(no.verdict == ExistenceVerdict::DoesNotAdmit);
  CHECK(no.value < 0.0);
  CHECK(no.witness.norm() == doctest::Approx(1.0));

  const ExistenceResult t0 = admits_charfn(shift_matrices(berg, 0, 1).tuple, berg, params(2));
  CHECK(t0.verdict == ExistenceVerdict::DoesNotAdmit);
  CHECK(t0.value == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));

  const auto sz = make_table(kernel(Szego{}), 100);
  CHECK_THROWS_AS(admits_charfn(scalar(1.0), sz, params(20)), PreconditionError);
  CHECK_THROWS_AS(admits_charfn(scalar(2.0), sz, params(20)), PreconditionError);
}

TEST_CASE("bergman counterexample closed form") {
  for (int m = 2; m <= 4; ++m)
    for (int N = 0; N <= 3; ++N)
      for (std::size_t d = 1; d <= 2; ++d) {
        CAPTURE(m);
        CAPTURE(N);
        CAPTURE(d);
        const CounterexampleRow r = bergman_counterexample(m, N, d, params(4));
        const double ratio = m * (N + 2.0) / (m + N + 1.0);
        CHECK(r.ratio == doctest::Approx(ratio).epsilon(1e-15));
        CHECK(r.ratio > 1.0);
        CHECK(r.closed_form < 0.0);
        CHECK(std::abs(r.numeric - (1.0 - ratio)) <= 1e-12);
        CHECK(r.match_error <= 1e-12);
      }
  CHECK(bergman_counterexample(2, 0, 1, params(4)).ratio == doctest::Approx(4.0 / 3.0));
  CHECK(bergman_counterexample(2, 0, 1, params(4)).closed_form == doctest::Approx(-1.0 / 3.0));
  CHECK(bergman_counterexample(2, 1, 1, params(4)).closed_form == doctest::Approx(-0.5));
  CHECK(bergman_counterexample(3, 0, 1, params(4)).closed_form == doctest::Approx(-0.5));
  CHECK(bergman_counterexample(3, 1, 1, params(4)).closed_form == doctest::Approx(-0.8));
  CHECK_THROWS_AS(bergman_counterexample(1, 0, 1, params(4)), PreconditionError);
}

TEST_CASE("zero-tuple probe matches b_n / a_n") {
  const auto sz = make_table(kernel(Szego{}), 40);
  for (const auto& pv : cnp_zero_tuple_probe(sz, 30)) CHECK(std::abs(pv.ratio) <= 1e-15);

  const auto berg = make_table(kernel(Bergman{2}), 40);
  const auto bp = cnp_zero_tuple_probe(berg, 10);
  REQUIRE(bp.front().n == 2);
  CHECK(bp.front().ratio == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));

  const auto dir = make_table(kernel(DirichletT{1.0}), 40);
  for (const auto& pv : cnp_zero_tuple_probe(dir, 30)) CHECK(pv.ratio >= -1e-12);

  for (const auto& spec : cnptest::builtin_kernels()) {
    CAPTURE(spec.label);
    const auto table = make_table(spec, 40);
    for (const auto& pv : cnp_zero_tuple_probe(table, 30)) {
      const double expected = table.b(pv.n) / table.a(pv.n);
      CHECK(std::abs(pv.ratio - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
      CHECK((pv.ratio < -1e-12) == (table.b(pv.n) < -1e-12));
    }
  }
  CHECK_THROWS_AS(cnp_zero_tuple_probe(sz, 1), PreconditionError);
}

TEST_CASE("dilation is isometric on pure examples") {
  std::vector<std::pair<OperatorTuple, KernelSpec>> cases;
  for (std::size_t h = 1; h <= 3; ++h) {
    cases.emplace_back(OperatorTuple::zero(1, h), kernel(Bergman{2}));
    cases.emplace_back(OperatorTuple::zero(2, h), kernel(DruryArveson{}, 2));
  }
  for (double t : {0.3, 0.5, 0.9}) cases.emplace_back(scalar(t), kernel(Szego{}));
  cases.emplace_back(cnptest::nilpotent_pair(0.4, 0.3), kernel(DruryArveson{}, 2));
  std::mt19937_64 gen(4);
  cases.emplace_back(cnptest::jordan_pair(gen, 4, 0.8), kernel(DruryArveson{}, 2));
  {
    const auto dir = make_table(kernel(DirichletT{1.0}, 2), 10);
    cases.emplace_back(shift_matrices(dir, 3, 2).tuple, kernel(DirichletT{1.0}, 2));
    const auto berg = make_table(kernel(Bergman{3}), 10);
    cases.emplace_back(shift_matrices(berg, 2, 1).tuple, kernel(Bergman{3}));
  }
  for (const auto& [t, spec] : cases) {
    CAPTURE(spec.label);
    CAPTURE(t.h());
    const auto table = make_table(spec, 400);
    int N = 8;
    PurityResult pur;
    for (;; N *= 2) {
      pur = is_pure(t, table, params(N, 1e-9));
      if (pur.residual <= 1e-9 || N > 200) break;
    }
    REQUIRE(pur.residual <= 1e-9);
    const DilationMap v = build_V(t, table, params(N));
    CHECK(v.isometry_defect <= 1e-8);
    std::vector<MultiIndex> polys;
    for (int n = 1; n <= 2; ++n)
      for (const auto& a : indices_of_degree(t.d(), n)) polys.push_back(a);
    CHECK(check_intertwining(v, t, shift_matrices(table, N, t.d()), polys) <= 1e-8);
  }
}

TEST_CASE("existence agrees with factorability") {
  const auto da = make_table(kernel(DruryArveson{}, 2), 40);
  std::mt19937_64 gen(20);
  for (int trial = 0; trial < 20; ++trial) {
    CAPTURE(trial);
    const OperatorTuple t = random_coinvariant_compression(gen, da);
    CHECK(commutator_residual(t) <= 1e-12);
    const ExistenceResult e = admits_charfn(t, da, params(8));
    CHECK(e.verdict == ExistenceVerdict::Admits);
    CHECK(factorability_of(t, da, params(8)).verdict == FactorVerdict::Factorable);
  }

  for (int m = 2; m <= 4; ++m)
    for (int N = 0; N <= 2; ++N) {
      CAPTURE(m);
      CAPTURE(N);
      const auto berg = make_table(kernel(Bergman{m}), 40);
      const OperatorTuple t = shift_matrices(berg, N, 1).tuple;
      CHECK(admits_charfn(t, berg, params(N + 2)).verdict == ExistenceVerdict::DoesNotAdmit);
      CHECK(factorability_of(t, berg, params(N + 2)).verdict == FactorVerdict::NotFactorable);
    }

  const auto sz = make_table(kernel(Szego{}), 200);
  CHECK(admits_charfn(scalar(0.5), sz, params(60)).verdict == ExistenceVerdict::Admits);
  CHECK(factorability_of(scalar(0.5), sz, params(60)).verdict == FactorVerdict::Factorable);
}
