// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cnplab/charfn.hpp"
#include "cnplab/model.hpp"
#include "cnplab/run.hpp"
#include "support.hpp"

using namespace cnp;
using cnptest::kernel;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds
  std::function<Outcome()> body;
};

TruncationParams params(int N, double tol = 1e-10) {
  TruncationParams p;
  p.N = N;
  p.tol = tol;
  return p;
}

OperatorTuple scalar(double t) { return OperatorTuple({Matrix::Constant(1, 1, t)}); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Kernels named in the classification criterion.
std::vector<KernelSpec> classification_kernels() {
  std::vector<KernelSpec> out{kernel(Szego{})};
  for (std::size_t d = 1; d <= 3; ++d) out.push_back(kernel(DruryArveson{}, d));
  for (double t : {0.0, 0.5, 1.0, 2.0}) out.push_back(kernel(DirichletT{t}));
  for (int m = 2; m <= 4; ++m) out.push_back(kernel(Bergman{m}));
  return out;
}

std::vector<KernelSpec> all_builtins() {
  std::vector<KernelSpec> out = classification_kernels();
  out.push_back(kernel(Bergman{1}));
  return out;
}

struct Example {
  std::string name;
  OperatorTuple t;
  KernelSpec spec;
};

// Pure tuples for the dilation and existence criteria.
std::vector<Example> pure_examples() {
  std::vector<Example> out;
  for (std::size_t h = 1; h <= 3; ++h) {
    out.push_back({"zero C^" + std::to_string(h) + " / drury_arveson(2)",
                   OperatorTuple::zero(2, h), kernel(DruryArveson{}, 2)});
    out.push_back({"zero C^" + std::to_string(h) + " / szego", OperatorTuple::zero(1, h),
                   kernel(Szego{})});
    out.push_back({"zero C^" + std::to_string(h) + " / bergman(2)", OperatorTuple::zero(1, h),
                   kernel(Bergman{2})});
  }
  for (double t : {0.3, 0.5, 0.9})
    out.push_back({"szego scalar " + fmt("%.1f", t), scalar(t), kernel(Szego{})});
  out.push_back({"drury_arveson pair (0.4,0.3)E12", cnptest::nilpotent_pair(0.4, 0.3),
                 kernel(DruryArveson{}, 2)});
  std::mt19937_64 gen(2024);
  for (Index h : {3, 4})
    out.push_back({"drury_arveson jordan pair h=" + std::to_string(h),
                   cnptest::jordan_pair(gen, h, 0.9), kernel(DruryArveson{}, 2)});
  {
    const auto da = make_table(kernel(DruryArveson{}, 2), 4);
    out.push_back({"drury_arveson compressed shift N=3", shift_matrices(da, 3, 2).tuple,
                   kernel(DruryArveson{}, 2)});
    const auto dir = make_table(kernel(DirichletT{1.0}), 6);
    out.push_back({"dirichlet_t(1) compressed shift N=5", shift_matrices(dir, 5, 1).tuple,
                   kernel(DirichletT{1.0})});
    for (int m = 2; m <= 4; ++m)
      for (int N = 0; N <= 2; ++N) {
        const auto berg = make_table(kernel(Bergman{m}), N + 1);
        out.push_back({"bergman(" + std::to_string(m) + ") compressed shift N=" +
                           std::to_string(N),
                       shift_matrices(berg, N, 1).tuple, kernel(Bergman{m})});
      }
  }
  return out;
}

// Smallest N in a doubling sequence at which the tuple is judged pure.
int purity_degree(const OperatorTuple& t, const CoeffTable& table, double tol = 1e-9) {
  for (int N = 8;; N *= 2) {
    const PurityResult r = is_pure(t, table, params(N, tol));
    if (r.verdict == PurityVerdict::Pure || N >= 256) return N;
  }
}

Outcome criterion_roundtrip() {
  Outcome o;
  double worst = 0.0;
  for (const auto& spec : all_builtins()) {
    const auto table = make_table(spec, 60);
    worst = std::max(worst, roundtrip_residual(table));
  }
  o.ok = worst <= 1e-12;
  o.detail = "max coefficient residual " + fmt("%.2e", worst);
  return o;
}

Outcome criterion_classification() {
  Outcome o;
  double worst_oracle = 0.0;
  std::ostringstream notes;
  for (const auto& spec : classification_kernels()) {
    const auto table = make_table(spec, 30);
    // Long division of 1 by sum a_n t^n.
    std::vector<double> q(31, 0.0), rem(31, 0.0);
    rem[0] = 1.0;
    for (int n = 0; n <= 30; ++n) {
      q[n] = rem[n] / table.a(0);
      for (int j = n; j <= 30; ++j) rem[j] -= q[n] * table.a(j - n);
    }
    for (int n = 1; n <= 30; ++n)
      worst_oracle = std::max(worst_oracle, std::abs(table.b(n) + q[n]));

    const CnpClassification cls = is_cnp(table, 30);
    if (cnptest::is_bergman_m2_plus(spec)) {
      const int m = std::get<Bergman>(spec.rule).m;
      const double b2 = -m * (m - 1) / 2.0;
      if (cls.cnp_consistent || cls.first_failure != 2 || std::abs(cls.value - b2) > 1e-12 ||
          std::abs(-q[2] - b2) > 1e-12) {
        o.ok = false;
        notes << " " << spec.label << "(" << m << ") misclassified;";
      }
    } else if (!cls.cnp_consistent) {
      o.ok = false;
      notes << " " << spec.label << " misclassified;";
    }
  }
  o.ok = o.ok && worst_oracle <= 1e-12;
  o.detail = "11 kernels classified, oracle deviation " + fmt("%.2e", worst_oracle) +
             ", bergman b_2 = -m(m-1)/2" + notes.str();
  return o;
}

Outcome criterion_counterexample() {
  Outcome o;
  double worst = 0.0;
  double max_closed = -1.0;
  for (int m = 2; m <= 4; ++m)
    for (int N = 0; N <= 3; ++N)
      for (std::size_t d = 1; d <= 2; ++d) {
        const CounterexampleRow r = bergman_counterexample(m, N, d, params(4));
        worst = std::max(worst, std::abs(r.numeric - (1.0 - m * (N + 2.0) / (m + N + 1.0))));
        max_closed = std::max(max_closed, r.closed_form);
      }
  const CounterexampleRow smallest = bergman_counterexample(2, 0, 1, params(4));
  const bool instance = std::abs(smallest.ratio - 4.0 / 3.0) <= 1e-15 && smallest.ratio > 1.0;
  o.ok = worst <= 1e-12 && max_closed < 0.0 && instance;
  o.detail = "max match error " + fmt("%.2e", worst) + ", max closed form " +
             fmt("%.4f", max_closed) + ", m=2 N=0 ratio " + fmt("%.17g", smallest.ratio);
  return o;
}

Outcome criterion_dilation() {
  Outcome o;
  double worst_iso = 0.0;
  double worst_int = 0.0;
  std::ostringstream notes;
  const auto examples = pure_examples();
  for (const auto& ex : examples) {
    const auto table = make_table(ex.spec, 520);
    const int N = purity_degree(ex.t, table);
    const PurityResult pur = is_pure(ex.t, table, params(N, 1e-9));
    const DilationMap v = build_V(ex.t, table, params(N));
    std::vector<MultiIndex> polys;
    for (int n = 1; n <= 2; ++n)
      for (const auto& a : indices_of_degree(ex.t.d(), n)) polys.push_back(a);
    const double inter = check_intertwining(v, ex.t, shift_matrices(table, N, ex.t.d()), polys);
    worst_iso = std::max(worst_iso, v.isometry_defect);
    worst_int = std::max(worst_int, inter);
    if (pur.residual > 1e-9 || v.isometry_defect > 1e-8 || inter > 1e-8) {
      o.ok = false;
      notes << " " << ex.name << ";";
    }
  }
  o.detail = std::to_string(examples.size()) + " examples, max isometry defect " +
             fmt("%.2e", worst_iso) + ", max intertwining " + fmt("%.2e", worst_int) +
             notes.str();
  return o;
}

Outcome criterion_existence() {
  Outcome o;
  int admits = 0;
  int refuses = 0;
  int max_degree = 0;
  std::ostringstream notes;
  const auto examples = pure_examples();
  for (const auto& ex : examples) {
    const auto table = make_table(ex.spec, 520);
    // Ker V* is invariant only up to the size of the truncated powers, which
    // is about the square root of the purity residual, so keep doubling.
    int N = std::max(purity_degree(ex.t, table, 1e-10), 4);
    ExistenceResult e = admits_charfn(ex.t, table, params(N));
    while (e.verdict == ExistenceVerdict::Inconclusive && N < 512) {
      N *= 2;
      e = admits_charfn(ex.t, table, params(N));
    }
    max_degree = std::max(max_degree, N);
    const TruncationParams p = params(N);

    const DilationMap v = build_V(ex.t, table, p);
    const ShiftTuple shifts = shift_matrices(table, N, ex.t.d());
    std::vector<Matrix> lifted;
    std::vector<double> c;
    for (std::size_t i = 0; i < ex.t.d(); ++i) {
      lifted.push_back(kron_identity(shifts.tuple[i], static_cast<Index>(v.rank)));
      c.push_back(shift_norm_sq(table, i, N, ex.t.d()).value);
    }
    const auto n = v.matrix.rows();
    const FactorabilityReport f =
        check_factorability(Matrix::Identity(n, n) - v.matrix * v.matrix.adjoint(),
                            OperatorTuple(lifted), table, p, c);
    const bool agree =
        (e.verdict == ExistenceVerdict::Admits && f.verdict == FactorVerdict::Factorable) ||
        (e.verdict == ExistenceVerdict::DoesNotAdmit && f.verdict == FactorVerdict::NotFactorable);
    // Every CNP example must admit, every bergman(m >= 2) example must not.
    const bool expected = cnptest::is_bergman_m2_plus(ex.spec)
                              ? e.verdict == ExistenceVerdict::DoesNotAdmit
                              : e.verdict == ExistenceVerdict::Admits;
    admits += e.verdict == ExistenceVerdict::Admits;
    refuses += e.verdict == ExistenceVerdict::DoesNotAdmit;
    if (!agree || !expected) {
      o.ok = false;
      notes << " " << ex.name << ": " << to_string(e.verdict) << "/" << to_string(f.verdict)
            << ";";
    }
  }
  o.detail = std::to_string(admits) + " admit, " + std::to_string(refuses) +
             " do not admit, all agree with factorability, N <= " +
             std::to_string(max_degree) + notes.str();
  if (!o.ok) o.detail = "disagreement:" + notes.str();
  return o;
}

Outcome criterion_identities() {
  Outcome o;
  std::vector<Example> examples;
  for (double t : {0.3, 0.5, 0.9})
    examples.push_back({"szego scalar " + fmt("%.1f", t), scalar(t), kernel(Szego{})});
  for (std::size_t h = 1; h <= 3; ++h)
    examples.push_back({"zero C^" + std::to_string(h) + " / drury_arveson(2)",
                        OperatorTuple::zero(2, h), kernel(DruryArveson{}, 2)});
  examples.push_back({"drury_arveson pair (0.4,0.3)E12", cnptest::nilpotent_pair(0.4, 0.3),
                      kernel(DruryArveson{}, 2)});
  std::mt19937_64 gen(606);
  examples.push_back({"drury_arveson jordan pair", cnptest::jordan_pair(gen, 3, 0.9),
                      kernel(DruryArveson{}, 2)});
  {
    Matrix j = Matrix::Zero(3, 3);
    j(0, 1) = j(1, 2) = 1.0;
    const Matrix t = j + Complex(0.3, -0.2) * j * j;
    examples.push_back({"dirichlet_t(1) jordan block", OperatorTuple({0.5 * t / spectral_norm(t)}),
                        kernel(DirichletT{1.0})});
  }
  {
    const auto da = make_table(kernel(DruryArveson{}, 2), 4);
    examples.push_back({"drury_arveson compressed shift N=3", shift_matrices(da, 3, 2).tuple,
                        kernel(DruryArveson{}, 2)});
  }

  double i1 = 0.0, gram = 0.0, model = 0.0, norm = 0.0;
  std::ostringstream notes;
  for (const auto& ex : examples) {
    const auto table = make_table(ex.spec, 520);
    // theta also needs s_z(T) converged at |z| = 0.8 (nilpotent tuples are
    // exact) and the tail of |Z(z)|^2 = sum b_n |z|^(2n) below tolerance.
    const int pd = purity_degree(ex.t, table, 1e-10);
    int N = PowerTable(ex.t, pd).terminates() ? pd : std::max(pd, 100);
    while (N < 400) {
      double tail = 0.0;
      for (int n = N + 1; n <= 500; ++n) tail += std::abs(table.b(n)) * std::pow(0.64, n);
      if (tail <= 1e-11) break;
      N += 4;
    }
    const TruncationParams p = params(N);
    const TupleLift lift = build_lift(ex.t, table, p);
    const auto pts = sample_points(7 + static_cast<std::uint64_t>(N), 145, ex.t.d());

    double ex_i1 = 0.0;
    for (int k = 0; k < 20; ++k)
      ex_i1 = std::max(ex_i1, verify_identity_I1(lift, table, pts[2 * k], pts[2 * k + 1], p));
    const std::vector<std::vector<Complex>> five(pts.begin() + 40, pts.begin() + 45);
    const MultiplierReport m = verify_multiplier(lift, table, five, p);
    const ModelReport mr = verify_model(lift, table, p);
    double ex_norm = 0.0;
    for (int k = 45; k < 145; ++k) ex_norm = std::max(ex_norm, theta_eval(lift, table, pts[k], p).norm);

    const double ex_model = std::max(mr.intertwining_residual, mr.projection_residual);
    i1 = std::max(i1, ex_i1);
    gram = std::min(gram, m.gram_min_eigenvalue);
    model = std::max(model, ex_model);
    norm = std::max(norm, ex_norm);
    if (ex_i1 > 1e-8 || m.gram_min_eigenvalue < -1e-9 || ex_model > 1e-7 || ex_norm > 1 + 1e-8) {
      o.ok = false;
      notes << " " << ex.name << ";";
    }
  }
  o.detail = std::to_string(examples.size()) + " examples, I1 " + fmt("%.2e", i1) +
             ", gram min " + fmt("%.2e", gram) + ", model " + fmt("%.2e", model) +
             ", max |theta| " + fmt("%.12f", norm) + notes.str();
  return o;
}

Outcome criterion_moebius() {
  Outcome o;
  const auto table = make_table(kernel(Szego{}), 200);
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> tdist(-0.95, 0.95);
  const auto pts = sample_points(31, 20, 1);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double t = tdist(gen);
    const TupleLift lift = build_lift(scalar(t), table, params(100));
    const Complex z = pts[k][0];
    const Complex got = theta_eval(lift, table, pts[k], params(100)).ambient(0, 0);
    worst = std::max(worst, std::abs(got - (z - t) / (1.0 - t * z)));
  }
  o.ok = worst <= 1e-9;
  o.detail = "20 (t, z) pairs at N = 100, max deviation " + fmt("%.2e", worst);
  return o;
}

Outcome criterion_probe() {
  Outcome o;
  int compared = 0;
  std::ostringstream notes;
  for (const auto& spec : all_builtins()) {
    const auto table = make_table(spec, 40);
    const CnpClassification cls = is_cnp(table, 30);
    int first_negative = 0;
    for (const auto& pv : cnp_zero_tuple_probe(table, 30)) {
      ++compared;
      const bool neg_probe = pv.ratio < -kCnpTolZero;
      const bool neg_b = table.b(pv.n) < -kCnpTolZero;
      if (neg_probe && first_negative == 0) first_negative = pv.n;
      if (neg_probe != neg_b) {
        o.ok = false;
        notes << " " << spec.label << " n=" << pv.n << ";";
      }
    }
    if (cls.cnp_consistent != (first_negative == 0) ||
        (!cls.cnp_consistent && cls.first_failure != first_negative)) {
      o.ok = false;
      notes << " " << spec.label << " verdict;";
    }
  }
  o.detail = std::to_string(compared) + " probe ratios agree in sign with b_n" + notes.str();
  if (!o.ok) o.detail = "sign disagreement:" + notes.str();
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "coefficient inversion round trip", 1.0, criterion_roundtrip},
      {2, "CNP classification", 1.0, criterion_classification},
      {3, "bergman counterexample", 5.0, criterion_counterexample},
      {4, "dilation isometry", 30.0, criterion_dilation},
      {5, "existence equivalence", 60.0, criterion_existence},
      {6, "characteristic function identities", 120.0, criterion_identities},
      {7, "scalar szego reduction", 5.0, criterion_moebius},
      {8, "operator-level CNP probe", 5.0, criterion_probe},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.time_limit;
    const bool pass = o.ok && in_time;
    failed += !pass;
    std::printf("%s [%d] %s: %s (%.3f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id,
                c.title.c_str(), o.detail.c_str(), secs, c.time_limit,
                in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
