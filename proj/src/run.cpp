#include "cnplab/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include "cnplab/charfn.hpp"
#include "cnplab/error.hpp"

namespace cnp {

std::string suite_prerequisite(const std::string& suite) {
  if (suite == "contraction") return "coeffs";
  if (suite == "purity") return "contraction";
  if (suite == "dilation") return "purity";
  if (suite == "existence") return "dilation";
  if (suite == "charfn") return "contraction";
  if (suite == "identities") return "charfn";
  return "";
}

std::vector<std::vector<Complex>> sample_points(std::uint64_t seed, int count, std::size_t d,
                                                double radius) {
  std::mt19937_64 gen(seed);
  auto uniform = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  std::vector<std::vector<Complex>> out;
  while (static_cast<int>(out.size()) < count) {
    std::vector<Complex> z(d);
    double norm_sq = 0.0;
    for (auto& c : z) {
      c = {2.0 * uniform() - 1.0, 2.0 * uniform() - 1.0};
      norm_sq += std::norm(c);
    }
    if (norm_sq >= 1.0) continue;
    for (auto& c : z) c *= radius;
    out.push_back(std::move(z));
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

// Lazily computed objects shared between suites.
struct Context {
  const RunConfig& cfg;
  TruncationParams p;
  std::optional<CoeffTable> table;
  std::optional<OperatorTuple> tuple;
  std::unique_ptr<PowerTable> powers;
  std::optional<DefectData> def;
  std::optional<TupleLift> lift;
  std::vector<std::vector<Complex>> points;

  const CoeffTable& coeffs() {
    if (!table) table = make_table(cfg.kernel, effective_n_max(cfg));
    if (table->max_degree() < p.N + 1)
      throw InsufficientCache("kernel N_max must be at least truncation N + 1");
    return *table;
  }
  const OperatorTuple& t() {
    if (!tuple) {
      OperatorTuple loaded = load_tuple(cfg.tuple, cfg.kernel);
      if (loaded.d() != cfg.kernel.d)
        throw PreconditionError("tuple length " + std::to_string(loaded.d()) +
                                " differs from kernel dimension " +
                                std::to_string(cfg.kernel.d));
      require_commuting(loaded);
      tuple = std::move(loaded);
    }
    return *tuple;
  }
  const PowerTable& pw() {
    if (!powers) powers = std::make_unique<PowerTable>(t(), p.N);
    return *powers;
  }
  const DefectData& defect_data() {
    if (!def) def = defect(pw(), coeffs(), p);
    return *def;
  }
  const TupleLift& tuple_lift() {
    if (!lift) lift = build_lift(t(), coeffs(), p);
    return *lift;
  }
};

void judge(SuiteEntry& e, const std::string& default_expected, bool checks_ok) {
  if (e.expected.empty()) e.expected = default_expected;
  const bool outcome_ok = e.expected.empty() || e.outcome == e.expected;
  e.verdict = outcome_ok && checks_ok ? SuiteVerdict::Pass : SuiteVerdict::Fail;
  if (!outcome_ok)
    e.message += (e.message.empty() ? "" : "; ") + std::string("outcome '") + e.outcome +
                 "' differs from expected '" + e.expected + "'";
}

void suite_coeffs(Context& ctx, SuiteEntry& e) {
  const CoeffTable& table = ctx.coeffs();
  double scale = 1.0;
  for (double a : table.a_values()) scale = std::max(scale, std::abs(a));
  e.residuals["roundtrip"] = roundtrip_residual(table) / scale;
  e.residuals["b1_minus_a1"] = std::abs(table.b(1) - table.a(1));
  e.tolerances["roundtrip"] = 1e-12;
  e.tolerances["b1_minus_a1"] = 0.0;

  const CnpClassification cls = is_cnp(table, ctx.p.N);
  e.outcome = cls.cnp_consistent ? "cnp_consistent" : "not_cnp";
  if (!cls.cnp_consistent) {
    e.residuals["first_failure"] = cls.first_failure;
    e.residuals["first_failure_value"] = cls.value;
    e.message = "b_" + std::to_string(cls.first_failure) + " = " + format_real(cls.value);
  }
  if (table.max_degree() >= 10) {
    const RadiusEstimate ra = estimate_radius(table, Which::A);
    e.residuals["radius_a"] = ra.radius;
    const RadiusEstimate rb = estimate_radius(table, Which::B);
    e.residuals["radius_b"] = rb.radius;
  }
  judge(e, "", e.residuals["roundtrip"] <= 1e-12 && e.residuals["b1_minus_a1"] == 0.0);
}

void suite_contraction(Context& ctx, SuiteEntry& e) {
  const ContractionResult r = is_contraction(ctx.pw(), ctx.coeffs(), ctx.p);
  e.outcome = to_string(r.verdict);
  e.residuals["min_eigenvalue"] = r.min_eigenvalue;
  e.residuals["tail_norm"] = r.tail_norm;
  e.residuals["commutator"] = commutator_residual(ctx.t());
  e.tolerances["min_eigenvalue"] = -ctx.p.tol;
  e.tolerances["tail_norm"] = ctx.p.tol;
  judge(e, "yes", true);
}

void suite_purity(Context& ctx, SuiteEntry& e) {
  const PurityResult r = is_pure(ctx.pw(), ctx.defect_data(), ctx.coeffs(), ctx.p);
  e.outcome = to_string(r.verdict);
  e.residuals["residual"] = r.residual;
  e.residuals["tail_norm"] = r.tail_norm;
  e.tolerances["residual"] = ctx.p.tol;
  judge(e, "pure", true);
}

void suite_dilation(Context& ctx, SuiteEntry& e) {
  const DilationMap v = build_V(ctx.pw(), ctx.defect_data(), ctx.coeffs(), ctx.p);
  e.residuals["isometry_defect"] = v.isometry_defect;
  e.residuals["rank"] = static_cast<double>(v.rank);
  e.tolerances["isometry_defect"] = 10.0 * ctx.p.tol;
  e.tolerances["intertwining"] = 10.0 * ctx.p.tol;
  if (v.degenerate) {
    e.outcome = "degenerate";
    e.message = "defect operator has rank zero";
    judge(e, "isometric", true);
    return;
  }
  const ShiftTuple shifts = shift_matrices(ctx.coeffs(), ctx.p.N, ctx.t().d());
  std::vector<MultiIndex> polys;
  for (int n = 1; n <= std::min(2, ctx.p.N); ++n)
    for (const auto& a : indices_of_degree(ctx.t().d(), n)) polys.push_back(a);
  const double inter = check_intertwining(v, ctx.t(), shifts, polys);
  e.residuals["intertwining"] = inter;
  e.outcome = v.isometry_defect <= 10.0 * ctx.p.tol ? "isometric" : "not_isometric";
  judge(e, "isometric", inter <= 10.0 * ctx.p.tol);
}

void suite_existence(Context& ctx, SuiteEntry& e) {
  const CoeffTable& table = ctx.coeffs();
  const ExistenceResult r = admits_charfn(ctx.t(), table, ctx.p);
  e.outcome = to_string(r.verdict);
  e.residuals["quadratic_form_min"] = r.value;
  e.residuals["invariance_residual"] = r.invariance_residual;
  e.residuals["kernel_dim"] = static_cast<double>(r.kernel_dim);
  e.tolerances["invariance_residual"] = ctx.p.tol;

  // Cross-check with the factorability criterion on I - VV*.
  const DilationMap v = build_V(ctx.pw(), ctx.defect_data(), table, ctx.p);
  const ShiftTuple shifts = shift_matrices(table, ctx.p.N, ctx.t().d());
  std::vector<Matrix> lifted;
  std::vector<double> c;
  for (std::size_t i = 0; i < shifts.tuple.d(); ++i) {
    lifted.push_back(kron_identity(shifts.tuple[i], static_cast<Index>(v.rank)));
    c.push_back(shift_norm_sq(table, i, ctx.p.N, ctx.t().d()).value);
  }
  const auto n = v.matrix.rows();
  const Matrix x = Matrix::Identity(n, n) - v.matrix * v.matrix.adjoint();
  const FactorabilityReport f = check_factorability(x, OperatorTuple(lifted), table, ctx.p, c);
  e.residuals["factor_cond2_min_eigenvalue"] = f.cond2_min_eigenvalue;
  e.residuals["factor_cond3_residual"] = f.cond3_residual;
  const bool consistent =
      (r.verdict == ExistenceVerdict::Admits && f.verdict == FactorVerdict::Factorable) ||
      (r.verdict == ExistenceVerdict::DoesNotAdmit && f.verdict == FactorVerdict::NotFactorable);
  e.message = std::string("factorability: ") + to_string(f.verdict);
  if (!consistent) e.message += " (disagrees with the associated-tuple test)";
  judge(e, "admits", consistent);
}

void suite_charfn(Context& ctx, SuiteEntry& e) {
  const TupleLift& lift = ctx.tuple_lift();
  double max_norm = 0.0;
  double max_inverse = 0.0;
  for (const auto& z : ctx.points) {
    const CharFnEval ev = theta_eval(lift, ctx.coeffs(), z, ctx.p);
    max_norm = std::max(max_norm, ev.norm);
    max_inverse = std::max(max_inverse, ev.inverse_residual);
  }
  const double tol = ctx.p.tol;
  e.residuals["max_norm"] = max_norm;
  e.residuals["max_inverse_residual"] = max_inverse;
  e.residuals["lift_gram"] = lift.gram_residual;
  e.residuals["lift_intertwining"] = lift.intertwining_residual;
  e.tolerances["max_norm"] = 1.0 + 10.0 * tol;
  e.tolerances["max_inverse_residual"] = tol;
  e.tolerances["lift_gram"] = 10.0 * tol;
  e.tolerances["lift_intertwining"] = 10.0 * tol;
  e.outcome = max_norm <= 1.0 + 10.0 * tol ? "contractive" : "not_contractive";
  judge(e, "contractive",
        lift.gram_residual <= 10.0 * tol && lift.intertwining_residual <= 10.0 * tol);
}

void suite_identities(Context& ctx, SuiteEntry& e) {
  const TupleLift& lift = ctx.tuple_lift();
  const CoeffTable& table = ctx.coeffs();
  const double tol = ctx.p.tol;
  double i1 = 0.0;
  for (std::size_t i = 0; i < ctx.points.size(); ++i)
    for (std::size_t j = i; j < ctx.points.size(); ++j)
      i1 = std::max(i1, verify_identity_I1(lift, table, ctx.points[i], ctx.points[j], ctx.p));
  e.residuals["I1"] = i1;
  e.tolerances["I1"] = 10.0 * tol;

  const MultiplierReport m = verify_multiplier(lift, table, ctx.points, ctx.p);
  e.residuals["gram_min_eigenvalue"] = m.gram_min_eigenvalue;
  e.tolerances["gram_min_eigenvalue"] = -tol;
  bool ok = i1 <= 10.0 * tol && m.gram_min_eigenvalue >= -tol;

  const PurityResult pur = is_pure(ctx.pw(), ctx.defect_data(), table, ctx.p);
  e.residuals["vv_identity"] = m.vv_identity_residual;
  e.residuals["v_star"] = m.v_star_residual;
  if (pur.verdict == PurityVerdict::Pure) {
    const ModelReport mr = verify_model(lift, table, ctx.p);
    e.residuals["model_intertwining"] = mr.intertwining_residual;
    e.residuals["model_projection"] = mr.projection_residual;
    e.residuals["taylor_fit"] = mr.taylor_fit_residual;
    e.tolerances["vv_identity"] = 10.0 * tol;
    e.tolerances["v_star"] = 10.0 * tol;
    e.tolerances["model_intertwining"] = 100.0 * tol;
    e.tolerances["model_projection"] = 100.0 * tol;
    ok = ok && m.vv_identity_residual <= 10.0 * tol && m.v_star_residual <= 10.0 * tol &&
         mr.intertwining_residual <= 100.0 * tol && mr.projection_residual <= 100.0 * tol;
  } else {
    e.message = "tuple is not pure; dilation identities reported, not asserted";
  }
  e.outcome = ok ? "verified" : "violated";
  judge(e, "verified", true);
}

void suite_counterexample(Context& ctx, SuiteEntry& e) {
  const CounterexampleSettings s = ctx.cfg.counterexample.value_or(CounterexampleSettings{});
  const auto rows = counterexample_cmd(s.m, s.N, s.d, ctx.p);
  double worst = 0.0;
  double max_closed = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    worst = std::max(worst, r.match_error);
    max_closed = std::max(max_closed, r.closed_form);
    e.residuals["numeric_N" + std::to_string(r.N)] = r.numeric;
  }
  e.residuals["max_match_error"] = worst;
  e.residuals["max_closed_form"] = max_closed;
  e.tolerances["max_match_error"] = 1e-12;
  e.tolerances["max_closed_form"] = 0.0;
  e.outcome = worst <= 1e-12 && max_closed < 0.0 ? "reproduced" : "not_reproduced";
  judge(e, "reproduced", true);
}

const std::map<std::string, std::function<void(Context&, SuiteEntry&)>>& suite_table() {
  static const std::map<std::string, std::function<void(Context&, SuiteEntry&)>> table = {
      {"coeffs", suite_coeffs},       {"contraction", suite_contraction},
      {"purity", suite_purity},       {"dilation", suite_dilation},
      {"existence", suite_existence}, {"charfn", suite_charfn},
      {"identities", suite_identities}, {"counterexample", suite_counterexample}};
  return table;
}

}  // namespace

VerificationReport run(const RunConfig& cfg) {
  VerificationReport rep;
  rep.label = cfg.label;
  rep.config = cfg.source;
  rep.timestamp = utc_timestamp();

  Context ctx{cfg, cfg.truncation, {}, {}, {}, {}, {}, {}};
  ctx.points = sample_points(cfg.seed, cfg.points, cfg.kernel.d);

  std::map<std::string, SuiteVerdict> done;
  std::string errored;
  for (const auto& name : kSuiteOrder) {
    if (std::find(cfg.suites.begin(), cfg.suites.end(), name) == cfg.suites.end()) continue;
    SuiteEntry e;
    e.name = name;
    if (auto it = cfg.expect.find(name); it != cfg.expect.end()) e.expected = it->second;

    std::string blocker = errored;
    for (std::string pre = suite_prerequisite(name);
         blocker.empty() && !pre.empty(); pre = suite_prerequisite(pre)) {
      auto it = done.find(pre);
      if (it != done.end() && it->second != SuiteVerdict::Pass) {
        blocker = pre;
        break;
      }
    }
    if (!blocker.empty()) {
      e.verdict = SuiteVerdict::Skipped;
      e.message = blocker == errored ? "suite '" + blocker + "' raised an error"
                                     : "prerequisite '" + blocker + "' did not pass";
    } else {
      const auto start = std::chrono::steady_clock::now();
      try {
        suite_table().at(name)(ctx, e);
      } catch (const std::exception& ex) {
        e.verdict = SuiteVerdict::Error;
        e.message = ex.what();
        errored = name;
      }
      e.wall_time =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    done[name] = e.verdict;
    rep.suites.push_back(std::move(e));
  }
  rep.overall = std::all_of(rep.suites.begin(), rep.suites.end(),
                            [](const SuiteEntry& s) { return s.verdict == SuiteVerdict::Pass; });
  return rep;
}

std::string kernel_info_text(const KernelSpec& spec, int N) {
  if (N < 1) throw PreconditionError("kernel-info: N must be >= 1");
  // A longer prefix feeds the radius estimates when N itself is short.
  int depth = std::max(N, 60);
  if (const auto* c = std::get_if<Custom>(&spec.rule))
    depth = std::max(N, static_cast<int>(c->coefficients.size()) - 1);
  const CoeffTable table = make_table(spec, depth);

  std::ostringstream os;
  char line[96];
  std::snprintf(line, sizeof line, "%-5s %-24s %-24s\n", "n", "a_n", "b_n");
  os << line;
  for (int n = 0; n <= N; ++n) {
    const std::string b = n == 0 ? "-" : format_real(table.b(n));
    std::snprintf(line, sizeof line, "%-5d %-24s %-24s\n", n, format_real(table.a(n)).c_str(),
                  b.c_str());
    os << line;
  }
  const CnpClassification cls = is_cnp(table, N);
  if (cls.cnp_consistent)
    os << "cnp: cnp_consistent through n = " << N << "\n";
  else
    os << "cnp: not_cnp at n = " << cls.first_failure << " (b = " << format_real(cls.value)
       << ")\n";
  for (const Which w : {Which::A, Which::B}) {
    os << "radius(" << (w == Which::A ? "a" : "b") << "): ";
    try {
      const RadiusEstimate r = estimate_radius(table, w);
      if (r.exact_polynomial)
        os << "inf (exact polynomial)";
      else
        os << format_real(r.radius) << (r.reliable ? "" : " (unreliable)");
    } catch (const Error& ex) {
      os << "n/a (" << ex.what() << ")";
    }
    os << "  [from degree " << table.max_degree() << "]\n";
  }
  return os.str();
}

std::vector<CounterexampleRow> counterexample_cmd(int m, const std::vector<int>& Ns,
                                                  std::size_t d, const TruncationParams& p) {
  if (m < 2)
    throw PreconditionError("counterexample: m must be >= 2; m = 1 is the Drury-Arveson "
                            "kernel, where m(N+2)/(m+N+1) <= 1 and no counterexample exists");
  std::vector<CounterexampleRow> rows;
  for (int N : Ns) rows.push_back(bergman_counterexample(m, N, d, p));
  return rows;
}

std::string counterexample_text(const std::vector<CounterexampleRow>& rows) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-3s %-3s %-3s %-22s %-22s %-22s %-10s\n", "m", "N", "d",
                "m(N+2)/(m+N+1)", "closed_form", "numeric", "match_error");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-3d %-3d %-3zu %-22.17g %-22.17g %-22.17g %-10.3e\n", r.m,
                  r.N, r.d, r.ratio, r.closed_form, r.numeric, r.match_error);
    os << line;
  }
  return os.str();
}

}  // namespace cnp
