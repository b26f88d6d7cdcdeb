#include "cnplab/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cnplab/error.hpp"

namespace cnp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string rule_name(const KernelRule& rule) {
  return std::visit(overloaded{[](const Szego&) { return std::string("szego"); },
                               [](const DruryArveson&) { return std::string("drury_arveson"); },
                               [](const Bergman&) { return std::string("bergman"); },
                               [](const DirichletT&) { return std::string("dirichlet_t"); },
                               [](const Custom&) { return std::string("custom"); }},
                    rule);
}

double CoeffTable::a(int n) const {
  if (n < 0) return 0.0;
  if (n > max_degree())
    throw InsufficientCache("a_" + std::to_string(n) + " requested, cache holds degree " +
                            std::to_string(max_degree()));
  return a_[n];
}

double CoeffTable::b(int n) const {
  if (!has_b()) throw PreconditionError("b-coefficients requested before inversion");
  if (n <= 0) return 0.0;
  if (n > max_degree())
    throw InsufficientCache("b_" + std::to_string(n) + " requested, cache holds degree " +
                            std::to_string(max_degree()));
  return b_[n];
}

double CoeffTable::a_multi(const MultiIndex& alpha) const {
  if (!alpha.is_nonnegative()) return 0.0;
  return a(alpha.degree()) * multinomial(alpha);
}

double CoeffTable::b_multi(const MultiIndex& alpha) const {
  if (!alpha.is_nonnegative() || alpha.is_zero()) return 0.0;
  return b(alpha.degree()) * multinomial(alpha);
}

CoeffTable generate_coeffs(const KernelSpec& spec, int N) {
  if (N < 0) throw PreconditionError("generate_coeffs: N must be non-negative");
  if (spec.d == 0) throw InvalidKernel("kernel dimension d must be positive");

  CoeffTable table;
  table.spec_ = spec;
  auto& a = table.a_;
  a.assign(static_cast<std::size_t>(N) + 1, 1.0);

  std::visit(overloaded{
                 [](const Szego&) {},
                 [](const DruryArveson&) {},
                 [&](const Bergman& r) {
                   if (r.m < 1) throw InvalidKernel("bergman: m must be >= 1");
                   for (int n = 1; n <= N; ++n) a[n] = a[n - 1] * (r.m + n - 1) / n;
                 },
                 [&](const DirichletT& r) {
                   if (!(r.t >= 0.0) || !std::isfinite(r.t))
                     throw InvalidKernel("dirichlet_t: t must be a finite real >= 0");
                   for (int n = 1; n <= N; ++n) a[n] = std::pow(n + 1.0, -r.t);
                 },
                 [&](const Custom& r) {
                   if (r.coefficients.empty() || r.coefficients[0] != 1.0)
                     throw InvalidKernel("custom: a_0 must equal 1");
                   if (r.coefficients.size() < a.size())
                     throw InvalidKernel("custom: " + std::to_string(r.coefficients.size()) +
                                         " coefficients supplied, degree " + std::to_string(N) +
                                         " requested");
                   for (std::size_t n = 0; n < a.size(); ++n) {
                     const double v = r.coefficients[n];
                     if (!(v > 0.0) || !std::isfinite(v))
                       throw InvalidKernel("custom: coefficient a_" + std::to_string(n) +
                                           " is not a positive real");
                     a[n] = v;
                   }
                 },
             },
             spec.rule);
  return table;
}

CoeffTable invert_coefficients(const CoeffTable& table) {
  CoeffTable out = table;
  const auto& a = out.a_;
  if (a.empty() || a[0] != 1.0) throw PreconditionError("invert_coefficients: a_0 must be 1");
  const int N = out.max_degree();
  auto& b = out.b_;
  b.assign(static_cast<std::size_t>(N) + 1, 0.0);
  for (int n = 1; n <= N; ++n) {
    double s = a[n];
    for (int j = 1; j < n; ++j) s -= b[j] * a[n - j];
    b[n] = s;
  }
  return out;
}

CoeffTable make_table(const KernelSpec& spec, int N) {
  return invert_coefficients(generate_coeffs(spec, N));
}

double multi_coeff(const CoeffTable& table, const MultiIndex& alpha, Which which) {
  if (alpha.is_nonnegative() && alpha.degree() > table.max_degree())
    throw InsufficientCache("multi_coeff: |alpha| = " + std::to_string(alpha.degree()) +
                            " exceeds cached degree " + std::to_string(table.max_degree()));
  return which == Which::A ? table.a_multi(alpha) : table.b_multi(alpha);
}

double roundtrip_residual(const CoeffTable& table) {
  const auto a = table.a_values();
  const auto b = table.b_values();
  const int N = table.max_degree();
  double worst = 0.0;
  for (int n = 1; n <= N; ++n) {
    double c = a[n];
    for (int j = 1; j <= n; ++j) c -= a[n - j] * b[j];
    worst = std::max(worst, std::abs(c));
  }
  return worst;
}

CnpClassification is_cnp(const CoeffTable& table, int N, double tol_zero) {
  CnpClassification c;
  c.checked_through = N;
  for (int n = 1; n <= N; ++n) {
    const double bn = table.b(n);
    if (bn < -tol_zero) {
      c.cnp_consistent = false;
      c.first_failure = n;
      c.value = bn;
      break;
    }
  }
  return c;
}

Complex inner(std::span<const Complex> z, std::span<const Complex> w) {
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < z.size(); ++i) s += z[i] * std::conj(w[i]);
  return s;
}

KernelValue kernel_eval(const CoeffTable& table, std::span<const Complex> z,
                        std::span<const Complex> w, int N) {
  if (z.size() != w.size()) throw DomainError("kernel_eval: points of different dimension");
  if (std::real(inner(z, z)) >= 1.0 || std::real(inner(w, w)) >= 1.0)
    throw DomainError("kernel_eval: point outside the open unit ball");
  if (N > table.max_degree())
    throw InsufficientCache("kernel_eval: degree " + std::to_string(N) + " not cached");

  const Complex ip = inner(z, w);
  KernelValue kv{Complex{0.0, 0.0}, 0.0};
  Complex power{1.0, 0.0};
  for (int n = 0; n <= N; ++n) {
    const Complex term = table.a(n) * power;
    kv.value += term;
    kv.last_term = std::abs(term);
    power *= ip;
  }
  return kv;
}

RadiusEstimate estimate_radius(const CoeffTable& table, Which which) {
  const auto vals = which == Which::A ? table.a_values() : table.b_values();
  const int first = which == Which::A ? 0 : 1;
  const int N = table.max_degree();
  if (N - first + 1 < 10)
    throw PreconditionError("estimate_radius: at least 10 cached coefficients required");

  double scale = 0.0;
  for (int n = first; n <= N; ++n) scale = std::max(scale, std::abs(vals[n]));
  const double zero_tol = 1e-15 * scale;

  std::vector<int> nonzero;
  for (int n = first; n <= N; ++n)
    if (std::abs(vals[n]) > zero_tol) nonzero.push_back(n);

  const int count = N - first + 1;
  const int tail_start = N - std::max(1, count / 4) + 1;

  std::vector<double> ratios;
  for (std::size_t k = 1; k < nonzero.size(); ++k) {
    const int i = nonzero[k - 1];
    const int j = nonzero[k];
    if (j < tail_start) continue;
    ratios.push_back(std::pow(std::abs(vals[i]) / std::abs(vals[j]), 1.0 / (j - i)));
  }

  RadiusEstimate est;
  const bool tail_all_zero =
      std::none_of(nonzero.begin(), nonzero.end(), [&](int n) { return n >= tail_start; });
  if (ratios.empty()) {
    est.radius = std::numeric_limits<double>::infinity();
    est.exact_polynomial = tail_all_zero;
    est.reliable = tail_all_zero;
    return est;
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / ratios.size();
  est.radius = mean;
  est.spread = (*hi - *lo) / mean;
  est.reliable = est.spread <= 0.1;
  return est;
}

}  // namespace cnp
