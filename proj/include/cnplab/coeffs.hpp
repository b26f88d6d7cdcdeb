#pragma once

#include <complex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cnplab/multi_index.hpp"

namespace cnp {

using Complex = std::complex<double>;

// Kernel rules. Each generates the one-variable sequence a_n of
// k(z, w) = sum_n a_n <z, w>^n with a_0 = 1.
struct Szego {};
struct DruryArveson {};
/// (1 - <z,w>)^{-m}, a_n = C(m + n - 1, n).
struct Bergman {
  int m = 2;
};
/// Weighted Dirichlet space D_t, norm sum (n+1)^t |c_n|^2, so a_n = (n+1)^{-t}.
struct DirichletT {
  double t = 1.0;
};
/// An explicit finite prefix a_0, a_1, ...; never extrapolated.
struct Custom {
  std::vector<double> coefficients;
};

using KernelRule = std::variant<Szego, DruryArveson, Bergman, DirichletT, Custom>;

struct KernelSpec {
  std::size_t d = 1;
  KernelRule rule = Szego{};
  std::string label;
};

/// "szego", "drury_arveson", "bergman", "dirichlet_t" or "custom".
std::string rule_name(const KernelRule& rule);

/// Absolute threshold below which a b-coefficient counts as negative.
inline constexpr double kCnpTolZero = 1e-12;

enum class Which { A, B };

/// Cached prefix a_0..a_N and, once inverted, b_1..b_N with
/// sum_{n>=1} b_n t^n = 1 - 1 / sum_{n>=0} a_n t^n.
/// Immutable after construction; multi-index values are derived on demand.
class CoeffTable {
 public:
  const KernelSpec& spec() const { return spec_; }
  std::size_t dim() const { return spec_.d; }
  int max_degree() const { return static_cast<int>(a_.size()) - 1; }
  bool has_b() const { return !b_.empty(); }

  double a(int n) const;
  /// b_n for n >= 1; b_0 is reported as 0.
  double b(int n) const;

  /// a_0..a_N.
  std::span<const double> a_values() const { return a_; }
  /// b_0..b_N with b_0 = 0.
  std::span<const double> b_values() const { return b_; }

  /// a_alpha = a_{|alpha|} * multinomial(alpha); zero off Z^d_+.
  double a_multi(const MultiIndex& alpha) const;
  /// b_alpha = b_{|alpha|} * multinomial(alpha) for alpha in Z^d_+ \ {0}.
  double b_multi(const MultiIndex& alpha) const;

 private:
  friend CoeffTable generate_coeffs(const KernelSpec&, int);
  friend CoeffTable invert_coefficients(const CoeffTable&);

  KernelSpec spec_;
  std::vector<double> a_;
  std::vector<double> b_;
};

/// a_0..a_N from the kernel rule. Throws InvalidKernel on bad parameters.
CoeffTable generate_coeffs(const KernelSpec& spec, int N);

/// Fills b_1..b_N by b_n = a_n - sum_{j=1}^{n-1} b_j a_{n-j}.
CoeffTable invert_coefficients(const CoeffTable& table);

/// generate_coeffs followed by invert_coefficients.
CoeffTable make_table(const KernelSpec& spec, int N);

double multi_coeff(const CoeffTable& table, const MultiIndex& alpha, Which which);

/// Largest |[t^n] A(t) (1 - B(t))| over 1 <= n <= N.
double roundtrip_residual(const CoeffTable& table);

struct CnpClassification {
  bool cnp_consistent = true;
  int first_failure = 0;  ///< first n with b_n < -tol, 0 when none
  double value = 0.0;     ///< b at the first failure
  int checked_through = 0;
};

/// Degree-N certificate: not CNP iff some b_n < -tol_zero, 1 <= n <= N.
CnpClassification is_cnp(const CoeffTable& table, int N, double tol_zero = kCnpTolZero);

struct KernelValue {
  Complex value;
  double last_term = 0.0;  ///< |a_N <z,w>^N|
};

/// <z, w> = sum z_i conj(w_i).
Complex inner(std::span<const Complex> z, std::span<const Complex> w);

/// Truncated k(z, w). Throws DomainError outside the open ball.
KernelValue kernel_eval(const CoeffTable& table, std::span<const Complex> z,
                        std::span<const Complex> w, int N);

struct RadiusEstimate {
  double radius = 0.0;
  double spread = 0.0;  ///< (max - min) / mean of the tail ratios
  bool reliable = false;
  bool exact_polynomial = false;
};

/// Ratio-test radius of convergence averaged over the last quartile.
RadiusEstimate estimate_radius(const CoeffTable& table, Which which);

}  // namespace cnp
