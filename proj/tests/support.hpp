#pragma once

#include <random>
#include <vector>

#include <Eigen/QR>

#include "cnplab/coeffs.hpp"
#include "cnplab/linalg.hpp"
#include "cnplab/tuples.hpp"

namespace cnptest {

using namespace cnp;

inline KernelSpec kernel(KernelRule rule, std::size_t d = 1) {
  KernelSpec s;
  s.d = d;
  s.rule = std::move(rule);
  s.label = rule_name(s.rule);
  return s;
}

// Every built-in rule at the parameters the classification is stated for.
inline std::vector<KernelSpec> builtin_kernels(std::size_t d = 1) {
  return {kernel(Szego{}, d),         kernel(DruryArveson{}, d),  kernel(Bergman{2}, d),
          kernel(Bergman{3}, d),      kernel(Bergman{4}, d),      kernel(DirichletT{0.0}, d),
          kernel(DirichletT{0.5}, d), kernel(DirichletT{1.0}, d), kernel(DirichletT{2.0}, d)};
}

inline bool is_bergman_m2_plus(const KernelSpec& s) {
  const auto* b = std::get_if<Bergman>(&s.rule);
  return b && b->m >= 2;
}

inline Matrix random_matrix(std::mt19937_64& gen, Index rows, Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = {n(gen), n(gen)};
  return m;
}

inline Matrix random_unitary(std::mt19937_64& gen, Index n) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(gen, n, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

inline Matrix unit_matrix(Index n, Index i, Index j) {
  Matrix e = Matrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

// (a E_12, b E_12) on C^2.
inline OperatorTuple nilpotent_pair(double a, double b) {
  return OperatorTuple({a * unit_matrix(2, 0, 1), b * unit_matrix(2, 0, 1)});
}

// Two random polynomials without constant term in one nilpotent Jordan block,
// scaled so the row [T_1 T_2] has norm `scale`.
inline OperatorTuple jordan_pair(std::mt19937_64& gen, Index h, double scale) {
  Matrix j = Matrix::Zero(h, h);
  for (Index i = 0; i + 1 < h; ++i) j(i, i + 1) = 1.0;
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Matrix> mats;
  for (int k = 0; k < 2; ++k) {
    Matrix t = Matrix::Zero(h, h);
    Matrix power = j;
    for (Index e = 1; e < h; ++e) {
      t += Complex(n(gen), n(gen)) * power;
      power = power * j;
    }
    mats.push_back(t);
  }
  Matrix row(h, 2 * h);
  row << mats[0], mats[1];
  const double norm = spectral_norm(row);
  for (auto& m : mats) m *= scale / norm;
  return OperatorTuple(mats);
}

}  // namespace cnptest
