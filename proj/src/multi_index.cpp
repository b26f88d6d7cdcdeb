#include "cnplab/multi_index.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cnp {

int MultiIndex::degree() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }

bool MultiIndex::is_nonnegative() const {
  for (int e : entries_)
    if (e < 0) return false;
  return true;
}

bool MultiIndex::is_zero() const {
  for (int e : entries_)
    if (e != 0) return false;
  return true;
}

bool MultiIndex::dominates(const MultiIndex& beta) const {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (beta.entries_[i] > entries_[i]) return false;
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  MultiIndex r(*this);
  for (std::size_t i = 0; i < entries_.size(); ++i) r.entries_[i] += o.entries_[i];
  return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const {
  MultiIndex r(*this);
  for (std::size_t i = 0; i < entries_.size(); ++i) r.entries_[i] -= o.entries_[i];
  return r;
}

double factorial_of(const MultiIndex& alpha) {
  double f = 1.0;
  for (int e : alpha.entries())
    for (int k = 2; k <= e; ++k) f *= k;
  return f;
}

std::uint64_t multinomial_exact(const MultiIndex& alpha) {
  if (!alpha.is_nonnegative()) return 0;
  if (alpha.degree() > 20) throw std::out_of_range("multinomial_exact: |alpha| > 20");
  // Product of binomials C(s_k, alpha_k) over partial sums s_k, built with
  // C(s, j) = C(s-1, j-1) * s / j; every division is exact.
  std::uint64_t result = 1;
  int partial = 0;
  for (int e : alpha.entries()) {
    for (int k = 1; k <= e; ++k) {
      ++partial;
      const unsigned __int128 wide = static_cast<unsigned __int128>(result) * partial;
      result = static_cast<std::uint64_t>(wide / static_cast<unsigned>(k));
    }
  }
  return result;
}

double multinomial(const MultiIndex& alpha) {
  if (!alpha.is_nonnegative()) return 0.0;
  const int n = alpha.degree();
  if (n <= 20) return static_cast<double>(multinomial_exact(alpha));
  double lg = std::lgamma(n + 1.0);
  for (int e : alpha.entries()) lg -= std::lgamma(e + 1.0);
  return std::exp(lg);
}

namespace {

void compositions(std::size_t d, std::size_t pos, int remaining, MultiIndex& cur,
                  std::vector<MultiIndex>& out) {
  if (pos + 1 == d) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[pos] = k;
    compositions(d, pos + 1, remaining - k, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> indices_of_degree(std::size_t d, int n) {
  std::vector<MultiIndex> out;
  if (d == 0 || n < 0) return out;
  MultiIndex cur(d);
  compositions(d, 0, n, cur, out);
  return out;
}

std::size_t count_up_to_degree(std::size_t d, int n) {
  if (n < 0) return 0;
  // C(n + d, d) computed incrementally.
  std::size_t c = 1;
  for (std::size_t k = 1; k <= d; ++k) c = c * (static_cast<std::size_t>(n) + k) / k;
  return c;
}

GradedBasis::GradedBasis(std::size_t d, int max_degree) : d_(d), max_degree_(max_degree) {
  if (d == 0) throw std::invalid_argument("GradedBasis: dimension must be positive");
  offsets_.push_back(0);
  for (int n = 0; n <= max_degree; ++n) {
    for (auto& a : indices_of_degree(d, n)) {
      lookup_.emplace(a, list_.size());
      list_.push_back(std::move(a));
    }
    offsets_.push_back(list_.size());
  }
}

std::ptrdiff_t GradedBasis::index_of(const MultiIndex& alpha) const {
  auto it = lookup_.find(alpha);
  return it == lookup_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

}  // namespace cnp
