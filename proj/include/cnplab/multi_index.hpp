#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <vector>

namespace cnp {

/// A multi-index in Z^d. Entries may be negative; such indices are outside
/// Z^d_+ and are treated as "absent" by the coefficient and power routines.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t d) : entries_(d, 0) {}
  MultiIndex(std::initializer_list<int> e) : entries_(e) {}
  explicit MultiIndex(std::vector<int> e) : entries_(std::move(e)) {}

  static MultiIndex unit(std::size_t d, std::size_t i) {
    MultiIndex u(d);
    u.entries_[i] = 1;
    return u;
  }

  std::size_t dim() const { return entries_.size(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  int& operator[](std::size_t i) { return entries_[i]; }
  const std::vector<int>& entries() const { return entries_; }

  /// |alpha| = sum of entries.
  int degree() const;
  bool is_nonnegative() const;
  bool is_zero() const;

  /// Componentwise beta <= alpha.
  bool dominates(const MultiIndex& beta) const;

  MultiIndex operator+(const MultiIndex& o) const;
  MultiIndex operator-(const MultiIndex& o) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> entries_;
};

/// alpha! as a double (exact while it fits in 53 bits).
double factorial_of(const MultiIndex& alpha);

/// |alpha|! / alpha!. Exact integer arithmetic up to |alpha| = 20,
/// log-gamma beyond. Zero when alpha has a negative entry.
double multinomial(const MultiIndex& alpha);

/// Exact multinomial for |alpha| <= 20; throws std::out_of_range otherwise.
std::uint64_t multinomial_exact(const MultiIndex& alpha);

/// All alpha in Z^d_+ with |alpha| = n, in descending lexicographic order:
/// (n,0,..), (n-1,1,..), ..., (0,..,n).
std::vector<MultiIndex> indices_of_degree(std::size_t d, int n);

/// Number of alpha in Z^d_+ with |alpha| <= n, i.e. C(n+d, d).
std::size_t count_up_to_degree(std::size_t d, int n);

/// The truncated monomial basis {e(alpha) : |alpha| <= N} in graded
/// lexicographic order: by degree, then descending lexicographic within a
/// degree. Every matrix on the truncated space uses this ordering.
class GradedBasis {
 public:
  GradedBasis() = default;
  GradedBasis(std::size_t d, int max_degree);

  std::size_t dim() const { return d_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return list_.size(); }

  const MultiIndex& at(std::size_t k) const { return list_[k]; }
  const std::vector<MultiIndex>& indices() const { return list_; }

  /// Position of alpha, or -1 when alpha is negative or of degree > N.
  std::ptrdiff_t index_of(const MultiIndex& alpha) const;

  /// [begin, end) positions of the indices of degree n.
  std::size_t degree_begin(int n) const { return offsets_[n]; }
  std::size_t degree_end(int n) const { return offsets_[n + 1]; }

  friend bool operator==(const GradedBasis& a, const GradedBasis& b) {
    return a.d_ == b.d_ && a.max_degree_ == b.max_degree_;
  }

 private:
  std::size_t d_ = 0;
  int max_degree_ = -1;
  std::vector<MultiIndex> list_;
  std::vector<std::size_t> offsets_;
  std::map<MultiIndex, std::size_t> lookup_;
};

}  // namespace cnp
