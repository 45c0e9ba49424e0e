#pragma once

#include <map>
#include <string>
#include <vector>

#include "cocert/group.hpp"
#include "cocert/rational.hpp"

namespace cocert {

/// Sparse coefficients keyed by canonical form; zero coefficients are never stored.
using Coeffs = std::map<std::vector<int>, Rational>;

/// An element of the rational group algebra QG.
class GAElem {
 public:
  explicit GAElem(GroupPtr group) : group_(std::move(group)) {}
  GAElem(GroupPtr group, Coeffs coeffs);

  static GAElem zero(GroupPtr group) { return GAElem(std::move(group)); }
  static GAElem scalar(GroupPtr group, const Rational& q);
  static GAElem one(GroupPtr group) { return scalar(std::move(group), Rational(1)); }
  static GAElem delta(GroupPtr group, const GroupElement& g, const Rational& coeff = Rational(1));
  /// Sum of coeff * (normalized word); repeated words accumulate.
  static GAElem from_terms(GroupPtr group, const std::vector<std::pair<Word, Rational>>& terms);

  const GroupPtr& group() const { return group_; }
  const Coeffs& coeffs() const { return coeffs_; }
  Rational coefficient(const GroupElement& g) const;
  bool is_zero() const { return coeffs_.empty(); }
  std::size_t support_size() const { return coeffs_.size(); }
  /// Support in canonical (length, lexicographic) order.
  std::vector<GroupElement> support() const;

  GAElem star() const;

  GAElem& operator+=(const GAElem& other);
  GAElem& operator-=(const GAElem& other);
  GAElem operator-() const;
  friend GAElem operator+(GAElem a, const GAElem& b) { return a += b; }
  friend GAElem operator-(GAElem a, const GAElem& b) { return a -= b; }
  friend GAElem operator*(const GAElem& a, const GAElem& b);
  friend GAElem operator*(const Rational& q, const GAElem& a);
  friend bool operator==(const GAElem& a, const GAElem& b);

  /// Human-readable form such as "2 - t - t^-1".
  std::string str() const;

 private:
  void check_group(const GAElem& other) const;

  GroupPtr group_;
  Coeffs coeffs_;
};

GAElem ga_mul(const GAElem& a, const GAElem& b);
GAElem ga_star(const GAElem& a);

/// Dense k x l matrix over QG; each entry is sparse.
class GAMatrix {
 public:
  GAMatrix(GroupPtr group, std::size_t rows, std::size_t cols);

  static GAMatrix zero(GroupPtr group, std::size_t rows, std::size_t cols) {
    return GAMatrix(std::move(group), rows, cols);
  }
  static GAMatrix identity(GroupPtr group, std::size_t k);
  static GAMatrix from_elem(const GAElem& a);

  const GroupPtr& group() const { return group_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  GAElem at(std::size_t i, std::size_t j) const;
  const Coeffs& coeffs(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, const GAElem& value);
  void add_to(std::size_t i, std::size_t j, const GAElem& value);

  GAMatrix star() const;
  bool is_zero() const;
  /// Largest word length occurring in any entry.
  std::size_t support_radius() const;

  friend bool operator==(const GAMatrix& a, const GAMatrix& b);

  std::string str() const;

 private:
  GroupPtr group_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Coeffs> entries_;
};

GAMatrix mat_mul(const GAMatrix& a, const GAMatrix& b);
GAMatrix mat_add(const GAMatrix& a, const GAMatrix& b);
GAMatrix mat_sub(const GAMatrix& a, const GAMatrix& b);
GAMatrix mat_scale(const Rational& q, const GAMatrix& a);
GAMatrix mat_star(const GAMatrix& a);
bool is_hermitian(const GAMatrix& a);

/// Decomposes x^* x (x is k x l) as a sum of k squares y_i^* y_i of l x l matrices,
/// where y_i carries row i of x in its first row.
std::vector<GAMatrix> rect_sos(const GAMatrix& x);

struct WeightedTerm {
  Rational weight;
  GAMatrix y;
};

/// Rewrites each d * y^* y with rational d = p/q > 0 as unweighted squares: r*y when
/// d = r^2, otherwise p*q copies of y/q. Throws NonpositiveWeight, and SizeCapExceeded
/// when the expansion would exceed `max_terms` matrices.
std::vector<GAMatrix> expand_weighted_sos(const std::vector<WeightedTerm>& terms,
                                          std::size_t max_terms = 1000000);

/// Sum of x^* x over the list; `cols` fixes the size when the list is empty.
GAMatrix sum_of_squares(GroupPtr group, std::size_t cols, const std::vector<GAMatrix>& xs);
GAMatrix weighted_sum_of_squares(GroupPtr group, std::size_t cols, const std::vector<WeightedTerm>& terms);

}  // namespace cocert
