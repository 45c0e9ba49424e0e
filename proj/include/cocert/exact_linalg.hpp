#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "cocert/rational.hpp"

namespace cocert {

using QVector = std::vector<Rational>;

/// Dense row-major rational matrix.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static QMatrix identity(std::size_t n);
  static QMatrix from_rows(const std::vector<QVector>& rows, std::size_t cols);
  static QMatrix from_columns(const std::vector<QVector>& cols, std::size_t rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  QVector row(std::size_t i) const;
  QVector col(std::size_t j) const;
  QMatrix transpose() const;
  bool is_zero() const;
  bool is_symmetric() const;
  Rational trace() const;

  friend QMatrix operator*(const QMatrix& a, const QMatrix& b);
  friend QMatrix operator+(const QMatrix& a, const QMatrix& b);
  friend QMatrix operator-(const QMatrix& a, const QMatrix& b);
  friend QMatrix operator*(const Rational& q, const QMatrix& a);
  friend bool operator==(const QMatrix& a, const QMatrix& b) = default;

  Eigen::MatrixXd to_eigen() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

QVector mat_vec(const QMatrix& a, const QVector& x);
QVector vec_mat(const QVector& x, const QMatrix& a);
Rational dot(const QVector& a, const QVector& b);
/// x^T S x.
Rational quadratic_form(const QMatrix& s, const QVector& x);

/// Rank by fraction-free (Bareiss) elimination on integer-scaled rows.
std::size_t rank(const QMatrix& a);

struct Rref {
  QMatrix reduced;
  std::vector<std::size_t> pivots;
};
Rref rref(const QMatrix& a);

/// Basis of {x : A x = 0}.
std::vector<QVector> nullspace(const QMatrix& a);
/// Basis of {x : x A = 0}.
std::vector<QVector> left_nullspace(const QMatrix& a);
/// Basis of the span of the rows.
std::vector<QVector> row_space(const QMatrix& a);
/// Basis of the span of the columns.
std::vector<QVector> column_space(const QMatrix& a);

/// Exact Gram-Schmidt without normalization; drops dependent vectors.
std::vector<QVector> orthogonalize(const std::vector<QVector>& vectors);
/// Dimension of the span of a list of vectors of length `dim`.
std::size_t span_dim(const std::vector<QVector>& vectors, std::size_t dim);
/// Basis of the orthogonal complement of span(vectors) in Q^dim.
std::vector<QVector> orthogonal_complement(const std::vector<QVector>& vectors, std::size_t dim);
/// Basis of the intersection of two subspaces of Q^dim.
std::vector<QVector> intersect(const std::vector<QVector>& a, const std::vector<QVector>& b, std::size_t dim);
/// True when span(a) == span(b).
bool same_span(const std::vector<QVector>& a, const std::vector<QVector>& b, std::size_t dim);

/// Some solution of A x = b, or nullopt when inconsistent.
std::optional<QVector> solve(const QMatrix& a, const QVector& b);

/// Outcome of the exact LDL^T positivity test.
struct PsdCheck {
  bool pass = false;
  QMatrix lower;            // unit lower triangular, valid when pass
  QVector diagonal;         // nonnegative when pass
  QVector witness;          // v with v^T S v < 0 when !pass
  Rational witness_value;   // v^T S v
  std::size_t positive_pivots = 0;
};

/// S = L D L^T with the rule that a zero pivot forces its row of the current Schur
/// complement to vanish. Throws Error(NotSymmetric).
PsdCheck psd_check_exact(const QMatrix& s);

std::string to_string(const QMatrix& m);

}  // namespace cocert
