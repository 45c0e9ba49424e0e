#include "cocert/exact_linalg.hpp"

#include <sstream>

#include "cocert/error.hpp"

namespace cocert {

QMatrix QMatrix::identity(std::size_t n) {
  QMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1;
  return out;
}

QMatrix QMatrix::from_rows(const std::vector<QVector>& rows, std::size_t cols) {
  QMatrix out(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = rows[i][j];
  return out;
}

QMatrix QMatrix::from_columns(const std::vector<QVector>& cols, std::size_t rows) {
  QMatrix out(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows; ++i) out(i, j) = cols[j][i];
  return out;
}

QVector QMatrix::row(std::size_t i) const {
  return QVector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                 data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

QVector QMatrix::col(std::size_t j) const {
  QVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

QMatrix QMatrix::transpose() const {
  QMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

bool QMatrix::is_zero() const {
  for (const auto& q : data_)
    if (q != 0) return false;
  return true;
}

bool QMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

Rational QMatrix::trace() const {
  Rational t = 0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

QMatrix operator*(const QMatrix& a, const QMatrix& b) {
  if (a.cols_ != b.rows_) throw Error(ErrorCode::DimMismatch, "QMatrix product shape mismatch");
  QMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t l = 0; l < a.cols_; ++l) {
      const Rational& x = a(i, l);
      if (x == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j)
        if (b(l, j) != 0) out(i, j) += x * b(l, j);
    }
  return out;
}

QMatrix operator+(const QMatrix& a, const QMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(ErrorCode::DimMismatch, "QMatrix sum shape mismatch");
  QMatrix out = a;
  for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
  return out;
}

QMatrix operator-(const QMatrix& a, const QMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(ErrorCode::DimMismatch, "QMatrix difference shape mismatch");
  QMatrix out = a;
  for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] -= b.data_[i];
  return out;
}

QMatrix operator*(const Rational& q, const QMatrix& a) {
  QMatrix out = a;
  for (auto& x : out.data_) x *= q;
  return out;
}

Eigen::MatrixXd QMatrix::to_eigen() const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double((*this)(i, j));
  return out;
}

QVector mat_vec(const QMatrix& a, const QVector& x) {
  QVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (x[j] != 0) out[i] += a(i, j) * x[j];
  return out;
}

QVector vec_mat(const QVector& x, const QMatrix& a) {
  QVector out(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += x[i] * a(i, j);
  }
  return out;
}

Rational dot(const QVector& a, const QVector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
  return s;
}

Rational quadratic_form(const QMatrix& s, const QVector& x) { return dot(x, mat_vec(s, x)); }

std::size_t rank(const QMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<std::vector<Integer>> z(m, std::vector<Integer>(n));
  for (std::size_t i = 0; i < m; ++i) {
    Integer l = 1;
    for (std::size_t j = 0; j < n; ++j) l = boost::multiprecision::lcm(l, denominator_of(a(i, j)));
    for (std::size_t j = 0; j < n; ++j) z[i][j] = numerator_of(a(i, j)) * (l / denominator_of(a(i, j)));
  }
  Integer prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    std::size_t p = r;
    while (p < m && z[p][c] == 0) ++p;
    if (p == m) continue;
    std::swap(z[p], z[r]);
    for (std::size_t i = r + 1; i < m; ++i) {
      for (std::size_t j = c + 1; j < n; ++j) z[i][j] = (z[r][c] * z[i][j] - z[i][c] * z[r][j]) / prev;
      z[i][c] = 0;
    }
    prev = z[r][c];
    ++r;
  }
  return r;
}

Rref rref(const QMatrix& a) {
  Rref out{a, {}};
  QMatrix& m = out.reduced;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    Rational inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      Rational f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j)
        if (m(r, j) != 0) m(i, j) -= f * m(r, j);
    }
    out.pivots.push_back(c);
    ++r;
  }
  return out;
}

std::vector<QVector> nullspace(const QMatrix& a) {
  Rref r = rref(a);
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto p : r.pivots) is_pivot[p] = true;
  std::vector<QVector> out;
  for (std::size_t f = 0; f < a.cols(); ++f) {
    if (is_pivot[f]) continue;
    QVector v(a.cols());
    v[f] = 1;
    for (std::size_t i = 0; i < r.pivots.size(); ++i) v[r.pivots[i]] = -r.reduced(i, f);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<QVector> left_nullspace(const QMatrix& a) { return nullspace(a.transpose()); }

std::vector<QVector> row_space(const QMatrix& a) {
  Rref r = rref(a);
  std::vector<QVector> out;
  for (std::size_t i = 0; i < r.pivots.size(); ++i) out.push_back(r.reduced.row(i));
  return out;
}

std::vector<QVector> column_space(const QMatrix& a) { return row_space(a.transpose()); }

std::vector<QVector> orthogonalize(const std::vector<QVector>& vectors) {
  std::vector<QVector> basis;
  std::vector<Rational> norms;
  for (const auto& v : vectors) {
    QVector w = v;
    for (std::size_t b = 0; b < basis.size(); ++b) {
      Rational c = dot(w, basis[b]) / norms[b];
      if (c == 0) continue;
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * basis[b][i];
    }
    Rational n = dot(w, w);
    if (n == 0) continue;
    basis.push_back(std::move(w));
    norms.push_back(n);
  }
  return basis;
}

std::size_t span_dim(const std::vector<QVector>& vectors, std::size_t dim) {
  if (vectors.empty()) return 0;
  return rank(QMatrix::from_rows(vectors, dim));
}

std::vector<QVector> orthogonal_complement(const std::vector<QVector>& vectors, std::size_t dim) {
  if (vectors.empty()) {
    std::vector<QVector> out;
    for (std::size_t i = 0; i < dim; ++i) {
      QVector e(dim);
      e[i] = 1;
      out.push_back(std::move(e));
    }
    return out;
  }
  return nullspace(QMatrix::from_rows(vectors, dim));
}

std::vector<QVector> intersect(const std::vector<QVector>& a, const std::vector<QVector>& b, std::size_t dim) {
  // U ∩ W = (U^⊥ + W^⊥)^⊥
  std::vector<QVector> perp = orthogonal_complement(a, dim);
  auto wp = orthogonal_complement(b, dim);
  perp.insert(perp.end(), wp.begin(), wp.end());
  return orthogonal_complement(perp, dim);
}

bool same_span(const std::vector<QVector>& a, const std::vector<QVector>& b, std::size_t dim) {
  std::size_t da = span_dim(a, dim), db = span_dim(b, dim);
  if (da != db) return false;
  std::vector<QVector> both = a;
  both.insert(both.end(), b.begin(), b.end());
  return span_dim(both, dim) == da;
}

std::optional<QVector> solve(const QMatrix& a, const QVector& b) {
  QMatrix aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  Rref r = rref(aug);
  if (!r.pivots.empty() && r.pivots.back() == a.cols()) return std::nullopt;
  QVector x(a.cols());
  for (std::size_t i = 0; i < r.pivots.size(); ++i) x[r.pivots[i]] = r.reduced(i, a.cols());
  return x;
}

PsdCheck psd_check_exact(const QMatrix& s) {
  if (!s.is_symmetric()) throw Error(ErrorCode::NotSymmetric, "psd_check_exact needs an exactly symmetric matrix");
  const std::size_t n = s.rows();
  QMatrix work = s;
  PsdCheck out;
  out.lower = QMatrix::identity(n);
  out.diagonal.assign(n, Rational(0));

  auto fail_with = [&](QVector u) {
    // Lift a Schur-complement witness back through the partial factor: v = L^{-T} u.
    QVector v(n);
    for (std::size_t r = n; r-- > 0;) {
      Rational acc = u[r];
      for (std::size_t c = r + 1; c < n; ++c)
        if (out.lower(c, r) != 0) acc -= out.lower(c, r) * v[c];
      v[r] = acc;
    }
    out.pass = false;
    out.witness_value = quadratic_form(s, v);
    out.witness = std::move(v);
    return out;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const Rational pivot = work(i, i);
    if (pivot < 0) {
      QVector u(n);
      u[i] = 1;
      return fail_with(std::move(u));
    }
    if (pivot == 0) {
      std::size_t j = i + 1;
      while (j < n && work(i, j) == 0) ++j;
      if (j < n) {
        const Rational b = work(i, j), c = work(j, j);
        QVector u(n);
        if (c < 0) {
          u[j] = 1;
        } else if (c == 0) {
          u[i] = 1;
          u[j] = -1 / b;
        } else {
          u[i] = 1;
          u[j] = -b / c;
        }
        return fail_with(std::move(u));
      }
      continue;
    }
    out.diagonal[i] = pivot;
    ++out.positive_pivots;
    for (std::size_t r = i + 1; r < n; ++r) {
      if (work(r, i) == 0) continue;
      Rational f = work(r, i) / pivot;
      out.lower(r, i) = f;
      for (std::size_t c = i + 1; c < n; ++c)
        if (work(i, c) != 0) work(r, c) -= f * work(i, c);
    }
  }
  out.pass = true;
  return out;
}

std::string to_string(const QMatrix& m) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) out << "; ";
    for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? " " : "") << to_string(m(i, j));
  }
  out << "]";
  return out.str();
}

}  // namespace cocert
