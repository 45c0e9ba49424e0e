#include "cocert/star_algebra.hpp"

#include <algorithm>
#include <sstream>

namespace cocert {

namespace {

void add_term(Coeffs& c, const std::vector<int>& form, const Rational& q) {
  if (q == 0) return;
  auto [it, inserted] = c.emplace(form, q);
  if (!inserted) {
    it->second += q;
    if (it->second == 0) c.erase(it);
  }
}

void check_groups(const GroupPtr& a, const GroupPtr& b) {
  if (a.get() != b.get() && (!a || !b || a->id() != b->id()))
    throw Error(ErrorCode::BackendMismatch, "group algebra elements over different groups");
}

Coeffs convolve(const Group& g, const Coeffs& a, const Coeffs& b) {
  Coeffs out;
  for (const auto& [x, ax] : a)
    for (const auto& [y, by] : b)
      add_term(out, g.mul({g.id(), x}, {g.id(), y}).form, ax * by);
  return out;
}

Coeffs star_coeffs(const Group& g, const Coeffs& a) {
  Coeffs out;
  for (const auto& [x, ax] : a) out.emplace(g.invert({g.id(), x}).form, ax);
  return out;
}

std::vector<std::vector<int>> canonical_order(const Group& g, const Coeffs& c) {
  std::vector<std::pair<Word, std::vector<int>>> keyed;
  keyed.reserve(c.size());
  for (const auto& [form, q] : c) keyed.emplace_back(g.word_of({g.id(), form}), form);
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& l, const auto& r) { return Group::word_less(l.first, r.first); });
  std::vector<std::vector<int>> out;
  out.reserve(keyed.size());
  for (auto& [w, f] : keyed) out.push_back(std::move(f));
  return out;
}

}  // namespace

GAElem::GAElem(GroupPtr group, Coeffs coeffs) : group_(std::move(group)) {
  for (auto& [form, q] : coeffs)
    if (q != 0) coeffs_.emplace(form, std::move(q));
}

GAElem GAElem::scalar(GroupPtr group, const Rational& q) {
  GAElem out(group);
  add_term(out.coeffs_, group->identity().form, q);
  return out;
}

GAElem GAElem::delta(GroupPtr group, const GroupElement& g, const Rational& coeff) {
  if (g.group_id != group->id()) throw Error(ErrorCode::BackendMismatch, "element of a different group");
  GAElem out(std::move(group));
  add_term(out.coeffs_, g.form, coeff);
  return out;
}

GAElem GAElem::from_terms(GroupPtr group, const std::vector<std::pair<Word, Rational>>& terms) {
  GAElem out(group);
  for (const auto& [w, q] : terms) add_term(out.coeffs_, group->normalize(w).form, q);
  return out;
}

Rational GAElem::coefficient(const GroupElement& g) const {
  auto it = coeffs_.find(g.form);
  return it == coeffs_.end() ? Rational(0) : it->second;
}

std::vector<GroupElement> GAElem::support() const {
  std::vector<GroupElement> out;
  for (auto& form : canonical_order(*group_, coeffs_)) out.push_back({group_->id(), std::move(form)});
  return out;
}

GAElem GAElem::star() const { return GAElem(group_, star_coeffs(*group_, coeffs_)); }

void GAElem::check_group(const GAElem& other) const { check_groups(group_, other.group_); }

GAElem& GAElem::operator+=(const GAElem& other) {
  check_group(other);
  for (const auto& [form, q] : other.coeffs_) add_term(coeffs_, form, q);
  return *this;
}

GAElem& GAElem::operator-=(const GAElem& other) {
  check_group(other);
  for (const auto& [form, q] : other.coeffs_) add_term(coeffs_, form, -q);
  return *this;
}

GAElem GAElem::operator-() const {
  GAElem out(group_);
  for (const auto& [form, q] : coeffs_) out.coeffs_.emplace(form, -q);
  return out;
}

GAElem operator*(const GAElem& a, const GAElem& b) {
  a.check_group(b);
  GAElem out(a.group_);
  out.coeffs_ = convolve(*a.group_, a.coeffs_, b.coeffs_);
  return out;
}

GAElem operator*(const Rational& q, const GAElem& a) {
  GAElem out(a.group_);
  if (q == 0) return out;
  for (const auto& [form, c] : a.coeffs_) out.coeffs_.emplace(form, q * c);
  return out;
}

bool operator==(const GAElem& a, const GAElem& b) {
  check_groups(a.group_, b.group_);
  return a.coeffs_ == b.coeffs_;
}

std::string GAElem::str() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& form : canonical_order(*group_, coeffs_)) {
    Rational q = coeffs_.at(form);
    GroupElement g{group_->id(), form};
    bool negative = q < 0;
    Rational mag = negative ? Rational(-q) : q;
    if (first)
      out << (negative ? "-" : "");
    else
      out << (negative ? " - " : " + ");
    first = false;
    if (group_->is_identity(g)) {
      out << to_string(mag);
    } else {
      if (mag != 1) out << to_string(mag) << "*";
      out << group_->format(g);
    }
  }
  return out.str();
}

GAElem ga_mul(const GAElem& a, const GAElem& b) { return a * b; }
GAElem ga_star(const GAElem& a) { return a.star(); }

GAMatrix::GAMatrix(GroupPtr group, std::size_t rows, std::size_t cols)
    : group_(std::move(group)), rows_(rows), cols_(cols), entries_(rows * cols) {}

GAMatrix GAMatrix::identity(GroupPtr group, std::size_t k) {
  GAMatrix out(group, k, k);
  for (std::size_t i = 0; i < k; ++i) out.set(i, i, GAElem::one(group));
  return out;
}

GAMatrix GAMatrix::from_elem(const GAElem& a) {
  GAMatrix out(a.group(), 1, 1);
  out.set(0, 0, a);
  return out;
}

GAElem GAMatrix::at(std::size_t i, std::size_t j) const { return GAElem(group_, entries_[i * cols_ + j]); }

void GAMatrix::set(std::size_t i, std::size_t j, const GAElem& value) {
  check_groups(group_, value.group());
  entries_[i * cols_ + j] = value.coeffs();
}

void GAMatrix::add_to(std::size_t i, std::size_t j, const GAElem& value) {
  check_groups(group_, value.group());
  for (const auto& [form, q] : value.coeffs()) add_term(entries_[i * cols_ + j], form, q);
}

GAMatrix GAMatrix::star() const {
  GAMatrix out(group_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out.entries_[j * rows_ + i] = star_coeffs(*group_, coeffs(i, j));
  return out;
}

bool GAMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Coeffs& c) { return c.empty(); });
}

std::size_t GAMatrix::support_radius() const {
  std::size_t r = 0;
  for (const auto& c : entries_)
    for (const auto& [form, q] : c) r = std::max(r, group_->word_length({group_->id(), form}));
  return r;
}

bool operator==(const GAMatrix& a, const GAMatrix& b) {
  check_groups(a.group_, b.group_);
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
}

std::string GAMatrix::str() const {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i) out << "; ";
    for (std::size_t j = 0; j < cols_; ++j) out << (j ? ", " : "") << at(i, j).str();
  }
  out << "]";
  return out.str();
}

GAMatrix mat_mul(const GAMatrix& a, const GAMatrix& b) {
  check_groups(a.group(), b.group());
  if (a.cols() != b.rows())
    throw Error(ErrorCode::DimMismatch, "mat_mul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                            " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  const Group& g = *a.group();
  GAMatrix out(a.group(), a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Coeffs acc;
      for (std::size_t l = 0; l < a.cols(); ++l)
        for (const auto& [form, q] : convolve(g, a.coeffs(i, l), b.coeffs(l, j))) add_term(acc, form, q);
      out.set(i, j, GAElem(a.group(), std::move(acc)));
    }
  return out;
}

namespace {

GAMatrix combine(const GAMatrix& a, const GAMatrix& b, const Rational& sign) {
  check_groups(a.group(), b.group());
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimMismatch, "matrix shapes differ");
  GAMatrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.add_to(i, j, sign * b.at(i, j));
  return out;
}

}  // namespace

GAMatrix mat_add(const GAMatrix& a, const GAMatrix& b) { return combine(a, b, Rational(1)); }
GAMatrix mat_sub(const GAMatrix& a, const GAMatrix& b) { return combine(a, b, Rational(-1)); }

GAMatrix mat_scale(const Rational& q, const GAMatrix& a) {
  GAMatrix out(a.group(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.set(i, j, q * a.at(i, j));
  return out;
}

GAMatrix mat_star(const GAMatrix& a) { return a.star(); }

bool is_hermitian(const GAMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimMismatch, "is_hermitian needs a square matrix");
  return a.star() == a;
}

std::vector<GAMatrix> rect_sos(const GAMatrix& x) {
  std::vector<GAMatrix> out;
  out.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    GAMatrix y(x.group(), x.cols(), x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) y.set(0, j, x.at(i, j));
    out.push_back(std::move(y));
  }
  return out;
}

std::vector<GAMatrix> expand_weighted_sos(const std::vector<WeightedTerm>& terms, std::size_t max_terms) {
  std::vector<GAMatrix> out;
  for (const auto& term : terms) {
    if (term.weight <= 0)
      throw Error(ErrorCode::NonpositiveWeight, "weight " + to_string(term.weight) + " is not positive");
    Rational root;
    if (is_rational_square(term.weight, root)) {
      if (out.size() + 1 > max_terms) throw Error(ErrorCode::SizeCapExceeded, "expansion exceeds term cap");
      out.push_back(mat_scale(root, term.y));
      continue;
    }
    Integer p = numerator_of(term.weight), q = denominator_of(term.weight);
    Integer copies = p * q;
    if (copies > Integer(max_terms - out.size()))
      throw Error(ErrorCode::SizeCapExceeded, "expanding weight " + to_string(term.weight) + " needs " +
                                                  copies.str() + " squares");
    GAMatrix scaled = mat_scale(Rational(Integer(1), q), term.y);
    for (Integer c = 0; c < copies; ++c) out.push_back(scaled);
  }
  return out;
}

GAMatrix sum_of_squares(GroupPtr group, std::size_t cols, const std::vector<GAMatrix>& xs) {
  GAMatrix acc(group, cols, cols);
  for (const auto& x : xs) acc = mat_add(acc, mat_mul(x.star(), x));
  return acc;
}

GAMatrix weighted_sum_of_squares(GroupPtr group, std::size_t cols, const std::vector<WeightedTerm>& terms) {
  GAMatrix acc(group, cols, cols);
  for (const auto& t : terms) acc = mat_add(acc, mat_scale(t.weight, mat_mul(t.y.star(), t.y)));
  return acc;
}

}  // namespace cocert
