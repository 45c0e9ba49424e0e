#include "cocert/rep_lab.hpp"

#include <stdexcept>

#include "cocert/serialize.hpp"

namespace cocert {

using nlohmann::json;

namespace {

QMatrix perm_matrix(const std::vector<int>& img) {
  QMatrix p(img.size(), img.size());
  for (std::size_t i = 0; i < img.size(); ++i) p(static_cast<std::size_t>(img[i]), i) = 1;
  return p;
}

bool near(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).cwiseAbs().maxCoeff() <= 1e-12;
}

QMatrix basis_matrix(const std::vector<QVector>& basis, std::size_t dim) {
  return QMatrix::from_columns(basis, dim);
}

QMatrix shift(const QMatrix& s, const Rational& eps) {
  QMatrix out = s;
  for (std::size_t i = 0; i < s.rows(); ++i) out(i, i) -= eps;
  return out;
}

bool psd(const QMatrix& s) { return psd_check_exact(s).pass; }

}  // namespace

std::string_view provenance_name(UnitaryRep::Provenance p) {
  switch (p) {
    case UnitaryRep::Provenance::Regular: return "regular";
    case UnitaryRep::Provenance::Permutation: return "permutation";
    case UnitaryRep::Provenance::User: return "user";
  }
  return "user";
}

UnitaryRep UnitaryRep::exact(GroupPtr group, std::vector<QMatrix> generators, Provenance provenance) {
  if (generators.size() != group->rank())
    throw Error(ErrorCode::InvalidRepresentation, "expected " + std::to_string(group->rank()) +
                                                      " generator matrices, got " +
                                                      std::to_string(generators.size()));
  const std::size_t d = generators.empty() ? 1 : generators[0].rows();
  const QMatrix id = QMatrix::identity(d);
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const QMatrix& m = generators[i];
    if (m.rows() != d || m.cols() != d)
      throw Error(ErrorCode::InvalidRepresentation, "generator matrices must all be " + std::to_string(d) + "x" +
                                                        std::to_string(d));
    if (!(m.transpose() * m == id))
      throw Error(ErrorCode::InvalidRepresentation,
                  "image of generator " + group->format_letter(static_cast<int>(i) + 1) + " is not orthogonal");
  }
  auto letter = [&](int x) {
    return x > 0 ? generators[static_cast<std::size_t>(x) - 1]
                 : generators[static_cast<std::size_t>(-x) - 1].transpose();
  };
  auto bad = find_relation_violation(
      *group, id, letter, [](const QMatrix& a, const QMatrix& b) { return a * b; },
      [](const QMatrix& a, const QMatrix& b) { return a == b; });
  if (bad) throw Error(ErrorCode::InvalidRepresentation, *bad);

  UnitaryRep rep;
  rep.group_ = std::move(group);
  rep.dim_ = d;
  rep.mode_ = Mode::Exact;
  rep.provenance_ = provenance;
  rep.exact_ = std::move(generators);
  return rep;
}

UnitaryRep UnitaryRep::floating(GroupPtr group, std::vector<Eigen::MatrixXd> generators) {
  if (generators.size() != group->rank())
    throw Error(ErrorCode::InvalidRepresentation, "wrong number of generator matrices");
  const Eigen::Index d = generators.empty() ? 1 : generators[0].rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  for (const auto& m : generators)
    if (m.rows() != d || m.cols() != d || !near(m.transpose() * m, id))
      throw Error(ErrorCode::InvalidRepresentation, "generator image is not orthogonal within 1e-12");
  auto letter = [&](int x) -> Eigen::MatrixXd {
    return x > 0 ? generators[static_cast<std::size_t>(x) - 1]
                 : Eigen::MatrixXd(generators[static_cast<std::size_t>(-x) - 1].transpose());
  };
  auto bad = find_relation_violation(
      *group, id, letter, [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) -> Eigen::MatrixXd { return a * b; },
      near);
  if (bad) throw Error(ErrorCode::InvalidRepresentation, *bad);

  UnitaryRep rep;
  rep.group_ = std::move(group);
  rep.dim_ = static_cast<std::size_t>(d);
  rep.mode_ = Mode::Float;
  rep.provenance_ = Provenance::User;
  rep.float_ = std::move(generators);
  return rep;
}

void UnitaryRep::require_exact() const {
  if (mode_ != Mode::Exact)
    throw Error(ErrorCode::FloatModeUnsupported, "exact computation requested on a floating representation");
}

const QMatrix& UnitaryRep::image(const GroupElement& g) const {
  require_exact();
  if (g.group_id != group_->id()) throw Error(ErrorCode::BackendMismatch, "element of a different group");
  std::lock_guard lock(cache_->mutex);
  auto it = cache_->images.find(g.form);
  if (it != cache_->images.end()) return it->second;
  QMatrix m = QMatrix::identity(dim_);
  for (int x : group_->word_of(g))
    m = m * (x > 0 ? exact_[static_cast<std::size_t>(x) - 1] : exact_[static_cast<std::size_t>(-x) - 1].transpose());
  return cache_->images.emplace(g.form, std::move(m)).first->second;
}

Eigen::MatrixXd UnitaryRep::float_image(const GroupElement& g) const {
  if (g.group_id != group_->id()) throw Error(ErrorCode::BackendMismatch, "element of a different group");
  if (mode_ == Mode::Exact) return image(g).to_eigen();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  for (int x : group_->word_of(g))
    m = m * (x > 0 ? float_[static_cast<std::size_t>(x) - 1]
                   : Eigen::MatrixXd(float_[static_cast<std::size_t>(-x) - 1].transpose()));
  return m;
}

UnitaryRep trivial_rep(const GroupPtr& group) {
  return UnitaryRep::exact(group, std::vector<QMatrix>(group->rank(), QMatrix::identity(1)),
                           UnitaryRep::Provenance::Permutation);
}

UnitaryRep regular_rep(const GroupPtr& group) {
  const CayleyTable& table = group->cayley();
  std::vector<QMatrix> gens;
  for (std::size_t i = 1; i <= group->rank(); ++i) {
    std::size_t slot = Group::slot_of(-static_cast<int>(i));
    std::vector<int> img(table.elements.size());
    for (std::size_t h = 0; h < img.size(); ++h) img[h] = static_cast<int>(table.right_mul[h][slot]);
    gens.push_back(perm_matrix(img));
  }
  return UnitaryRep::exact(group, std::move(gens), UnitaryRep::Provenance::Regular);
}

UnitaryRep perm_rep(const GroupPtr& group, const std::vector<std::vector<int>>& images) {
  std::vector<QMatrix> gens;
  for (const auto& img : images) {
    std::vector<bool> seen(img.size(), false);
    for (int v : img) {
      if (v < 0 || static_cast<std::size_t>(v) >= img.size() || seen[static_cast<std::size_t>(v)])
        throw Error(ErrorCode::InvalidRepresentation, "generator image is not a permutation");
      seen[static_cast<std::size_t>(v)] = true;
    }
    gens.push_back(perm_matrix(img));
  }
  return UnitaryRep::exact(group, std::move(gens), UnitaryRep::Provenance::Permutation);
}

UnitaryRep quotient_rep(const GroupPtr& group, const std::string& hom) {
  const auto& q = group->descriptor().quotients;
  auto it = q.find(hom);
  if (it == q.end()) throw Error(ErrorCode::UnknownHom, "unknown homomorphism '" + hom + "'");
  return perm_rep(group, it->second);
}

QMatrix ev(const GAMatrix& a, const UnitaryRep& rho) {
  if (a.group()->id() != rho.group()->id())
    throw Error(ErrorCode::BackendMismatch, "matrix and representation live over different groups");
  if (!rho.is_exact()) throw Error(ErrorCode::FloatModeUnsupported, "exact evaluation needs an exact representation");
  const std::size_t d = rho.dim();
  QMatrix out(a.rows() * d, a.cols() * d);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (const auto& [form, c] : a.coeffs(i, j)) {
        const QMatrix& m = rho.image(GroupElement{a.group()->id(), form});
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t s = 0; s < d; ++s)
            if (m(r, s) != 0) out(i * d + r, j * d + s) += c * m(r, s);
      }
  return out;
}

Eigen::MatrixXd ev_float(const GAMatrix& a, const UnitaryRep& rho) {
  if (a.group()->id() != rho.group()->id())
    throw Error(ErrorCode::BackendMismatch, "matrix and representation live over different groups");
  const auto d = static_cast<Eigen::Index>(rho.dim());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()) * d,
                                              static_cast<Eigen::Index>(a.cols()) * d);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (const auto& [form, c] : a.coeffs(i, j))
        out.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(j) * d, d, d) +=
            to_double(c) * rho.float_image(GroupElement{a.group()->id(), form});
  return out;
}

CohomologyDims cohomology_dims(const EquivariantComplex& c, int n, const UnitaryRep& rho) {
  if (!rho.is_exact()) throw Error(ErrorCode::FloatModeUnsupported, "cohomology needs exact ranks");
  if (n < 0) throw Error(ErrorCode::DegreeOutOfRange, "negative degree " + std::to_string(n));
  if (n > c.top_degree() + 1) return {};
  const std::size_t width = c.orbit_count(n) * rho.dim();
  QMatrix b_minus = ev(c.boundary_or_empty(n - 1), rho);
  QMatrix b_plus = ev(c.boundary_or_empty(n), rho);
  CohomologyDims out;
  out.kernel = width - rank(b_plus);
  out.image = rank(b_minus);
  out.h = out.kernel - out.image;
  out.h_reduced = out.h;
  return out;
}

RationalInterval spectral_floor(const QMatrix& s, int steps) {
  return bisect(Rational(0), s.trace() + 1, steps, [&](const Rational& eps) { return psd(shift(s, eps)); });
}

RationalInterval reduced_floor(const QMatrix& s, int steps) {
  const QMatrix sq = s * s;
  return bisect(Rational(0), s.trace() + 1, steps,
                [&](const Rational& eps) { return psd(sq - eps * s); });
}

std::optional<Rational> definite_floor_bound(const QMatrix& s) {
  const std::size_t n = s.rows();
  if (n == 0) return std::nullopt;
  PsdCheck check = psd_check_exact(s);
  if (!check.pass || check.positive_pivots != n) return std::nullopt;
  Rational det = 1;
  for (const auto& d : check.diagonal) det *= d;
  Rational denom = 1;
  const Rational tr = s.trace();
  for (std::size_t i = 1; i < n; ++i) denom *= tr;
  return det / denom;
}

bool HodgeReport::all_identities_hold() const {
  if (!orthogonal || !dims_add_up) return false;
  for (const auto& [name, ok] : identities)
    if (!ok) return false;
  return true;
}

HodgeReport hodge_chain(const QMatrix& b_minus, const QMatrix& b_plus, int gap_steps) {
  if (b_minus.cols() != b_plus.rows())
    throw Error(ErrorCode::DimMismatch, "chain matrices do not compose");
  if (!(b_minus * b_plus).is_zero())
    throw Error(ErrorCode::ChainConditionViolated, "B_- B_+ is not zero");
  const std::size_t b = b_plus.rows();

  HodgeReport r;
  r.dim = b;
  r.lap_plus = b_plus * b_plus.transpose();
  r.lap_minus = b_minus.transpose() * b_minus;
  r.lap_full = r.lap_plus + r.lap_minus;

  const auto ker_d = left_nullspace(b_plus);
  const auto ker_partial = nullspace(b_minus);
  r.c_minus = orthogonalize(row_space(b_minus));
  r.c_plus = orthogonalize(column_space(b_plus));
  r.c_zero = orthogonalize(intersect(ker_d, ker_partial, b));

  r.rank_prev = r.c_minus.size();
  r.rank_next = r.c_plus.size();
  r.ker_d = ker_d.size();
  r.ker_partial = ker_partial.size();
  const auto ker_lap = nullspace(r.lap_full);
  r.ker_laplacian = ker_lap.size();
  r.h = r.ker_d - r.rank_prev;

  r.orthogonal = true;
  auto check_orth = [&](const std::vector<QVector>& x, const std::vector<QVector>& y) {
    for (const auto& u : x)
      for (const auto& v : y)
        if (dot(u, v) != 0) r.orthogonal = false;
  };
  check_orth(r.c_minus, r.c_zero);
  check_orth(r.c_minus, r.c_plus);
  check_orth(r.c_zero, r.c_plus);
  r.dims_add_up = r.c_minus.size() + r.c_zero.size() + r.c_plus.size() == b;

  std::vector<QVector> minus_and_zero = r.c_minus;
  minus_and_zero.insert(minus_and_zero.end(), r.c_zero.begin(), r.c_zero.end());
  r.identities = {
      {"ker Delta+ = ker d", same_span(nullspace(r.lap_plus), ker_d, b)},
      {"ker Delta- = ker d*", same_span(nullspace(r.lap_minus), ker_partial, b)},
      {"ker Delta = C0", same_span(ker_lap, r.c_zero, b)},
      {"ker d = (C+)^perp", same_span(ker_d, orthogonal_complement(r.c_plus, b), b)},
      {"ker d* = (C-)^perp", same_span(ker_partial, orthogonal_complement(r.c_minus, b), b)},
      {"Delta+ Delta- = 0", (r.lap_plus * r.lap_minus).is_zero()},
      {"C+ = (C- + C0)^perp", same_span(r.c_plus, orthogonal_complement(minus_and_zero, b), b)},
      {"im Delta+ = C+", same_span(column_space(r.lap_plus), r.c_plus, b)},
      {"im Delta- = C-", same_span(column_space(r.lap_minus), r.c_minus, b)},
  };

  r.gap = spectral_floor(r.lap_full, gap_steps);
  r.gap_plus = reduced_floor(r.lap_plus, gap_steps);
  r.gap_minus = reduced_floor(r.lap_minus, gap_steps);
  return r;
}

HodgeReport hodge(const EquivariantComplex& c, int n, const UnitaryRep& rho, int gap_steps) {
  if (!rho.is_exact()) throw Error(ErrorCode::FloatModeUnsupported, "Hodge decomposition needs exact arithmetic");
  return hodge_chain(ev(c.boundary_or_empty(n - 1), rho), ev(c.boundary_or_empty(n), rho), gap_steps);
}

std::vector<CriterionStatus> criteria_report(const HodgeReport& r, const Rational& epsilon) {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be a positive rational");
  const std::size_t b = r.dim;
  std::vector<CriterionStatus> out;

  out.push_back({1, r.ker_laplacian == r.h, r.ker_laplacian == r.h, false,
                 "dim ker Delta = " + std::to_string(r.ker_laplacian) + ", rank-based dim H = " +
                     std::to_string(r.h)});

  // On its own range Q - eps must be positive; the range is C- or C+.
  auto reduced_item = [&](int item, const QMatrix& q, const std::vector<QVector>& range) {
    CriterionStatus s{item, psd(q * shift(q, epsilon)), false, q.is_zero(), ""};
    bool restricted = true;
    if (!range.empty()) {
      QMatrix basis = basis_matrix(range, b);
      restricted = psd(basis.transpose() * shift(q, epsilon) * basis);
    }
    s.cross_check = s.holds == restricted;
    s.detail = s.vacuous ? "operator is zero" : "restricted to its range: " + std::string(restricted ? "pass" : "fail");
    return s;
  };
  out.push_back(reduced_item(2, r.lap_minus, r.c_minus));
  out.push_back(reduced_item(3, r.lap_plus, r.c_plus));

  CriterionStatus four{4, psd(r.lap_full * shift(r.lap_full, epsilon)), false, r.lap_full.is_zero(), ""};
  const bool split = out[1].holds && out[2].holds;
  four.cross_check = four.holds == split;
  four.detail = "items 2 and 3 jointly: " + std::string(split ? "pass" : "fail");
  out.push_back(four);

  CriterionStatus five{5, psd(shift(r.lap_full, epsilon)), false, false, ""};
  const bool rank_reading = four.holds && r.ker_laplacian == 0;
  five.cross_check = five.holds == rank_reading && (!five.holds || r.h == 0);
  five.detail = "item 4 with trivial kernel: " + std::string(rank_reading ? "pass" : "fail");
  out.push_back(five);
  return out;
}

std::vector<CriterionStatus> criteria_report(const EquivariantComplex& c, int n, const UnitaryRep& rho,
                                             const Rational& epsilon) {
  return criteria_report(hodge(c, n, rho), epsilon);
}

std::map<std::string, UnitaryRep> parse_representations(const GroupPtr& group, const json& doc) {
  std::map<std::string, UnitaryRep> out;
  if (doc.is_null()) return out;
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "representations must be an object");
  for (const auto& [name, entry] : doc.items()) {
    const std::string where = "representations." + name;
    if (!entry.is_object() || !entry.contains("kind"))
      throw Error(ErrorCode::ParseError, where + ": missing 'kind'");
    const std::string kind = entry.at("kind").get<std::string>();
    if (kind == "trivial") {
      out.emplace(name, trivial_rep(group));
    } else if (kind == "regular") {
      out.emplace(name, regular_rep(group));
    } else if (kind == "permutation") {
      if (entry.contains("quotient")) {
        out.emplace(name, quotient_rep(group, entry.at("quotient").get<std::string>()));
      } else if (entry.contains("images")) {
        out.emplace(name, perm_rep(group, entry.at("images").get<std::vector<std::vector<int>>>()));
      } else {
        throw Error(ErrorCode::ParseError, where + ": permutation needs 'quotient' or 'images'");
      }
    } else if (kind == "matrices") {
      if (!entry.contains("generators")) throw Error(ErrorCode::ParseError, where + ": missing 'generators'");
      const std::string mode = entry.value("mode", "exact");
      if (mode == "exact") {
        std::vector<QMatrix> gens;
        for (const auto& m : entry.at("generators")) gens.push_back(qmatrix_from_json(m, where));
        out.emplace(name, UnitaryRep::exact(group, std::move(gens), UnitaryRep::Provenance::User));
      } else if (mode == "float") {
        std::vector<Eigen::MatrixXd> gens;
        for (const auto& m : entry.at("generators")) {
          auto rows = m.get<std::vector<std::vector<double>>>();
          Eigen::MatrixXd e(static_cast<Eigen::Index>(rows.size()),
                            static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size()));
          for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != static_cast<std::size_t>(e.cols()))
              throw Error(ErrorCode::ParseError, where + ": ragged matrix");
            for (std::size_t j = 0; j < rows[i].size(); ++j)
              e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
          }
          gens.push_back(std::move(e));
        }
        out.emplace(name, UnitaryRep::floating(group, std::move(gens)));
      } else {
        throw Error(ErrorCode::ParseError, where + ": mode must be 'exact' or 'float'");
      }
    } else {
      throw Error(ErrorCode::ParseError, where + ": unknown kind '" + kind + "'");
    }
  }
  return out;
}

}  // namespace cocert
