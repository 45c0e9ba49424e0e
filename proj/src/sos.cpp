#include "cocert/sos.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <tuple>

#include "cocert/numeric.hpp"
#include "cocert/serialize.hpp"

namespace cocert {

using nlohmann::json;

std::string_view target_kind_name(TargetKind kind) { return kind == TargetKind::Gap ? "gap" : "reduced"; }

std::string_view part_name(LaplacianPart part) {
  switch (part) {
    case LaplacianPart::Full: return "full";
    case LaplacianPart::Plus: return "plus";
    case LaplacianPart::Minus: return "minus";
  }
  return "full";
}

namespace {

GAMatrix target_lhs(TargetKind kind, const GAMatrix& base, const Rational& eps) {
  if (kind == TargetKind::Gap) return mat_sub(base, mat_scale(eps, GAMatrix::identity(base.group(), base.rows())));
  return mat_sub(mat_mul(base, base), mat_scale(eps, base));
}

void require_hermitian(const GAMatrix& base) {
  if (base.rows() != base.cols() || !is_hermitian(base))
    throw Error(ErrorCode::NotSymmetric, "target matrix is not Hermitian");
}

SosTarget make_target(TargetKind kind, const GAMatrix& base, const Rational& eps, json provenance) {
  require_hermitian(base);
  if (kind == TargetKind::Gap && eps <= 0) throw std::invalid_argument("gap targets need epsilon > 0");
  if (kind == TargetKind::Reduced && eps < 0) throw std::invalid_argument("reducedness targets need epsilon >= 0");
  return {kind, base, eps, target_lhs(kind, base, eps), std::move(provenance)};
}

Rational identity_coeff(const GAMatrix& m, std::size_t i) {
  return m.at(i, i).coefficient(m.group()->identity());
}

std::optional<std::size_t> small_order(const Group& group, std::size_t limit) {
  if (group.kind() == Group::Kind::Free) return std::nullopt;
  std::size_t prev = 0;
  for (std::size_t r = 0;; ++r) {
    std::size_t size = 0;
    try {
      size = group.ball(r).size();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SizeCapExceeded) return std::nullopt;
      throw;
    }
    if (size == prev) return size;
    if (size > limit) return std::nullopt;
    prev = size;
  }
}

// Orthonormal numeric basis of the complement of the forced kernel, as columns.
Eigen::MatrixXd complement_basis(const ConstraintSystem& system) {
  const std::size_t n = system.size();
  auto basis = orthogonalize(orthogonal_complement(system.kernel, n));
  Eigen::MatrixXd w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double(basis[j][i]);
    w.col(static_cast<Eigen::Index>(j)).normalize();
  }
  return w;
}

std::vector<QVector> kernel_vectors(const QMatrix& ev_lhs, const std::vector<GroupElement>& support, std::size_t k,
                                    const UnitaryRep& rho) {
  const std::size_t d = rho.dim();
  std::vector<QVector> out;
  for (const QVector& u : nullspace(ev_lhs)) {
    for (std::size_t i = 0; i < d; ++i) {
      QVector v(support.size() * k);
      for (std::size_t a = 0; a < support.size(); ++a) {
        const QMatrix& m = rho.image(support[a]);
        for (std::size_t q = 0; q < k; ++q) {
          Rational acc = 0;
          for (std::size_t s = 0; s < d; ++s)
            if (m(i, s) != 0) acc += m(i, s) * u[q * d + s];
          v[a * k + q] = acc;
        }
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace

SosTarget make_gap_target(const GAMatrix& base, const Rational& epsilon, json provenance) {
  return make_target(TargetKind::Gap, base, epsilon, std::move(provenance));
}

SosTarget make_reducedness_target(const GAMatrix& q, const Rational& epsilon, json provenance) {
  return make_target(TargetKind::Reduced, q, epsilon, std::move(provenance));
}

SosTarget make_gap_target(const EquivariantComplex& c, int n, const Rational& epsilon) {
  return make_gap_target(c.laplacian(n).full, epsilon, {{"degree", n}, {"part", "full"}});
}

SosTarget make_reducedness_target(const EquivariantComplex& c, int n, LaplacianPart which, const Rational& epsilon) {
  if (n < 0 || n > c.top_degree())
    throw Error(ErrorCode::DegreeOutOfRange, "reducedness targets need 0 <= n <= " + std::to_string(c.top_degree()));
  Laplacians lap = c.laplacian(n);
  const GAMatrix& q = which == LaplacianPart::Full ? lap.full : which == LaplacianPart::Plus ? lap.plus : lap.minus;
  return make_reducedness_target(q, epsilon, {{"degree", n}, {"part", std::string(part_name(which))}});
}

std::vector<GroupElement> canonical_support(const Group& group, std::vector<GroupElement> elements) {
  elements.push_back(group.identity());
  std::vector<std::pair<Word, GroupElement>> keyed;
  for (auto& g : elements) keyed.emplace_back(group.word_of(g), std::move(g));
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& x, const auto& y) { return Group::word_less(x.first, y.first); });
  std::vector<GroupElement> out;
  for (auto& [w, g] : keyed)
    if (out.empty() || out.back() != g) out.push_back(std::move(g));
  return out;
}

bool is_canonical_support(const Group& group, const std::vector<GroupElement>& support) {
  if (support.empty() || !group.is_identity(support[0])) return false;
  for (std::size_t i = 1; i < support.size(); ++i)
    if (!Group::word_less(group.word_of(support[i - 1]), group.word_of(support[i]))) return false;
  return true;
}

Rational ConstraintSystem::trace() const {
  Rational t = 0;
  for (const auto& c : classes)
    if (c.p == c.q && group->is_identity(c.h)) t += c.target;
  return t;
}

ConstraintSystem constraints(const GAMatrix& lhs, const std::vector<GroupElement>& support) {
  if (lhs.rows() != lhs.cols()) throw Error(ErrorCode::DimMismatch, "target must be square");
  const GroupPtr& group = lhs.group();
  for (const auto& g : support)
    if (g.group_id != group->id()) throw Error(ErrorCode::BackendMismatch, "support element of a different group");
  if (!is_canonical_support(*group, support))
    throw Error(ErrorCode::InvalidSupport, "support must be duplicate-free, canonically ordered and contain e");

  ConstraintSystem sys;
  sys.group = group;
  sys.k = lhs.rows();
  sys.support = support;
  const std::size_t m = support.size(), k = sys.k, n = m * k;

  std::vector<GroupElement> inv;
  for (const auto& a : support) inv.push_back(group->invert(a));
  std::vector<GroupElement> quot(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) quot[a * m + b] = group->mul(inv[a], support[b]);

  std::map<std::tuple<std::size_t, std::size_t, std::vector<int>>, std::size_t> lookup;
  sys.class_of.assign(n * n, 0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t b = 0; b < m; ++b)
        for (std::size_t q = 0; q < k; ++q) {
          const GroupElement& h = quot[a * m + b];
          auto key = std::make_tuple(p, q, h.form);
          auto it = lookup.find(key);
          if (it == lookup.end()) {
            it = lookup.emplace(key, sys.classes.size()).first;
            ConstraintClass c;
            c.p = p;
            c.q = q;
            c.h = h;
            c.target = lhs.at(p, q).coefficient(h);
            sys.classes.push_back(std::move(c));
          }
          const std::size_t i = sys.index(a, p), j = sys.index(b, q);
          sys.classes[it->second].entries.emplace_back(i, j);
          sys.class_of[i * n + j] = it->second;
        }

  for (auto& c : sys.classes) c.mirror = lookup.at(std::make_tuple(c.q, c.p, group->invert(c.h).form));

  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t q = 0; q < k; ++q)
      for (const auto& [form, coeff] : lhs.coeffs(p, q))
        if (!lookup.count(std::make_tuple(p, q, form)))
          throw Error(ErrorCode::SupportTooSmall,
                      "coefficient of " + group->format({group->id(), form}) + " in entry (" + std::to_string(p) +
                          ", " + std::to_string(q) + ") is not of the form a^-1 b with a, b in the support");
  return sys;
}

std::vector<QVector> forced_kernel(const GAMatrix& lhs, const std::vector<GroupElement>& support,
                                   const UnitaryRep& rho) {
  return kernel_vectors(ev(lhs, rho), support, lhs.rows(), rho);
}

void add_forced_kernel(ConstraintSystem& system, const std::vector<QVector>& vectors) {
  if (vectors.empty()) return;
  std::vector<QVector> all = system.kernel;
  all.insert(all.end(), vectors.begin(), vectors.end());
  system.kernel = orthogonalize(all);
}

GAMatrix reconstruct(const GroupPtr& group, const std::vector<GroupElement>& support, std::size_t k,
                     const QMatrix& gram) {
  const std::size_t m = support.size();
  if (gram.rows() != m * k || gram.cols() != m * k)
    throw Error(ErrorCode::DimMismatch, "Gram matrix size does not match support and k");
  std::vector<GroupElement> inv;
  for (const auto& a : support) inv.push_back(group->invert(a));
  std::vector<Coeffs> acc(k * k);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const std::vector<int> h = group->mul(inv[a], support[b]).form;
      for (std::size_t p = 0; p < k; ++p)
        for (std::size_t q = 0; q < k; ++q) {
          const Rational& v = gram(a * k + p, b * k + q);
          if (v != 0) acc[p * k + q][h] += v;
        }
    }
  GAMatrix out(group, k, k);
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t q = 0; q < k; ++q) out.set(p, q, GAElem(group, std::move(acc[p * k + q])));
  return out;
}

GAMatrix reconstruct(const ConstraintSystem& system, const QMatrix& gram) {
  return reconstruct(system.group, system.support, system.k, gram);
}

void project_affine(const ConstraintSystem& system, Eigen::MatrixXd& q) {
  std::vector<double> sums(system.classes.size(), 0.0);
  const std::size_t n = system.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      sums[system.class_of[i * n + j]] += q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  for (std::size_t c = 0; c < sums.size(); ++c)
    sums[c] = (to_double(system.classes[c].target) - sums[c]) / static_cast<double>(system.classes[c].entries.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += sums[system.class_of[i * n + j]];
}

double affine_residual(const ConstraintSystem& system, const Eigen::MatrixXd& q) {
  std::vector<double> sums(system.classes.size(), 0.0);
  const std::size_t n = system.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      sums[system.class_of[i * n + j]] += q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  double r = 0;
  for (std::size_t c = 0; c < sums.size(); ++c) {
    const double d = sums[c] - to_double(system.classes[c].target);
    r += d * d;
  }
  return std::sqrt(r);
}

SolveResult solve_numeric(const ConstraintSystem& system, const SolveOptions& opts) {
  const auto n = static_cast<Eigen::Index>(system.size());
  const bool reduced = !system.kernel.empty();
  const Eigen::MatrixXd w = reduced ? complement_basis(system) : Eigen::MatrixXd::Identity(n, n);
  const Eigen::Index m = w.cols();

  double scale = to_double(system.trace()) / static_cast<double>(std::max<Eigen::Index>(n, 1));
  if (!(scale > 0)) scale = 1.0;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> noise(0.0, 1e-2 * scale);
  Eigen::MatrixXd x = scale * Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      const double e = noise(rng);
      x(i, j) += e;
      if (i != j) x(j, i) += e;
    }

  SolveResult out;
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(m, m);  // warm start for Jacobi
  double checkpoint = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= std::max(opts.max_iters, 1); ++it) {
    project_affine(system, x);
    x = 0.5 * (x + x.transpose());

    // Rotating into the previous eigenbasis leaves Jacobi a nearly diagonal matrix.
    const Eigen::MatrixXd y = basis.transpose() * (w.transpose() * x * w) * basis;
    SymmetricEigen eig = jacobi_eigen(y);
    basis = basis * eig.vectors;
    out.min_eig = m > 0 ? eig.values(0) : 0.0;
    Eigen::VectorXd clipped = eig.values.cwiseMax(opts.floor);
    const Eigen::MatrixXd wb = w * basis;
    x = wb * clipped.asDiagonal() * wb.transpose();

    out.iterations = it;
    out.residual = affine_residual(system, x);
    if (out.residual < opts.tol) {
      out.converged = true;
      break;
    }
    if (it % 50 == 0) {
      if (out.residual > 0.999 * checkpoint) break;
      checkpoint = out.residual;
    }
  }
  out.q = std::move(x);
  return out;
}

std::optional<QMatrix> round_project(const Eigen::MatrixXd& qf, const ConstraintSystem& system,
                                     const Integer& bound) {
  const std::size_t n = system.size();
  auto round = [&](double v) { return limit_denominator(from_double(v), bound); };

  if (system.kernel.empty()) {
    QMatrix q(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        q(i, j) = round(0.5 * (qf(ii, jj) + qf(jj, ii)));
        q(j, i) = q(i, j);
      }
    for (const auto& c : system.classes) {
      Rational sum = 0;
      for (const auto& [i, j] : c.entries) sum += q(i, j);
      const Rational shift = (c.target - sum) / static_cast<long>(c.entries.size());
      if (shift == 0) continue;
      for (const auto& [i, j] : c.entries) q(i, j) += shift;
    }
    return q;
  }

  // Q = W S W^T with W an exact orthogonal basis of the kernel's complement.
  const auto basis = orthogonalize(orthogonal_complement(system.kernel, n));
  const std::size_t m = basis.size();
  const QMatrix w = QMatrix::from_columns(basis, n);
  if (m == 0) {
    QMatrix zero(n, n);
    for (const auto& c : system.classes)
      if (c.target != 0) return std::nullopt;
    return zero;
  }

  Eigen::MatrixXd wf = w.to_eigen();
  Eigen::VectorXd norms = wf.colwise().squaredNorm().transpose();
  Eigen::MatrixXd s0f = (wf.transpose() * qf * wf).array() / (norms * norms.transpose()).array();

  const std::size_t unknowns = m * (m + 1) / 2;
  auto unknown = [&](std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    return a * m - a * (a - 1) / 2 + (b - a);
  };
  QVector s0(unknowns);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a; b < m; ++b)
      s0[unknown(a, b)] = round(0.5 * (s0f(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +
                                       s0f(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a))));

  // One row per mirror pair; symmetry of S makes the mirror row redundant.
  std::vector<QVector> rows;
  QVector rhs;
  for (std::size_t ci = 0; ci < system.classes.size(); ++ci) {
    const auto& c = system.classes[ci];
    if (c.mirror < ci) continue;
    QMatrix g(m, m);
    for (const auto& [i, j] : c.entries)
      for (std::size_t a = 0; a < m; ++a) {
        if (w(i, a) == 0) continue;
        for (std::size_t b = 0; b < m; ++b)
          if (w(j, b) != 0) g(a, b) += w(i, a) * w(j, b);
      }
    QVector row(unknowns);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a; b < m; ++b) row[unknown(a, b)] = a == b ? g(a, a) : g(a, b) + g(b, a);
    rows.push_back(std::move(row));
    rhs.push_back(c.target);
  }
  const QMatrix a = QMatrix::from_rows(rows, unknowns);
  QVector r = mat_vec(a, s0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
  auto lambda = solve(a * a.transpose(), r);
  if (!lambda) return std::nullopt;
  const QVector correction = vec_mat(*lambda, a);

  QMatrix s(m, m);
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = x; y < m; ++y) {
      s(x, y) = s0[unknown(x, y)] + correction[unknown(x, y)];
      s(y, x) = s(x, y);
    }
  return w * s * w.transpose();
}

std::vector<WeightedTerm> gram_to_weighted_sos(const GroupPtr& group, const std::vector<GroupElement>& support,
                                               std::size_t k, const QMatrix& gram) {
  PsdCheck check = psd_check_exact(gram);
  if (!check.pass)
    throw Error(ErrorCode::NotPsd, "Gram matrix is not PSD: witness value " + to_string(check.witness_value));
  std::vector<WeightedTerm> out;
  for (std::size_t j = 0; j < gram.rows(); ++j) {
    if (check.diagonal[j] == 0) continue;
    GAMatrix y(group, 1, k);
    for (std::size_t a = 0; a < support.size(); ++a)
      for (std::size_t q = 0; q < k; ++q) {
        const Rational& l = check.lower(a * k + q, j);
        if (l != 0) y.add_to(0, q, GAElem::delta(group, support[a], l));
      }
    out.push_back({check.diagonal[j], std::move(y)});
  }
  return out;
}

std::string lhs_hash(const SosTarget& target) {
  json doc = {{"group", group_descriptor_to_json(target.lhs.group()->descriptor())},
              {"kind", std::string(target_kind_name(target.kind))},
              {"epsilon", to_string(target.epsilon)},
              {"lhs", ga_matrix_to_json(target.lhs)}};
  return sha256_hex(doc.dump());
}

VerifyResult verify(const Certificate& cert) {
  const SosTarget& t = cert.target;
  const GroupPtr& group = t.lhs.group();
  if (!group || t.lhs.rows() != t.lhs.cols()) throw Error(ErrorCode::MalformedCert, "target must be square");
  const std::size_t k = t.lhs.rows();
  if (cert.support.empty() || !is_canonical_support(*group, cert.support))
    throw Error(ErrorCode::MalformedCert, "support must be duplicate-free, canonically ordered and contain e");
  for (const auto& g : cert.support)
    if (g.group_id != group->id()) throw Error(ErrorCode::MalformedCert, "support element of a different group");
  if (!cert.gram && !cert.weighted) throw Error(ErrorCode::MalformedCert, "certificate carries no evidence");

  VerifyResult out;
  auto reject = [&](std::string why) {
    out.accept = false;
    out.reason = std::move(why);
    return out;
  };

  if (!(target_lhs(t.kind, t.base, t.epsilon) == t.lhs)) return reject("lhs does not match base and epsilon");
  out.hash_ok = lhs_hash(t) == cert.lhs_hash;
  if (!out.hash_ok) return reject("lhs hash mismatch");

  if (cert.gram) {
    const QMatrix& q = *cert.gram;
    out.gram_size = q.rows();
    if (q.rows() != cert.support.size() * k || q.cols() != q.rows())
      throw Error(ErrorCode::MalformedCert, "Gram matrix must be (|E| k) x (|E| k)");
    if (!q.is_symmetric()) return reject("Gram matrix is not symmetric");
    if (!(reconstruct(group, cert.support, k, q) == t.lhs)) return reject("Gram reconstruction differs from lhs");
    PsdCheck check = psd_check_exact(q);
    if (!check.pass) return reject("Gram matrix is not PSD: v^T Q v = " + to_string(check.witness_value));
    out.positive_pivots = check.positive_pivots;
  }
  if (cert.weighted) {
    out.weighted_terms = cert.weighted->size();
    for (const auto& term : *cert.weighted) {
      if (term.y.rows() != 1 || term.y.cols() != k || !term.y.group() || term.y.group()->id() != group->id())
        throw Error(ErrorCode::MalformedCert, "weighted terms must be 1 x k over the target group");
      if (term.weight <= 0) return reject("nonpositive weight " + to_string(term.weight));
    }
    if (!(weighted_sum_of_squares(group, k, *cert.weighted) == t.lhs))
      return reject("weighted sum of squares differs from lhs");
  }
  out.residual_zero = true;
  out.accept = true;
  out.reason = "exact identity holds";
  return out;
}

json certificate_to_json(const Certificate& cert) {
  const SosTarget& t = cert.target;
  const Group& group = *t.lhs.group();
  json support = json::array();
  for (const auto& g : cert.support) support.push_back(group.word_of(g));
  json doc = {{"format", "cocert-certificate/1"},
              {"group", group_descriptor_to_json(group.descriptor())},
              {"target",
               {{"kind", std::string(target_kind_name(t.kind))},
                {"epsilon", to_string(t.epsilon)},
                {"base", ga_matrix_to_json(t.base)},
                {"lhs_hash", cert.lhs_hash},
                {"provenance", t.provenance}}},
              {"k", t.lhs.rows()},
              {"support", support}};
  if (cert.gram) doc["gram"] = qmatrix_to_json(*cert.gram);
  if (cert.weighted) {
    json terms = json::array();
    for (const auto& term : *cert.weighted)
      terms.push_back({{"weight", to_string(term.weight)}, {"y", ga_matrix_to_json(term.y)}});
    doc["weighted_sos"] = terms;
  }
  return doc;
}

Certificate certificate_from_json(const json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", "") != "cocert-certificate/1")
      throw Error(ErrorCode::MalformedCert, "missing or unknown 'format'");
    GroupPtr group = Group::create(parse_group_descriptor(doc.at("group")));
    const json& t = doc.at("target");
    const std::string kind = t.at("kind").get<std::string>();
    if (kind != "gap" && kind != "reduced") throw Error(ErrorCode::MalformedCert, "unknown target kind '" + kind + "'");
    Certificate cert;
    cert.target = make_target(kind == "gap" ? TargetKind::Gap : TargetKind::Reduced,
                              ga_matrix_from_json(group, t.at("base"), "target.base"),
                              parse_rational_json(t.at("epsilon"), "target.epsilon"),
                              t.value("provenance", json::object()));
    cert.lhs_hash = t.at("lhs_hash").get<std::string>();
    const std::size_t k = doc.at("k").get<std::size_t>();
    if (k != cert.target.lhs.rows()) throw Error(ErrorCode::MalformedCert, "k does not match the target");
    for (const auto& w : doc.at("support")) cert.support.push_back(group->normalize(parse_word(w, "support")));
    if (doc.contains("gram")) cert.gram = qmatrix_from_json(doc.at("gram"), "gram");
    if (doc.contains("weighted_sos")) {
      std::vector<WeightedTerm> terms;
      for (const auto& term : doc.at("weighted_sos"))
        terms.push_back({parse_rational_json(term.at("weight"), "weighted_sos.weight"),
                         ga_matrix_from_json(group, term.at("y"), "weighted_sos.y")});
      cert.weighted = std::move(terms);
    }
    return cert;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedCert) throw;
    throw Error(ErrorCode::MalformedCert, std::string(error_name(e.code())) + ": " + e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedCert, e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::MalformedCert, e.what());
  }
}

FindResult find_certificate(TargetKind kind, const GAMatrix& base, const FindOptions& opts, json provenance) {
  require_hermitian(base);
  const GroupPtr& group = base.group();
  const std::size_t k = base.rows();

  std::vector<UnitaryRep> owned;
  owned.push_back(trivial_rep(group));
  if (small_order(*group, opts.regular_rep_limit)) owned.push_back(regular_rep(group));
  std::vector<std::pair<std::string, const UnitaryRep*>> reps;
  reps.emplace_back("trivial", &owned[0]);
  if (owned.size() > 1) reps.emplace_back("regular", &owned[1]);
  for (std::size_t i = 0; i < opts.reps.size(); ++i)
    if (opts.reps[i]->is_exact() && opts.reps[i]->group()->id() == group->id())
      reps.emplace_back("declared #" + std::to_string(i), opts.reps[i]);

  // lhs = a - eps b
  const GAMatrix a = kind == TargetKind::Gap ? base : mat_mul(base, base);
  const GAMatrix b = kind == TargetKind::Gap ? GAMatrix::identity(group, k) : base;

  FindResult result;
  if (opts.support) {
    result.support = canonical_support(*group, *opts.support);
  } else {
    const std::size_t radius = std::max(a.support_radius(), b.support_radius());
    result.support = canonical_support(*group, group->ball(opts.radius.value_or((radius + 1) / 2)));
  }
  const std::vector<GroupElement>& support = result.support;

  auto pipeline = [&](const Rational& eps) -> std::optional<Certificate> {
    SosTarget target = make_target(kind, base, eps, provenance);
    ConstraintSystem sys = constraints(target.lhs, support);
    SolveOptions so{opts.max_iters, opts.tol, opts.seed, 0.0};

    for (const auto& [name, rho] : reps) {
      QMatrix m = ev(target.lhs, *rho);
      PsdCheck check = psd_check_exact(m);
      if (!check.pass) {
        so.max_iters = std::min(opts.max_iters, 200);
        SolveResult diag = solve_numeric(sys, so);
        result.attempts.push_back({eps, "OBSTRUCTED", diag.residual, diag.min_eig,
                                   "under the " + name + " representation v^T ev(lhs) v = " +
                                       to_string(check.witness_value) + " < 0"});
        return std::nullopt;
      }
      add_forced_kernel(sys, kernel_vectors(m, support, k, *rho));
    }

    double scale = to_double(sys.trace()) / static_cast<double>(sys.size());
    if (!(scale > 0)) scale = 1.0;
    for (double factor : {1e-2, 1e-3, 1e-5, 0.0}) {
      so.floor = factor * scale;
      SolveResult res = solve_numeric(sys, so);
      std::string status = "NOT_PSD";
      for (Integer bound = opts.denominator_bound; bound <= opts.max_denominator_bound; bound *= 2) {
        auto q = round_project(res.q, sys, bound);
        if (!q) {
          status = "INCONSISTENT";
          break;
        }
        if (!psd_check_exact(*q).pass) continue;
        Certificate cert;
        cert.target = target;
        cert.support = support;
        cert.gram = *q;
        if (opts.weighted_evidence) cert.weighted = gram_to_weighted_sos(group, support, k, *q);
        cert.lhs_hash = lhs_hash(target);
        VerifyResult vr = verify(cert);
        if (vr.accept) {
          result.attempts.push_back({eps, "ACCEPT", res.residual, res.min_eig,
                                     "floor " + std::to_string(so.floor) + ", denominators <= " + bound.str()});
          return cert;
        }
      }
      result.attempts.push_back({eps, status, res.residual, res.min_eig,
                                 "floor " + std::to_string(so.floor) + ", " + std::to_string(res.iterations) +
                                     " iterations"});
    }
    return std::nullopt;
  };

  if (opts.epsilon) {
    result.certificate = pipeline(*opts.epsilon);
    return result;
  }

  // A feasible Gram matrix has nonnegative diagonal classes, bounding eps.
  std::optional<Rational> upper;
  for (std::size_t p = 0; p < k; ++p) {
    const Rational bp = identity_coeff(b, p);
    if (bp <= 0) continue;
    const Rational cand = identity_coeff(a, p) / bp;
    if (!upper || cand < *upper) upper = cand;
  }
  if (!upper) upper = Rational(1);
  if (*upper <= 0) {
    result.attempts.push_back({*upper, "NO_RANGE", 0, 0, "diagonal coefficients leave no positive epsilon"});
    return result;
  }
  Rational lo = 0, hi = *upper;
  for (int step = 0; step < opts.bisection_steps; ++step) {
    const Rational mid = (lo + hi) / 2;
    if (auto cert = pipeline(mid)) {
      result.certificate = std::move(cert);
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return result;
}

}  // namespace cocert
