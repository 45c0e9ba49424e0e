#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cocert/rep_lab.hpp"
#include "oracles.hpp"

using namespace cocert;
using nlohmann::json;

namespace {

json load(const std::string& name) { return json::parse(oracle::read_file(std::string(COCERT_DATA_DIR) + "/" + name)); }

template <class Rng>
GAMatrix random_matrix(Rng& rng, const GroupPtr& g, std::size_t rows, std::size_t cols) {
  GAMatrix m(g, rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      std::vector<std::pair<Word, Rational>> terms;
      for (int t = 0; t < 3; ++t) terms.push_back({oracle::random_word(rng, g->rank(), 3), oracle::random_rational(rng, 4, 3)});
      m.set(i, j, GAElem::from_terms(g, terms));
    }
  return m;
}

QMatrix kron(const QMatrix& a, const QMatrix& b) {
  QMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t s = 0; s < b.cols(); ++s) out(i * b.rows() + r, j * b.cols() + s) = a(i, j) * b(r, s);
  return out;
}

QMatrix block_diag(const QMatrix& a, const QMatrix& b) {
  QMatrix out(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, a.cols() + j) = b(i, j);
  return out;
}

// Permutation matrix sending index i*d + r to r*k + i.
QMatrix interleave(std::size_t k, std::size_t d) {
  QMatrix p(k * d, k * d);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t r = 0; r < d; ++r) p(r * k + i, i * d + r) = 1;
  return p;
}

// Rational coefficient matrix of a GAMatrix at a fixed group element.
QMatrix coefficient_matrix(const GAMatrix& a, const GroupElement& g) {
  QMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a.at(i, j).coefficient(g);
  return out;
}

}  // namespace

TEST_CASE("standard representations") {
  GroupDescriptor d;
  d.kind = GroupDescriptor::Kind::FinitePermutation;
  d.generators = {"a"};
  d.permutations = {{1, 2, 0}};
  d.degree = 3;
  auto z3 = Group::create(d);
  auto reg = regular_rep(z3);
  CHECK(reg.dim() == 3);
  CHECK(reg.provenance() == UnitaryRep::Provenance::Regular);
  const QMatrix& p = reg.exact_generators()[0];
  CHECK(p.transpose() * p == QMatrix::identity(3));
  CHECK(p * p * p == QMatrix::identity(3));
  CHECK(p != QMatrix::identity(3));

  auto triv = trivial_rep(z3);
  CHECK(triv.dim() == 1);
  CHECK(triv.exact_generators()[0] == QMatrix::identity(1));

  auto s3 = Group::create(oracle::permutation_descriptor(oracle::small_groups()[6]));
  auto reg6 = regular_rep(s3);
  CHECK(reg6.dim() == 6);
  // Regular image of g is a permutation matrix with no fixed points unless g = e.
  for (const auto& g : s3->enumerate()) {
    const QMatrix& m = reg6.image(g);
    CHECK(m.trace() == (s3->is_identity(g) ? 6 : 0));
    for (const auto& h : s3->enumerate()) CHECK(reg6.image(s3->mul(g, h)) == m * reg6.image(h));
  }

  GroupDescriptor free;
  free.generators = {"t"};
  auto z = Group::create(free);
  try {
    regular_rep(z);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotFiniteUnderCap);
  }
}

TEST_CASE("invalid representations are rejected") {
  auto s3 = Group::create(oracle::permutation_descriptor(oracle::small_groups()[6]));
  // r of order 3 cannot go to -1.
  try {
    UnitaryRep::exact(s3, {QMatrix::from_rows({{-1}}, 1), QMatrix::from_rows({{-1}}, 1)},
                      UnitaryRep::Provenance::User);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidRepresentation);
  }
  CHECK_THROWS_AS(UnitaryRep::exact(s3, {QMatrix::from_rows({{2}}, 1), QMatrix::from_rows({{1}}, 1)},
                                    UnitaryRep::Provenance::User),
                  Error);
  CHECK_NOTHROW(UnitaryRep::exact(s3, {QMatrix::from_rows({{-1}}, 1), QMatrix::from_rows({{1}}, 1)},
                                  UnitaryRep::Provenance::User));
  // A non-permutation image for a permutation representation.
  CHECK_THROWS_AS(perm_rep(s3, {{0, 0, 1}, {1, 2, 0}}), Error);

  // Rotation by a rational Pythagorean angle is orthogonal, but 3-4-5 has infinite order.
  GroupDescriptor rw;
  rw.kind = GroupDescriptor::Kind::Rewriting;
  rw.generators = {"a"};
  rw.rules = {{{1, 1, 1, 1}, {}}};
  auto z4 = Group::create(rw);
  QMatrix rot = QMatrix::from_rows({{Rational(3, 5), Rational(-4, 5)}, {Rational(4, 5), Rational(3, 5)}}, 2);
  CHECK_THROWS_AS(UnitaryRep::exact(z4, {rot}, UnitaryRep::Provenance::User), Error);
  QMatrix quarter = QMatrix::from_rows({{0, -1}, {1, 0}}, 2);
  CHECK_NOTHROW(UnitaryRep::exact(z4, {quarter}, UnitaryRep::Provenance::User));
}

TEST_CASE("ev examples") {
  auto c = compile(load("z-line.json"));
  const auto& g = c.group();
  auto reps = parse_representations(g, load("z-line.json")["representations"]);
  const UnitaryRep& triv = reps.at("trivial");
  const UnitaryRep& z3 = reps.at("z3");

  CHECK(ev(GAMatrix::identity(g, 2), z3) == QMatrix::identity(6));
  const GAMatrix& lap = c.laplacian(0).full;
  CHECK(ev(lap, triv) == QMatrix(1, 1));

  // 2I - P - P^T for the 3-cycle; spectrum {0,3,3} since S^2 = 3S, rank 2 and S1 = 0.
  QMatrix s = ev(lap, z3);
  const QMatrix& p = z3.exact_generators()[0];
  CHECK(s == Rational(2) * QMatrix::identity(3) - p - p.transpose());
  CHECK(s * s == Rational(3) * s);
  CHECK(rank(s) == 2);
  CHECK(mat_vec(s, QVector{1, 1, 1}) == QVector(3));
  CHECK(psd_check_exact(s).pass);
}

TEST_CASE("ev is a star homomorphism") {
  std::mt19937_64 rng(17);
  int instances = 0;
  for (const auto& sg : oracle::small_groups()) {
    auto g = Group::create(oracle::permutation_descriptor(sg));
    std::vector<UnitaryRep> reps = {regular_rep(g), perm_rep(g, sg.gens), trivial_rep(g)};
    for (const auto& rho : reps)
      for (int trial = 0; trial < 4; ++trial) {
        GAMatrix a = random_matrix(rng, g, 2, 3), b = random_matrix(rng, g, 3, 2);
        CHECK(ev(mat_mul(a, b), rho) == ev(a, rho) * ev(b, rho));
        CHECK(ev(mat_star(a), rho) == ev(a, rho).transpose());
        CHECK(ev(mat_add(a, a), rho) == ev(a, rho) + ev(a, rho));
        ++instances;
      }
  }
  CHECK(instances >= 100);
}

TEST_CASE("ev block structure: Kronecker layout, interleaving and direct sums") {
  std::mt19937_64 rng(23);
  for (const auto& sg : oracle::small_groups()) {
    auto g = Group::create(oracle::permutation_descriptor(sg));
    auto reg = regular_rep(g);
    auto perm = perm_rep(g, sg.gens);
    const std::size_t k = 2;
    GAMatrix a = random_matrix(rng, g, k, k);

    QMatrix by_kron(k * reg.dim(), k * reg.dim());
    QMatrix by_interleave(k * reg.dim(), k * reg.dim());
    for (const auto& x : g->enumerate()) {
      by_kron = by_kron + kron(coefficient_matrix(a, x), reg.image(x));
      by_interleave = by_interleave + kron(reg.image(x), coefficient_matrix(a, x));
    }
    CHECK(ev(a, reg) == by_kron);
    QMatrix p = interleave(k, reg.dim());
    CHECK(p * ev(a, reg) * p.transpose() == by_interleave);

    // rho1 (+) rho2 evaluated blockwise equals the direct sum of evaluations after interleaving.
    std::vector<QMatrix> gens;
    for (std::size_t i = 0; i < g->rank(); ++i)
      gens.push_back(block_diag(reg.exact_generators()[i], perm.exact_generators()[i]));
    auto sum = UnitaryRep::exact(g, gens, UnitaryRep::Provenance::User);
    QMatrix one_block(k * sum.dim(), k * sum.dim());
    for (const auto& x : g->enumerate()) one_block = one_block + kron(coefficient_matrix(a, x), sum.image(x));
    CHECK(ev(a, sum) == one_block);
    // Regroup coordinates (i, r) with r split as rho1 then rho2.
    const std::size_t d1 = reg.dim(), d2 = perm.dim(), d = d1 + d2;
    QMatrix q(k * d, k * d);
    std::size_t next = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t r = 0; r < d1; ++r) q(next++, i * d + r) = 1;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t r = 0; r < d2; ++r) q(next++, i * d + d1 + r) = 1;
    CHECK(q * ev(a, sum) * q.transpose() == block_diag(ev(a, reg), ev(a, perm)));
  }
}

TEST_CASE("mode and backend guards on ev") {
  auto c = compile(load("z-line.json"));
  auto fl = UnitaryRep::floating(c.group(), {Eigen::MatrixXd::Identity(2, 2)});
  try {
    ev(c.boundary(0), fl);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FloatModeUnsupported);
  }
  CHECK(ev_float(c.boundary(0), fl).norm() == Catch::Approx(0.0));
  try {
    cohomology_dims(c, 0, fl);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FloatModeUnsupported);
  }
  auto other = compile(load("point.json"));
  try {
    ev(c.boundary(0), trivial_rep(other.group()));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BackendMismatch);
  }
}

TEST_CASE("cohomology dimensions") {
  auto line = compile(load("z-line.json"));
  auto reps = parse_representations(line.group(), load("z-line.json")["representations"]);
  CHECK(cohomology_dims(line, 0, reps.at("trivial")).h == 1);
  CHECK(cohomology_dims(line, 1, reps.at("trivial")).h == 1);
  CHECK(cohomology_dims(line, 0, reps.at("z3")).h == 1);
  auto h1 = cohomology_dims(line, 1, reps.at("z3"));
  CHECK(h1.h == 1);
  CHECK(h1.h_reduced == 1);
  CHECK(h1.image == 2);
  CHECK(cohomology_dims(line, 2, reps.at("z3")).h == 0);
  CHECK_THROWS_AS(cohomology_dims(line, -1, reps.at("z3")), Error);

  auto point = compile(load("point.json"));
  auto triv = trivial_rep(point.group());
  CHECK(cohomology_dims(point, 0, triv).h == 1);
  for (int n = 1; n <= 3; ++n) CHECK(cohomology_dims(point, n, triv).h == 0);

  auto s3 = compile(load("s3-triangle.json"));
  auto s3reps = parse_representations(s3.group(), load("s3-triangle.json")["representations"]);
  for (const auto& [name, rho] : s3reps) {
    INFO(name);
    CHECK(cohomology_dims(s3, 1, rho).h == 0);
    CHECK(cohomology_dims(s3, 2, rho).h == 0);
  }
  CHECK(cohomology_dims(s3, 0, s3reps.at("trivial")).h == 1);
}

TEST_CASE("Hodge reports on the examples") {
  auto line = compile(load("z-line.json"));
  auto triv = trivial_rep(line.group());
  auto r = hodge(line, 0, triv);
  CHECK(r.dim == 1);
  CHECK(r.c_zero.size() == 1);
  CHECK(r.c_minus.empty());
  CHECK(r.c_plus.empty());
  CHECK(r.ker_laplacian == 1);
  CHECK(r.all_identities_hold());

  auto s3 = compile(load("s3-triangle.json"));
  auto reg = regular_rep(s3.group());
  auto h = hodge(s3, 1, reg);
  CHECK(h.dim == 18);
  CHECK(h.ker_laplacian == 0);
  CHECK(h.h == 0);
  CHECK(h.all_identities_hold());
  CHECK(h.gap.lo >= Rational(1, 4));
  CHECK(psd_check_exact(ev(s3.laplacian(1).full, reg) - h.gap.lo * QMatrix::identity(18)).pass);

  // Top degree of the z-line: the plus part is absent.
  auto top = hodge(line, 1, quotient_rep(line.group(), "z3"));
  CHECK(top.lap_plus.is_zero());
  CHECK(top.c_plus.empty());
  auto items = criteria_report(top, 1);
  CHECK(items[2].vacuous);
  CHECK(items[2].holds);
}

TEST_CASE("criteria report examples") {
  auto line = compile(load("z-line.json"));
  auto reps = parse_representations(line.group(), load("z-line.json")["representations"]);
  for (Rational eps : {Rational(1), Rational(1, 2), Rational(1, 1000)}) {
    auto items = criteria_report(line, 0, reps.at("trivial"), eps);
    CHECK_FALSE(items[4].holds);
    for (const auto& s : items) CHECK(s.cross_check);
  }
  auto items = criteria_report(line, 0, reps.at("z3"), 1);
  REQUIRE(items.size() == 5);
  CHECK(items[0].holds);
  CHECK(items[3].holds);
  CHECK_FALSE(items[4].holds);
  for (const auto& s : items) CHECK(s.cross_check);
  // Beyond the top eigenvalue 3 nothing is positive.
  auto big = criteria_report(line, 0, reps.at("z3"), 4);
  CHECK_FALSE(big[3].holds);
  CHECK_FALSE(big[4].holds);
  CHECK_THROWS_AS(criteria_report(line, 0, reps.at("z3"), 0), std::invalid_argument);
  CHECK_THROWS_AS(criteria_report(line, 0, reps.at("z3"), -1), std::invalid_argument);

  auto s3 = compile(load("s3-triangle.json"));
  auto s3items = criteria_report(s3, 1, regular_rep(s3.group()), Rational(1, 4));
  CHECK(s3items[4].holds);
  for (const auto& s : s3items) CHECK(s.cross_check);
}

TEST_CASE("spectral floors bracket the spectrum") {
  QMatrix s = QMatrix::from_rows({{2, 1}, {1, 2}}, 2);  // eigenvalues 1 and 3
  auto f = spectral_floor(s);
  CHECK(f.lo <= 1);
  CHECK(f.hi > 1);
  CHECK(f.hi - f.lo < Rational(1, 100000));
  auto bound = definite_floor_bound(s);
  REQUIRE(bound.has_value());
  CHECK(*bound == Rational(3, 4));
  CHECK_FALSE(definite_floor_bound(QMatrix::from_rows({{1, 1}, {1, 1}}, 2)).has_value());

  QMatrix singular = QMatrix::from_rows({{1, 1}, {1, 1}}, 2);  // eigenvalues 0 and 2
  auto g = reduced_floor(singular);
  CHECK(g.lo <= 2);
  CHECK(g.hi > 2);
}

TEST_CASE("Hodge identities on random chain triples") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    // B_- = X P, B_+ = Q Y with P Q = 0 built from a split of the middle space.
    const std::size_t a = 2 + trial % 3, b = 4 + trial % 4, c = 2 + trial % 3, split = 1 + trial % (b - 1);
    QMatrix x(a, split), y(b - split, c);
    for (std::size_t i = 0; i < a; ++i)
      for (std::size_t j = 0; j < split; ++j) x(i, j) = oracle::random_rational(rng, 3, 2);
    for (std::size_t i = 0; i < b - split; ++i)
      for (std::size_t j = 0; j < c; ++j) y(i, j) = oracle::random_rational(rng, 3, 2);
    QMatrix m(b, b);
    for (std::size_t i = 0; i < b; ++i)
      for (std::size_t j = 0; j < b; ++j) m(i, j) = oracle::random_rational(rng, 3, 2);
    if (rank(m) < b) continue;
    QMatrix p(split, b), q(b, b - split);
    for (std::size_t j = 0; j < split; ++j) p(j, j) = 1;
    for (std::size_t j = 0; j < b - split; ++j) q(split + j, j) = 1;
    // Conjugate by m: (X P m)(m^-1 Q Y) = 0. Use the adjugate-free route via solve.
    QMatrix minv(b, b);
    for (std::size_t j = 0; j < b; ++j) {
      QVector e(b);
      e[j] = 1;
      auto col = solve(m, e);
      REQUIRE(col.has_value());
      for (std::size_t i = 0; i < b; ++i) minv(i, j) = (*col)[i];
    }
    QMatrix bm = x * p * m, bp = minv * q * y;
    REQUIRE((bm * bp).is_zero());
    auto r = hodge_chain(bm, bp, 8);
    CHECK(r.all_identities_hold());
    CHECK(r.ker_laplacian == r.h);
  }
  QMatrix bad = QMatrix::identity(2);
  CHECK_THROWS_AS(hodge_chain(bad, bad), Error);
}
