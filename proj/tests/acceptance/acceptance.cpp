// One line per acceptance criterion; exits nonzero if any criterion fails.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "cocert/cli.hpp"
#include "cocert/serialize.hpp"
#include "cocert/sos.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace cocert;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str()};
}

std::string data(const std::string& name) { return std::string(COCERT_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "cocert-acceptance";
  fs::create_directories(dir);
  return dir / name;
}

json load(const std::string& name) { return json::parse(oracle::read_file(data(name))); }

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

template <class Rng>
GAElem random_elem(Rng& rng, const GroupPtr& g, const std::vector<GroupElement>& support, int num, int den) {
  Coeffs c;
  std::bernoulli_distribution keep(0.6);
  for (const auto& s : support)
    if (keep(rng)) c[s.form] = oracle::random_rational(rng, num, den);
  return GAElem(g, c);
}

// ---------------------------------------------------------------------------

Outcome line_pipeline() {
  Outcome o;
  auto c = cli({"compile", data("z-line.json"), "--json"});
  o.require(c.code == 0, "compile exit " + std::to_string(c.code));
  if (!o.pass) return o;
  json doc = json::parse(c.out);
  o.require(doc["k"] == json::array({1, 1}), "k = " + doc["k"].dump());
  auto ws = compile(load("z-line.json"));
  const auto& g = ws.group();
  const GAMatrix expect = GAMatrix::from_elem(GAElem::from_terms(g, {{{}, 2}, {{1}, -1}, {{-1}, -1}}));
  o.require(ga_matrix_from_json(g, doc["laplacians"][0]["full"], "Delta_0") == expect,
            "Delta_0 differs from 2 - t - t^-1");

  auto cert = cli({"certify", data("z-line.json"), "--n", "0", "--target", "gap"});
  o.require(cert.code == 1, "certify exit " + std::to_string(cert.code));

  auto orc = cli({"oracle", data("z-line.json"), "--rep", "trivial", "--n", "0"});
  o.require(orc.code == 0 && orc.out == "trivial\tn = 0\tdim H = 1\n", "oracle said: " + orc.out);
  if (o.pass) o.detail = "k = (1,1), Delta_0 = 2 - t - t^-1, certify exit 1, dim H^0 = 1";
  return o;
}

Outcome s3_triangle() {
  Outcome o;
  auto c = cli({"compile", data("s3-triangle.json"), "--json"});
  o.require(c.code == 0, "compile exit " + std::to_string(c.code));
  if (!o.pass) return o;
  json doc = json::parse(c.out);
  o.require(doc["k"] == json::array({3, 3, 1}), "k = " + doc["k"].dump());

  // Independent orbit count on the subdivided triangle.
  const auto gens = load("s3-triangle.json")["group"]["permutations"].get<std::vector<oracle::Perm>>();
  const auto group = oracle::closure(gens, 3);
  const auto cells = oracle::subdivision();
  for (std::size_t n = 0; n < 3; ++n)
    o.require(oracle::orbit_count(cells[n], group) == doc["k"][n].get<std::size_t>(), "brute-force k disagrees");

  auto ws = compile(load("s3-triangle.json"));
  const auto& g = ws.group();
  const GAMatrix d0 = ga_matrix_from_json(g, doc["boundaries"][0]["matrix"], "D_0");
  const GAMatrix d1 = ga_matrix_from_json(g, doc["boundaries"][1]["matrix"], "D_1");
  o.require(mat_mul(d0, d1).is_zero(), "D_0 D_1 != 0");

  auto orc = cli({"oracle", data("s3-triangle.json"), "--rep", "regular", "--n", "1"});
  o.require(orc.code == 0 && orc.out == "regular\tn = 1\tdim H = 0\n", "oracle said: " + orc.out);

  const auto file = scratch("s3.cert");
  auto cert = cli({"certify", data("s3-triangle.json"), "--n", "1", "--target", "gap", "--output", file.string()});
  o.require(cert.code == 0, "certify exit " + std::to_string(cert.code));
  if (!o.pass) return o;
  const Rational eps = parse_rational(json::parse(oracle::read_file(file.string()))["target"]["epsilon"].get<std::string>());
  o.require(eps > 0, "epsilon not positive");
  auto ver = cli({"verify", file.string()});
  o.require(ver.code == 0 && ver.out.rfind("ACCEPT: residual is exactly zero", 0) == 0, "verify said: " + ver.out);
  if (o.pass) o.detail = "k = (3,3,1), D_0 D_1 = 0, dim H^1 = 0, epsilon = " + to_string(eps) + " ACCEPT";
  return o;
}

Outcome reducedness() {
  Outcome o;
  // Spectrum of Delta(Delta - 1) is {0,6,6}: M^2 = 6M, rank 2.
  auto ws = compile(load("z3-cycle.json"));
  auto target = make_reducedness_target(ws, 0, LaplacianPart::Full, 1);
  const QMatrix m = ev(target.lhs, regular_rep(ws.group()));
  o.require(m * m == Rational(6) * m && rank(m) == 2, "regular image of Delta(Delta-1) is not {0,6,6}");

  const auto file = scratch("z3.cert");
  auto cert = cli({"certify", data("z3-cycle.json"), "--target", "reduced", "--epsilon", "1", "--output", file.string()});
  o.require(cert.code == 0, "certify exit " + std::to_string(cert.code));
  if (!o.pass) return o;
  auto ver = cli({"verify", file.string()});
  o.require(ver.code == 0 && ver.out.rfind("ACCEPT: residual is exactly zero", 0) == 0, "verify said: " + ver.out);
  if (o.pass) o.detail = "Delta(Delta - 1) certified, spectrum {0,6,6}";
  return o;
}

Outcome sos_roundtrip() {
  Outcome o;
  std::mt19937_64 rng(2024);
  const auto groups = oracle::small_groups();
  int accepted = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto& sg = groups[rng() % groups.size()];
    auto g = Group::create(oracle::permutation_descriptor(sg));
    const std::size_t k = 1 + rng() % 3;
    const std::size_t m = 1 + rng() % 3;
    const Rational eps(static_cast<long>(1 + rng() % 32), 16);
    const auto ball = g->ball(1);

    GAMatrix lhs = mat_scale(eps, GAMatrix::identity(g, k));
    for (std::size_t i = 0; i < m; ++i) {
      GAMatrix x(g, 1, k);
      for (std::size_t j = 0; j < k; ++j) x.set(0, j, random_elem(rng, g, ball, 3, 2));
      lhs = mat_add(lhs, mat_mul(mat_star(x), x));
    }
    // lhs - eps I sits on the cone boundary; half of eps keeps a definite Gram point.
    const Rational half = eps / 2;
    FindOptions opts;
    opts.epsilon = half;
    opts.support = canonical_support(*g, ball);
    opts.seed = static_cast<std::uint64_t>(trial);
    auto found = find_certificate(TargetKind::Gap, lhs, opts);
    const bool ok = found.certificate && verify(*found.certificate).accept &&
                    found.certificate->target.lhs == mat_sub(lhs, mat_scale(half, GAMatrix::identity(g, k)));
    if (ok) ++accepted;
    o.require(ok, "trial " + std::to_string(trial) + " over " + sg.name + " (k=" + std::to_string(k) +
                      ", eps=" + to_string(eps) + ") not certified");
  }
  if (o.pass) o.detail = std::to_string(accepted) + "/100 accepted at eps/2";
  else o.detail += "; " + std::to_string(accepted) + "/100 accepted";
  return o;
}

Outcome finite_equivalence() {
  Outcome o;
  std::mt19937_64 rng(77);
  const auto groups = oracle::small_groups();
  int positive = 0, certified = 0, refuted = 0, false_accepts = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto& sg = groups[rng() % groups.size()];
    auto g = Group::create(oracle::permutation_descriptor(sg));
    const std::size_t k = 1 + rng() % 2;
    const auto whole = canonical_support(*g, g->enumerate());
    GAMatrix a(g, k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) a.set(i, j, random_elem(rng, g, g->ball(1), 2, 2));
    const Rational shift(static_cast<long>(rng() % 9));
    GAMatrix h = mat_add(mat_add(a, mat_star(a)), mat_scale(shift, GAMatrix::identity(g, k)));

    const QMatrix image = ev(h, regular_rep(g));
    const RationalInterval floor = spectral_floor(image);
    FindOptions opts;
    opts.support = whole;
    opts.seed = static_cast<std::uint64_t>(trial);

    if (floor.lo >= Rational(1, 10)) {
      ++positive;
      opts.epsilon = floor.lo / 2;
      auto found = find_certificate(TargetKind::Gap, h, opts);
      const bool ok = found.certificate && verify(*found.certificate).accept;
      if (ok) ++certified;
      o.require(ok, "trial " + std::to_string(trial) + ": floor " + to_string(floor.lo) + " but no certificate");
    }

    // Any eps' with a negative witness for lhs - eps' I must never be accepted.
    const Rational bad = floor.hi + Rational(1, 100);
    const QMatrix shifted = image - bad * QMatrix::identity(image.rows());
    PsdCheck witness = psd_check_exact(shifted);
    if (witness.pass) continue;
    ++refuted;
    opts.epsilon = bad;
    auto found = find_certificate(TargetKind::Gap, h, opts);
    if (found.certificate && verify(*found.certificate).accept) ++false_accepts;

    // Forge: an exactly feasible Gram point for eps' from a good numeric start.
    SosTarget target = make_gap_target(h, bad);
    ConstraintSystem sys = constraints(target.lhs, whole);
    SolveOptions so;
    so.max_iters = 200;
    auto numeric = solve_numeric(sys, so);
    auto forged = round_project(numeric.q, sys, Integer(1) << 20);
    if (forged) {
      Certificate cert;
      cert.target = target;
      cert.support = whole;
      cert.gram = *forged;
      cert.lhs_hash = lhs_hash(target);
      if (verify(cert).accept) ++false_accepts;
    }
  }
  o.require(false_accepts == 0, std::to_string(false_accepts) + " false accepts");
  o.require(positive > 0 && refuted > 0, "random targets did not exercise both directions");
  std::ostringstream s;
  s << certified << "/" << positive << " with floor >= 1/10 certified; " << refuted
    << " refuted eps, " << false_accepts << " false accepts";
  if (o.pass) o.detail = s.str();
  else o.detail += "; " + s.str();
  return o;
}

// Integer unimodular matrix: unit lower times unit upper triangular.
template <class Rng>
std::pair<QMatrix, QMatrix> unimodular(Rng& rng, std::size_t n) {
  QMatrix l = QMatrix::identity(n), u = QMatrix::identity(n);
  std::uniform_int_distribution<int> small(-1, 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      l(i, j) = small(rng);
      u(j, i) = small(rng);
    }
  QMatrix m = l * u;
  QMatrix inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    QVector e(n);
    e[j] = 1;
    QVector col = *solve(m, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return {m, inv};
}

Outcome hodge_suite() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> entry(-2, 2);
  int acyclic = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t b = 4 + rng() % 27;  // middle dimension <= 30
    const std::size_t split = 1 + rng() % (b - 1);
    const bool want_acyclic = trial % 2 == 0;
    const std::size_t a = want_acyclic ? split + rng() % (31 - split) : 1 + rng() % 30;
    const std::size_t c = want_acyclic ? (b - split) + rng() % (31 - (b - split)) : 1 + rng() % 30;
    QMatrix x(a, split), y(b - split, c);
    for (std::size_t i = 0; i < a; ++i)
      for (std::size_t j = 0; j < split; ++j) x(i, j) = entry(rng);
    for (std::size_t i = 0; i < b - split; ++i)
      for (std::size_t j = 0; j < c; ++j) y(i, j) = entry(rng);
    QMatrix p(split, b), q(b, b - split);
    for (std::size_t j = 0; j < split; ++j) p(j, j) = 1;
    for (std::size_t j = 0; j < b - split; ++j) q(split + j, j) = 1;
    auto [mm, minv] = unimodular(rng, b);
    const QMatrix bm = x * p * mm, bp = minv * q * y;
    const std::string tag = "triple " + std::to_string(trial) + " (" + std::to_string(a) + "," + std::to_string(b) +
                            "," + std::to_string(c) + ")";
    o.require((bm * bp).is_zero(), tag + ": chain condition not enforced");

    HodgeReport r = hodge_chain(bm, bp, 12);
    o.require(r.orthogonal && r.dims_add_up, tag + ": decomposition not orthogonal or incomplete");
    for (const auto& [name, ok] : r.identities) o.require(ok, tag + ": " + name + " fails");
    // Rank-computed dim H = dim ker d - rank d_prev, independently of the report.
    const std::size_t h = (b - rank(bp)) - rank(bm);
    o.require(r.ker_laplacian == h, tag + ": dim ker Delta != dim H");

    if (h == 0) {
      ++acyclic;
      const Rational eps = std::max(r.gap.lo, *definite_floor_bound(r.lap_full));
      auto items = criteria_report(r, eps);
      o.require(items[4].holds && items[4].cross_check, tag + ": criterion (5) fails although H = 0");
    } else {
      for (Rational eps : {Rational(1, 1000), Rational(1)}) {
        auto items = criteria_report(r, eps);
        o.require(!items[4].holds && items[4].cross_check, tag + ": criterion (5) holds although H != 0");
      }
    }
  }
  o.require(acyclic > 0 && acyclic < 50, "random triples did not exercise both cases");
  if (o.pass) o.detail = "50 triples, " + std::to_string(acyclic) + " with H = 0; all identities exact";
  return o;
}

Outcome rect_sos_identity() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::vector<GroupPtr> backends;
  GroupDescriptor free;
  free.generators = {"a", "b"};
  backends.push_back(Group::create(free));
  GroupDescriptor rw;
  rw.kind = GroupDescriptor::Kind::Rewriting;
  rw.generators = {"a"};
  rw.rules = {{{1, 1, 1, 1, 1}, {}}};
  rw.inverse_words = {{1, {1, 1, 1, 1}}};
  backends.push_back(Group::create(rw));
  for (const auto& sg : oracle::small_groups()) backends.push_back(Group::create(oracle::permutation_descriptor(sg)));

  for (int trial = 0; trial < 100; ++trial) {
    const auto& g = backends[rng() % backends.size()];
    const std::size_t k = 1 + rng() % 4, l = 1 + rng() % 4;
    const auto ball = g->ball(2);
    GAMatrix x(g, k, l);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < l; ++j) x.set(i, j, random_elem(rng, g, ball, 5, 3));
    auto ys = rect_sos(x);
    bool ok = ys.size() == k && sum_of_squares(g, l, ys) == mat_mul(mat_star(x), x);
    for (std::size_t i = 0; ok && i < k; ++i)
      for (std::size_t r = 0; r < l; ++r)
        for (std::size_t j = 0; j < l; ++j)
          ok = ok && ys[i].at(r, j) == (r == 0 ? x.at(i, j) : GAElem::zero(g));
    o.require(ok, "trial " + std::to_string(trial) + " (" + std::to_string(k) + "x" + std::to_string(l) + ") fails");
  }
  if (o.pass) o.detail = "100 random shapes over free, rewriting and permutation backends";
  return o;
}

Outcome tamper_detection() {
  Outcome o;
  std::vector<fs::path> certs = {scratch("tamper-s3.cert"), scratch("tamper-z3.cert")};
  o.require(cli({"certify", data("s3-triangle.json"), "--n", "1", "--epsilon", "1/2", "--output", certs[0].string()})
                    .code == 0,
            "could not produce the S3 certificate");
  o.require(cli({"certify", data("z3-cycle.json"), "--target", "reduced", "--epsilon", "1", "--output",
                 certs[1].string()})
                    .code == 0,
            "could not produce the Z/3 certificate");
  if (!o.pass) return o;
  for (const auto& c : certs) o.require(cli({"verify", c.string()}).code == 0, "untampered certificate rejected");

  std::mt19937_64 rng(8);
  const std::vector<Rational> magnitudes = {Rational(1, Integer(1) << 32), Rational(1, Integer(1) << 17),
                                            Rational(1, 2), Rational(3, 1000), Rational(5)};
  int false_accepts = 0;
  for (int trial = 0; trial < 20; ++trial) {
    json doc = json::parse(oracle::read_file(certs[trial % 2].string()));
    const std::size_t n = doc["gram"].size();
    // Diagonal hits keep symmetry, so the residual check has to catch them.
    const std::size_t i = rng() % n, j = trial % 4 < 2 ? i : rng() % n;
    Rational delta = magnitudes[rng() % magnitudes.size()];
    if (rng() % 2) delta = -delta;
    doc["gram"][i][j] = to_string(parse_rational(doc["gram"][i][j].get<std::string>()) + delta);
    const auto file = scratch("tampered-" + std::to_string(trial) + ".cert");
    write(file, doc.dump(2));
    auto v = cli({"verify", file.string()});
    if (v.code != 1) ++false_accepts;
    o.require(v.code == 1, "trial " + std::to_string(trial) + ": verify exit " + std::to_string(v.code));
  }
  if (o.pass) o.detail = "20 perturbations, " + std::to_string(false_accepts) + " false accepts";
  return o;
}

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Z-line pipeline", 1, line_pipeline},
      {2, "S3 barycentric triangle", 60, s3_triangle},
      {3, "reducedness criterion on Z/3", 10, reducedness},
      {4, "SOS roundtrip, 100 random instances", 300, sos_roundtrip},
      {5, "finite-group equivalence, 50 random targets", 600, finite_equivalence},
      {6, "Hodge suite, 50 random chain triples", 120, hodge_suite},
      {7, "rectangular SOS identity, 100 random matrices", 60, rect_sos_identity},
      {8, "tamper detection, 20 perturbations", 60, tamper_detection},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && secs >= c.limit_seconds) {
      o.pass = false;
      o.detail += "; exceeded " + std::to_string(static_cast<int>(c.limit_seconds)) + " s";
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.name << " [" << std::fixed
              << std::setprecision(2) << secs << " s] " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all acceptance criteria pass" : std::to_string(failures) + " criteria fail")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
