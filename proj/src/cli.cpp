#include "cocert/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cocert/complex.hpp"
#include "cocert/rep_lab.hpp"
#include "cocert/serialize.hpp"
#include "cocert/sos.hpp"

namespace cocert::cli {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Workspace {
  json doc;
  std::optional<EquivariantComplex> complex;
  std::map<std::string, UnitaryRep> reps;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, "'" + path + "' is not valid JSON: " + e.what());
  }
}

Workspace load_workspace(const std::string& path) {
  Workspace ws;
  ws.doc = read_json_file(path);
  ws.complex.emplace(compile(ws.doc));
  if (ws.doc.contains("representations"))
    ws.reps = parse_representations(ws.complex->group(), ws.doc.at("representations"));
  return ws;
}

UnitaryRep resolve_rep(const Workspace& ws, const std::string& name) {
  auto it = ws.reps.find(name);
  if (it != ws.reps.end()) return it->second;
  if (name == "trivial") return trivial_rep(ws.complex->group());
  if (name == "regular") return regular_rep(ws.complex->group());
  throw Error(ErrorCode::ParseError, "unknown representation '" + name + "'");
}

Rational parse_epsilon(const std::string& text, bool allow_zero) {
  Rational eps;
  try {
    eps = parse_rational(text);
  } catch (const Error&) {
    throw UsageError("--epsilon expects a rational such as 1/4, got '" + text + "'");
  }
  if (eps < 0 || (eps == 0 && !allow_zero)) throw UsageError("--epsilon must be positive, got '" + text + "'");
  return eps;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ParseError, "cannot write '" + path + "'");
  f << text;
}

std::string k_table(const EquivariantComplex& c) {
  std::string s = "(";
  for (int n = 0; n <= c.top_degree() + 1; ++n) s += (n ? ", " : "") + std::to_string(c.orbit_count(n));
  return s + ")";
}

std::string interval_str(const RationalInterval& r) {
  return "[" + to_string(r.lo) + ", " + to_string(r.hi) + "]";
}

json interval_json(const RationalInterval& r) { return {{"lo", to_string(r.lo)}, {"hi", to_string(r.hi)}}; }

// compile ---------------------------------------------------------------------

struct CompileArgs {
  std::string path;
  std::string output;
  bool json_out = false;
};

int cmd_compile(const CompileArgs& a, std::ostream& out) {
  Workspace ws = load_workspace(a.path);
  const EquivariantComplex& c = *ws.complex;
  json doc;
  doc["k"] = json::array();
  for (int n = 0; n <= c.top_degree() + 1; ++n) doc["k"].push_back(c.orbit_count(n));
  doc["chain_condition"] = "holds";
  doc["boundaries"] = json::array();
  for (int n = 0; n <= c.top_degree(); ++n)
    doc["boundaries"].push_back({{"degree", n}, {"matrix", ga_matrix_to_json(c.boundary(n))}});
  doc["laplacians"] = json::array();
  for (int n = 0; n <= c.top_degree() + 1; ++n) {
    Laplacians lap = c.laplacian(n);
    doc["laplacians"].push_back({{"degree", n},
                                 {"full", ga_matrix_to_json(lap.full)},
                                 {"plus", ga_matrix_to_json(lap.plus)},
                                 {"minus", ga_matrix_to_json(lap.minus)}});
  }
  if (!a.output.empty()) write_file(a.output, doc.dump(2) + "\n");
  if (a.json_out) {
    out << doc.dump(2) << "\n";
    return kExitOk;
  }
  out << "k = " << k_table(c) << "\n";
  out << "chain condition: holds\n";
  for (int n = 0; n <= c.top_degree(); ++n) out << "D_" << n << " = " << c.boundary(n).str() << "\n";
  for (int n = 0; n <= c.top_degree() + 1; ++n) out << "Delta_" << n << " = " << c.laplacian(n).full.str() << "\n";
  return kExitOk;
}

// analyze ---------------------------------------------------------------------

struct AnalyzeArgs {
  std::string path;
  int n = 0;
  std::string rep = "trivial";
  std::string epsilon;
  bool json_out = false;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const Rational eps = parse_epsilon(a.epsilon, false);
  Workspace ws = load_workspace(a.path);
  UnitaryRep rho = resolve_rep(ws, a.rep);
  HodgeReport r = hodge(*ws.complex, a.n, rho);
  auto crit = criteria_report(r, eps);

  json doc = {{"degree", a.n},
              {"representation", {{"name", a.rep}, {"dim", rho.dim()}, {"provenance", provenance_name(rho.provenance())}}},
              {"epsilon", to_string(eps)},
              {"dim_c_minus", r.c_minus.size()},
              {"dim_c_zero", r.c_zero.size()},
              {"dim_c_plus", r.c_plus.size()},
              {"dim_ker_d", r.ker_d},
              {"dim_im_d_prev", r.rank_prev},
              {"dim_h", r.h},
              {"dim_h_reduced", r.ker_laplacian},
              {"dim_ker_laplacian", r.ker_laplacian},
              {"orthogonal", r.orthogonal},
              {"dims_add_up", r.dims_add_up},
              {"gap", interval_json(r.gap)},
              {"gap_plus", interval_json(r.gap_plus)},
              {"gap_minus", interval_json(r.gap_minus)}};
  json ids = json::object();
  for (const auto& [name, ok] : r.identities) ids[name] = ok;
  doc["identities"] = ids;
  doc["criteria"] = json::array();
  for (const auto& s : crit)
    doc["criteria"].push_back(
        {{"item", s.item}, {"holds", s.holds}, {"cross_check", s.cross_check}, {"vacuous", s.vacuous}, {"detail", s.detail}});

  if (a.json_out) {
    out << doc.dump(2) << "\n";
    return kExitOk;
  }
  out << "degree " << a.n << ", representation " << a.rep << " (dim " << rho.dim() << ", "
      << provenance_name(rho.provenance()) << "), epsilon = " << to_string(eps) << "\n";
  out << "dim C- = " << r.c_minus.size() << ", dim C0 = " << r.c_zero.size() << ", dim C+ = " << r.c_plus.size()
      << "\n";
  out << "dim H = " << r.h << ", dim reduced H = dim ker Delta = " << r.ker_laplacian << "\n";
  out << "Hodge identities: " << (r.all_identities_hold() ? "all hold" : "FAILED") << "\n";
  out << "spectral floor of Delta in " << interval_str(r.gap) << "\n";
  for (const auto& s : crit)
    out << "criterion (" << s.item << "): " << (s.holds ? "holds" : "fails") << (s.vacuous ? " (vacuous)" : "")
        << "; cross-check " << (s.cross_check ? "agrees" : "DISAGREES") << "; " << s.detail << "\n";
  return kExitOk;
}

// certify ---------------------------------------------------------------------

struct CertifyArgs {
  std::string path;
  int n = 0;
  std::string target = "gap";
  std::string epsilon = "auto";
  std::optional<std::size_t> radius;
  std::uint64_t seed = 0;
  int max_iters = 2000;
  double tol = 1e-10;
  std::string denominator_bound = "65536";
  std::string output;
  bool json_out = false;
};

int cmd_certify(const CertifyArgs& a, std::ostream& out) {
  static const std::map<std::string, std::pair<TargetKind, LaplacianPart>> kinds = {
      {"gap", {TargetKind::Gap, LaplacianPart::Full}},
      {"reduced", {TargetKind::Reduced, LaplacianPart::Full}},
      {"reduced-plus", {TargetKind::Reduced, LaplacianPart::Plus}},
      {"reduced-minus", {TargetKind::Reduced, LaplacianPart::Minus}}};
  auto kind_it = kinds.find(a.target);
  if (kind_it == kinds.end()) throw UsageError("--target must be gap, reduced, reduced-plus or reduced-minus");
  const auto [kind, part] = kind_it->second;

  FindOptions opts;
  if (a.epsilon != "auto") opts.epsilon = parse_epsilon(a.epsilon, kind == TargetKind::Reduced);
  opts.seed = a.seed;
  opts.max_iters = a.max_iters;
  opts.tol = a.tol;
  try {
    opts.denominator_bound = Integer(a.denominator_bound);
  } catch (const std::exception&) {
    throw UsageError("--denominator-bound expects a positive integer");
  }
  if (opts.denominator_bound <= 0) throw UsageError("--denominator-bound expects a positive integer");
  if (opts.max_denominator_bound < opts.denominator_bound) opts.max_denominator_bound = opts.denominator_bound;

  Workspace ws = load_workspace(a.path);
  const EquivariantComplex& c = *ws.complex;
  const GroupPtr& group = c.group();
  for (const auto& [name, rho] : ws.reps) opts.reps.push_back(&rho);

  // Builds the target once to validate the degree and obtain the base matrix.
  SosTarget probe = kind == TargetKind::Gap ? make_gap_target(c, a.n, Rational(1))
                                            : make_reducedness_target(c, a.n, part, Rational(0));
  json provenance = probe.provenance;
  provenance["source"] = a.path;

  std::vector<std::size_t> radii;
  if (a.radius) {
    radii.push_back(*a.radius);
  } else {
    const GAMatrix lhs = probe.lhs;
    const std::size_t r0 = (std::max(lhs.support_radius(), probe.base.support_radius()) + 1) / 2;
    for (std::size_t r = r0; r <= r0 + 2; ++r) {
      radii.push_back(r);
      if (group->kind() != Group::Kind::Free && group->ball(r).size() == group->ball(r + 1).size()) break;
    }
  }

  FindResult found;
  std::vector<Attempt> attempts;
  std::vector<std::size_t> tried;
  for (std::size_t r : radii) {
    opts.radius = r;
    found = find_certificate(kind, probe.base, opts, provenance);
    tried.push_back(r);
    for (const auto& at : found.attempts) attempts.push_back(at);
    if (found.certificate) break;
  }

  if (found.certificate) {
    const Certificate& cert = *found.certificate;
    const std::string text = certificate_to_json(cert).dump(2) + "\n";
    json summary = {{"status", "FOUND"},
                    {"epsilon", to_string(cert.target.epsilon)},
                    {"support_size", cert.support.size()},
                    {"radius", tried.back()},
                    {"lhs_hash", cert.lhs_hash}};
    if (!a.output.empty()) {
      write_file(a.output, text);
      if (a.json_out)
        out << summary.dump(2) << "\n";
      else
        out << "certificate found: epsilon = " << to_string(cert.target.epsilon) << ", |E| = " << cert.support.size()
            << " (radius " << tried.back() << "), written to " << a.output << "\n";
    } else {
      out << text;
    }
    return kExitOk;
  }

  json diag = {{"status", "NOT_FOUND"},
               {"note", "NOT_FOUND is not a proof that no certificate exists"},
               {"radii", tried},
               {"attempts", json::array()}};
  for (const auto& at : attempts)
    diag["attempts"].push_back({{"epsilon", to_string(at.epsilon)},
                                {"status", at.status},
                                {"residual", at.residual},
                                {"min_eig", at.min_eig},
                                {"detail", at.detail}});
  if (a.json_out) {
    out << diag.dump(2) << "\n";
  } else {
    out << "NOT_FOUND (not a proof of nonexistence); radii tried:";
    for (auto r : tried) out << " " << r;
    out << "\n";
    for (const auto& at : attempts)
      out << "  epsilon " << to_string(at.epsilon) << ": " << at.status << ", residual floor " << at.residual
          << ", min eigenvalue " << at.min_eig << "; " << at.detail << "\n";
  }
  return kExitNotFound;
}

// verify ----------------------------------------------------------------------

int cmd_verify(const std::string& path, bool json_out, std::ostream& out) {
  json doc;
  try {
    doc = read_json_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedCert, e.what());
  }
  Certificate cert = certificate_from_json(doc);
  VerifyResult v = verify(cert);
  if (json_out) {
    out << json{{"status", v.accept ? "ACCEPT" : "REJECT"},
                {"reason", v.reason},
                {"residual_zero", v.residual_zero},
                {"hash_ok", v.hash_ok},
                {"gram_size", v.gram_size},
                {"positive_pivots", v.positive_pivots},
                {"weighted_terms", v.weighted_terms}}
               .dump(2)
        << "\n";
  } else if (v.accept) {
    out << "ACCEPT: residual is exactly zero";
    if (cert.gram) out << "; LDL^T PASS with " << v.positive_pivots << " positive pivots of " << v.gram_size;
    if (cert.weighted) out << "; weighted SOS with " << v.weighted_terms << " terms matches";
    out << "\n";
  } else {
    out << "REJECT: " << v.reason << "\n";
  }
  return v.accept ? kExitOk : kExitNotFound;
}

// oracle ----------------------------------------------------------------------

struct OracleArgs {
  std::string path;
  std::vector<int> degrees;
  std::vector<std::string> reps;
  bool json_out = false;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  Workspace ws = load_workspace(a.path);
  const EquivariantComplex& c = *ws.complex;
  std::vector<int> degrees = a.degrees;
  if (degrees.empty())
    for (int n = 0; n <= c.top_degree() + 1; ++n) degrees.push_back(n);
  std::vector<std::string> names = a.reps;
  if (names.empty()) {
    for (const auto& [name, rho] : ws.reps)
      if (rho.is_exact()) names.push_back(name);
    if (names.empty()) names.push_back("trivial");
  }
  json rows = json::array();
  std::ostringstream text;
  for (const auto& name : names) {
    UnitaryRep rho = resolve_rep(ws, name);
    for (int n : degrees) {
      CohomologyDims d = cohomology_dims(c, n, rho);
      rows.push_back({{"representation", name}, {"degree", n}, {"dim_h", d.h}, {"dim_ker", d.kernel}, {"dim_im", d.image}});
      text << name << "\tn = " << n << "\tdim H = " << d.h << "\n";
    }
  }
  if (a.json_out)
    out << json{{"cohomology", rows}}.dump(2) << "\n";
  else
    out << text.str();
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certificates for vanishing of group cohomology", "cocert"};
  app.require_subcommand(1);

  CompileArgs ca;
  auto* compile_cmd = app.add_subcommand("compile", "Compile a workspace into boundary and Laplacian matrices");
  compile_cmd->add_option("path", ca.path, "Workspace document")->required();
  compile_cmd->add_option("--output", ca.output, "Write the matrices document here");
  compile_cmd->add_flag("--json", ca.json_out, "Machine-readable output");

  AnalyzeArgs aa;
  auto* analyze_cmd = app.add_subcommand("analyze", "Hodge decomposition and positivity criteria");
  analyze_cmd->add_option("path", aa.path, "Workspace document")->required();
  analyze_cmd->add_option("--n", aa.n, "Degree")->required();
  analyze_cmd->add_option("--rep", aa.rep, "Representation name");
  analyze_cmd->add_option("--epsilon", aa.epsilon, "Positive rational")->required();
  analyze_cmd->add_flag("--json", aa.json_out, "Machine-readable output");

  CertifyArgs sa;
  auto* certify_cmd = app.add_subcommand("certify", "Search for a sum-of-squares certificate");
  certify_cmd->add_option("path", sa.path, "Workspace document")->required();
  certify_cmd->add_option("--n", sa.n, "Degree");
  certify_cmd->add_option("--target", sa.target, "gap | reduced | reduced-plus | reduced-minus");
  certify_cmd->add_option("--epsilon", sa.epsilon, "auto or a rational");
  certify_cmd->add_option("--radius", sa.radius, "Support ball radius");
  certify_cmd->add_option("--seed", sa.seed, "Numeric start seed");
  certify_cmd->add_option("--max-iters", sa.max_iters, "Alternating projection iterations")->check(CLI::PositiveNumber);
  certify_cmd->add_option("--tol", sa.tol, "Affine residual tolerance")->check(CLI::PositiveNumber);
  certify_cmd->add_option("--denominator-bound", sa.denominator_bound, "Initial rounding denominator bound");
  certify_cmd->add_option("--output", sa.output, "Certificate file");
  certify_cmd->add_flag("--json", sa.json_out, "Machine-readable output");

  std::string verify_path;
  bool verify_json = false;
  auto* verify_cmd = app.add_subcommand("verify", "Check a certificate exactly");
  verify_cmd->add_option("path", verify_path, "Certificate document")->required();
  verify_cmd->add_flag("--json", verify_json, "Machine-readable output");

  OracleArgs oa;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact cohomology dimensions");
  oracle_cmd->add_option("path", oa.path, "Workspace document")->required();
  oracle_cmd->add_option("--n", oa.degrees, "Degrees (repeatable)");
  oracle_cmd->add_option("--rep", oa.reps, "Representation names (repeatable)");
  oracle_cmd->add_flag("--json", oa.json_out, "Machine-readable output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  bool json_out = false;
  try {
    if (compile_cmd->parsed()) {
      json_out = ca.json_out;
      return cmd_compile(ca, out);
    }
    if (analyze_cmd->parsed()) {
      json_out = aa.json_out;
      return cmd_analyze(aa, out);
    }
    if (certify_cmd->parsed()) {
      json_out = sa.json_out;
      return cmd_certify(sa, out);
    }
    if (verify_cmd->parsed()) {
      json_out = verify_json;
      return cmd_verify(verify_path, verify_json, out);
    }
    if (oracle_cmd->parsed()) {
      json_out = oa.json_out;
      return cmd_oracle(oa, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << error_name(e.code()) << ": " << e.what() << "\n";
    if (json_out)
      out << json{{"error", {{"code", std::string(error_name(e.code()))}, {"message", e.what()}}}}.dump(2) << "\n";
    return kExitStructural;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace cocert::cli
