#include "cocert/complex.hpp"

#include <map>
#include <set>

namespace cocert {

using nlohmann::json;

EquivariantComplex::EquivariantComplex(GroupPtr group, std::vector<std::vector<Cell>> cells,
                                       Assertions assertions, bool check_chain)
    : group_(std::move(group)), cells_(std::move(cells)), assertions_(assertions) {
  if (cells_.size() < 2)
    throw Error(ErrorCode::ParseError, "cells must be given for degrees 0..N+1 (at least two degrees)");

  std::vector<std::map<std::string, std::size_t>> index(cells_.size());
  for (std::size_t n = 0; n < cells_.size(); ++n)
    for (std::size_t i = 0; i < cells_[n].size(); ++i) {
      const auto& name = cells_[n][i].name;
      if (name.empty()) throw Error(ErrorCode::ParseError, "empty orbit name in degree " + std::to_string(n));
      if (!index[n].emplace(name, i).second)
        throw Error(ErrorCode::ParseError, "duplicate orbit name '" + name + "' in degree " + std::to_string(n));
      if (n == 0 && !cells_[n][i].faces.empty())
        throw Error(ErrorCode::ParseError, "degree-0 orbit '" + name + "' cannot have faces");
    }

  for (std::size_t n = 0; n + 1 < cells_.size(); ++n) {
    GAMatrix d(group_, cells_[n].size(), cells_[n + 1].size());
    for (std::size_t s = 0; s < cells_[n + 1].size(); ++s) {
      const Cell& sigma = cells_[n + 1][s];
      const std::size_t expected = n + 2;
      std::vector<bool> seen(expected, false);
      for (const auto& face : sigma.faces) {
        if (face.t < 0 || static_cast<std::size_t>(face.t) >= expected)
          throw Error(ErrorCode::MissingFace, "orbit '" + sigma.name + "' has face index " + std::to_string(face.t) +
                                                  " outside 0.." + std::to_string(expected - 1));
        if (seen[static_cast<std::size_t>(face.t)])
          throw Error(ErrorCode::MissingFace,
                      "orbit '" + sigma.name + "' repeats face index " + std::to_string(face.t));
        seen[static_cast<std::size_t>(face.t)] = true;
        auto it = index[n].find(face.tau);
        if (it == index[n].end())
          throw Error(ErrorCode::BadOrbitRef, "face " + std::to_string(face.t) + " of '" + sigma.name +
                                                  "' refers to unknown degree-" + std::to_string(n) + " orbit '" +
                                                  face.tau + "'");
        GroupElement g = group_->normalize(face.g);
        d.add_to(it->second, s, GAElem::delta(group_, g, face.t % 2 == 0 ? Rational(1) : Rational(-1)));
      }
      for (std::size_t t = 0; t < expected; ++t)
        if (!seen[t])
          throw Error(ErrorCode::MissingFace, "orbit '" + sigma.name + "' lacks face " + std::to_string(t));
    }
    boundaries_.push_back(std::move(d));
  }

  if (check_chain)
    for (int n = 1; n <= top_degree(); ++n) {
      ChainCheck c = verify_chain(n);
      if (!c.holds) {
        const auto& w = *c.witness;
        throw Error(ErrorCode::ChainConditionViolated,
                    "D_" + std::to_string(n - 1) + " D_" + std::to_string(n) + " has nonzero entry (" +
                        std::to_string(w.row) + ", " + std::to_string(w.col) + ") = " + w.value.str());
      }
    }
}

std::size_t EquivariantComplex::orbit_count(int n) const {
  if (n < 0 || static_cast<std::size_t>(n) >= cells_.size()) return 0;
  return cells_[static_cast<std::size_t>(n)].size();
}

void EquivariantComplex::check_degree(int n, int lo, int hi) const {
  if (n < lo || n > hi)
    throw Error(ErrorCode::DegreeOutOfRange, "degree " + std::to_string(n) + " outside " + std::to_string(lo) +
                                                 ".." + std::to_string(hi));
}

const GAMatrix& EquivariantComplex::boundary(int n) const {
  check_degree(n, 0, top_degree());
  return boundaries_[static_cast<std::size_t>(n)];
}

GAMatrix EquivariantComplex::boundary_or_empty(int n) const {
  check_degree(n, -1, top_degree() + 1);
  if (n == -1) return GAMatrix(group_, 0, orbit_count(0));
  if (n == top_degree() + 1) return GAMatrix(group_, orbit_count(n), 0);
  return boundaries_[static_cast<std::size_t>(n)];
}

ChainCheck EquivariantComplex::verify_chain(int n) const {
  check_degree(n, 0, top_degree() + 1);
  GAMatrix prod = mat_mul(boundary_or_empty(n - 1), boundary_or_empty(n));
  for (std::size_t i = 0; i < prod.rows(); ++i)
    for (std::size_t j = 0; j < prod.cols(); ++j)
      if (!prod.coeffs(i, j).empty()) return {false, ChainWitness{n, i, j, prod.at(i, j)}};
  return {true, std::nullopt};
}

Laplacians EquivariantComplex::laplacian(int n) const {
  check_degree(n, 0, top_degree() + 1);
  GAMatrix up = boundary_or_empty(n);
  GAMatrix down = boundary_or_empty(n - 1);
  GAMatrix plus = mat_mul(up, up.star());
  GAMatrix minus = mat_mul(down.star(), down);
  return {mat_add(plus, minus), plus, minus};
}

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

bool require_flag(const json& a, const char* key) {
  if (!a.contains(key) || !a.at(key).is_boolean())
    parse_fail(std::string("assertions: flag '") + key + "' must be given explicitly as a boolean");
  return a.at(key).get<bool>();
}

}  // namespace

EquivariantComplex compile(const json& doc, bool check_chain) {
  if (!doc.is_object()) parse_fail("document must be a JSON object");
  for (const char* key : {"group", "complex", "assertions"})
    if (!doc.contains(key)) parse_fail(std::string("missing top-level key '") + key + "'");

  GroupPtr group = Group::create(parse_group_descriptor(doc.at("group")));

  const json& a = doc.at("assertions");
  Assertions assertions{require_flag(a, "contractible"), require_flag(a, "finite_stabilizers"),
                        require_flag(a, "inversion_free")};

  const json& cx = doc.at("complex");
  if (!cx.contains("cells") || !cx.at("cells").is_array()) parse_fail("complex: missing 'cells' array");
  std::vector<std::vector<Cell>> cells;
  for (const auto& degree : cx.at("cells")) {
    if (!degree.is_array()) parse_fail("complex.cells: each degree must be an array of orbits");
    std::vector<Cell> orbits;
    for (const auto& o : degree) {
      if (!o.is_object() || !o.contains("name") || !o.at("name").is_string())
        parse_fail("complex.cells: orbit needs a string 'name'");
      Cell c{o.at("name").get<std::string>(), {}};
      if (o.contains("faces"))
        for (const auto& f : o.at("faces")) {
          if (!f.contains("t") || !f.contains("g") || !f.contains("tau"))
            parse_fail("complex.cells: face of '" + c.name + "' needs t, g and tau");
          c.faces.push_back({f.at("t").get<int>(), parse_word(f.at("g"), "face of " + c.name),
                             f.at("tau").get<std::string>()});
        }
      orbits.push_back(std::move(c));
    }
    cells.push_back(std::move(orbits));
  }
  if (cx.contains("top_degree") && cx.at("top_degree").get<int>() + 2 != static_cast<int>(cells.size()))
    parse_fail("complex: top_degree N requires cells for degrees 0..N+1");
  return EquivariantComplex(std::move(group), std::move(cells), assertions, check_chain);
}

EquivariantComplex compile_text(const std::string& text, bool check_chain) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    parse_fail(std::string("malformed JSON: ") + e.what());
  }
  return compile(doc, check_chain);
}

}  // namespace cocert
