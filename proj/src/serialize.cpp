#include "cocert/serialize.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>

namespace cocert {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ParseError, where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) parse_fail(where, std::string("missing key '") + key + "'");
  return obj.at(key);
}

std::vector<int> parse_int_array(const json& v, const std::string& where) {
  if (!v.is_array()) parse_fail(where, "expected an array of integers");
  std::vector<int> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) parse_fail(where, "expected an integer");
    out.push_back(x.get<int>());
  }
  return out;
}

std::size_t generator_index(const GroupDescriptor& d, const std::string& name, const std::string& where) {
  auto it = std::find(d.generators.begin(), d.generators.end(), name);
  if (it == d.generators.end()) parse_fail(where, "unknown generator '" + name + "'");
  return static_cast<std::size_t>(it - d.generators.begin()) + 1;
}

}  // namespace

Rational parse_rational_json(const json& v, const std::string& where) {
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const Error& e) {
      parse_fail(where, e.what());
    }
  }
  if (v.is_number_integer()) return Rational(v.get<long long>());
  parse_fail(where, "expected a rational string such as \"p/q\"");
}

Word parse_word(const json& v, const std::string& where) { return parse_int_array(v, where); }

GroupDescriptor parse_group_descriptor(const json& doc) {
  const std::string where = "group";
  if (!doc.is_object()) parse_fail(where, "expected an object");
  GroupDescriptor d;
  const auto kind = require(doc, "kind", where).get<std::string>();
  if (kind == "free")
    d.kind = GroupDescriptor::Kind::Free;
  else if (kind == "finite-permutation")
    d.kind = GroupDescriptor::Kind::FinitePermutation;
  else if (kind == "rewriting")
    d.kind = GroupDescriptor::Kind::Rewriting;
  else
    parse_fail(where, "unknown kind '" + kind + "'");

  for (const auto& g : require(doc, "generators", where)) {
    if (!g.is_string()) parse_fail(where, "generator names must be strings");
    d.generators.push_back(g.get<std::string>());
  }
  if (doc.contains("permutations"))
    for (const auto& p : doc.at("permutations")) d.permutations.push_back(parse_int_array(p, where + ".permutations"));
  if (doc.contains("degree")) d.degree = doc.at("degree").get<std::size_t>();
  if (doc.contains("rules"))
    for (const auto& r : doc.at("rules"))
      d.rules.push_back({parse_word(require(r, "lhs", where + ".rules"), where + ".rules.lhs"),
                         parse_word(require(r, "rhs", where + ".rules"), where + ".rules.rhs")});
  if (doc.contains("inverses"))
    for (const auto& [name, w] : doc.at("inverses").items())
      d.inverse_words[static_cast<int>(generator_index(d, name, where + ".inverses"))] =
          parse_word(w, where + ".inverses");
  if (doc.contains("quotients"))
    for (const auto& [name, images] : doc.at("quotients").items()) {
      std::vector<std::vector<int>> imgs;
      for (const auto& p : images) imgs.push_back(parse_int_array(p, where + ".quotients." + name));
      d.quotients[name] = std::move(imgs);
    }
  if (doc.contains("step_budget")) d.step_budget = doc.at("step_budget").get<std::size_t>();
  if (doc.contains("size_cap")) d.size_cap = doc.at("size_cap").get<std::size_t>();
  return d;
}

json group_descriptor_to_json(const GroupDescriptor& d) {
  json out;
  out["kind"] = std::string(kind_name(d.kind));
  out["generators"] = d.generators;
  if (d.kind == GroupDescriptor::Kind::FinitePermutation) {
    out["permutations"] = d.permutations;
    out["degree"] = d.degree;
  }
  if (d.kind == GroupDescriptor::Kind::Rewriting) {
    json rules = json::array();
    for (const auto& r : d.rules) rules.push_back({{"lhs", r.lhs}, {"rhs", r.rhs}});
    out["rules"] = rules;
    json inv = json::object();
    for (const auto& [g, w] : d.inverse_words) inv[d.generators[static_cast<std::size_t>(g) - 1]] = w;
    out["inverses"] = inv;
    out["step_budget"] = d.step_budget;
  }
  if (!d.quotients.empty()) out["quotients"] = d.quotients;
  out["size_cap"] = d.size_cap;
  return out;
}

json ga_elem_to_json(const GAElem& a) {
  json out = json::array();
  for (const auto& g : a.support())
    out.push_back(json::array({a.group()->word_of(g), to_string(a.coefficient(g))}));
  return out;
}

GAElem ga_elem_from_json(const GroupPtr& group, const json& v, const std::string& where) {
  if (!v.is_array()) parse_fail(where, "expected an array of [word, coefficient] pairs");
  std::vector<std::pair<Word, Rational>> terms;
  for (const auto& term : v) {
    if (!term.is_array() || term.size() != 2) parse_fail(where, "expected a [word, coefficient] pair");
    terms.emplace_back(parse_word(term[0], where), parse_rational_json(term[1], where));
  }
  return GAElem::from_terms(group, terms);
}

json ga_matrix_to_json(const GAMatrix& m) {
  json entries = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(ga_elem_to_json(m.at(i, j)));
    entries.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

GAMatrix ga_matrix_from_json(const GroupPtr& group, const json& v, const std::string& where) {
  auto rows = require(v, "rows", where).get<std::size_t>();
  auto cols = require(v, "cols", where).get<std::size_t>();
  const json& entries = require(v, "entries", where);
  if (!entries.is_array() || entries.size() != rows) parse_fail(where, "entries must have one array per row");
  GAMatrix out(group, rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!entries[i].is_array() || entries[i].size() != cols) parse_fail(where, "row length differs from cols");
    for (std::size_t j = 0; j < cols; ++j) out.set(i, j, ga_elem_from_json(group, entries[i][j], where));
  }
  return out;
}

json qmatrix_to_json(const QMatrix& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

QMatrix qmatrix_from_json(const json& v, const std::string& where) {
  if (!v.is_array()) parse_fail(where, "expected an array of rows");
  std::size_t rows = v.size();
  std::size_t cols = rows == 0 ? 0 : v[0].size();
  QMatrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) parse_fail(where, "ragged matrix");
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = parse_rational_json(v[i][j], where);
  }
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::string out;
  out.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

}  // namespace cocert
