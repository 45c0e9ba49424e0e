#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "cocert/exact_linalg.hpp"
#include "cocert/group.hpp"
#include "cocert/star_algebra.hpp"

namespace cocert {

// Parse functions throw Error(ParseError) with the offending key in the message.

GroupDescriptor parse_group_descriptor(const nlohmann::json& doc);
nlohmann::json group_descriptor_to_json(const GroupDescriptor& d);

/// Accepts "p/q" strings and JSON integers.
Rational parse_rational_json(const nlohmann::json& v, const std::string& where);
Word parse_word(const nlohmann::json& v, const std::string& where);

/// [[word, "coeff"], ...] in canonical (length, lexicographic) order.
nlohmann::json ga_elem_to_json(const GAElem& a);
GAElem ga_elem_from_json(const GroupPtr& group, const nlohmann::json& v, const std::string& where);

/// {"rows": r, "cols": c, "entries": [[elem, ...], ...]}
nlohmann::json ga_matrix_to_json(const GAMatrix& m);
GAMatrix ga_matrix_from_json(const GroupPtr& group, const nlohmann::json& v, const std::string& where);

/// Rows of rational strings.
nlohmann::json qmatrix_to_json(const QMatrix& m);
QMatrix qmatrix_from_json(const nlohmann::json& v, const std::string& where);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace cocert
