#include "cocert/rational.hpp"

#include <cmath>

#include "cocert/error.hpp"

namespace cocert {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownGenerator: return "UNKNOWN_GENERATOR";
    case ErrorCode::RuleLoopGuard: return "RULE_LOOP_GUARD";
    case ErrorCode::BackendMismatch: return "BACKEND_MISMATCH";
    case ErrorCode::SizeCapExceeded: return "SIZE_CAP_EXCEEDED";
    case ErrorCode::NotFiniteUnderCap: return "NOT_FINITE_UNDER_CAP";
    case ErrorCode::UnknownHom: return "UNKNOWN_HOM";
    case ErrorCode::InvalidDescriptor: return "INVALID_DESCRIPTOR";
    case ErrorCode::DimMismatch: return "DIM_MISMATCH";
    case ErrorCode::NonpositiveWeight: return "NONPOSITIVE_WEIGHT";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::MissingFace: return "MISSING_FACE";
    case ErrorCode::BadOrbitRef: return "BAD_ORBIT_REF";
    case ErrorCode::ChainConditionViolated: return "CHAIN_CONDITION_VIOLATED";
    case ErrorCode::DegreeOutOfRange: return "DEGREE_OUT_OF_RANGE";
    case ErrorCode::InvalidRepresentation: return "INVALID_REPRESENTATION";
    case ErrorCode::FloatModeUnsupported: return "FLOAT_MODE_UNSUPPORTED";
    case ErrorCode::NotSymmetric: return "NOT_SYMMETRIC";
    case ErrorCode::NotPsd: return "NOT_PSD";
    case ErrorCode::SupportTooSmall: return "SUPPORT_TOO_SMALL";
    case ErrorCode::InvalidSupport: return "INVALID_SUPPORT";
    case ErrorCode::MalformedCert: return "MALFORMED_CERT";
  }
  return "UNKNOWN";
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

Integer parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s))
    throw Error(ErrorCode::ParseError, "invalid rational literal '" + std::string(whole) + "'");
  Integer value{std::string(s)};
  return negative ? Integer(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer p = parse_integer(text.substr(0, slash), text);
    Integer q = parse_integer(text.substr(slash + 1), text);
    if (q == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
    return Rational(p, q);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    bool negative = !int_part.empty() && int_part[0] == '-';
    if (!int_part.empty() && (int_part[0] == '-' || int_part[0] == '+')) int_part.remove_prefix(1);
    if ((!int_part.empty() && !all_digits(int_part)) || !all_digits(frac_part))
      throw Error(ErrorCode::ParseError, "invalid rational literal '" + std::string(text) + "'");
    Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(frac_part.size()));
    Integer whole = int_part.empty() ? Integer(0) : Integer(std::string(int_part));
    Rational value = Rational(whole) + Rational(Integer(std::string(frac_part)), scale);
    return negative ? Rational(-value) : value;
  }
  return Rational(parse_integer(text, text));
}

std::string to_string(const Rational& q) {
  Integer num = numerator_of(q);
  Integer den = denominator_of(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Integer numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
Integer denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

Rational limit_denominator(const Rational& x, const Integer& max_denominator) {
  if (max_denominator < 1) throw Error(ErrorCode::ParseError, "denominator bound must be positive");
  if (denominator_of(x) <= max_denominator) return x;
  bool negative = x < 0;
  Rational ax = negative ? Rational(-x) : x;
  Integer n = numerator_of(ax), d = denominator_of(ax);
  Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  while (true) {
    Integer a = n / d;  // both nonnegative, so truncation is floor
    Integer q2 = q0 + a * q1;
    if (q2 > max_denominator) break;
    Integer p2 = p0 + a * p1;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    Integer r = n - a * d;
    n = d;
    d = r;
    if (d == 0) break;
  }
  Integer k = (max_denominator - q0) / q1;
  Rational bound1(p0 + k * p1, q0 + k * q1);
  Rational bound2(p1, q1);
  Rational best = abs(bound2 - ax) <= abs(bound1 - ax) ? bound2 : bound1;
  return negative ? Rational(-best) : best;
}

Rational from_double(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::ParseError, "non-finite value");
  return Rational(x);
}

bool is_rational_square(const Rational& q, Rational& root) {
  if (q < 0) return false;
  Integer n = numerator_of(q), d = denominator_of(q);
  Integer rn = boost::multiprecision::sqrt(n);
  Integer rd = boost::multiprecision::sqrt(d);
  if (rn * rn != n || rd * rd != d) return false;
  root = Rational(rn, rd);
  return true;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace cocert
