#include "dtl/scalar.hpp"

#include <cctype>
#include <cstdio>

namespace dtl {

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSummable: return "NonSummable";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DependentVectors: return "DependentVectors";
    case ErrorKind::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorKind::DepthExceeded: return "DepthExceeded";
    case ErrorKind::ChainInconsistent: return "ChainInconsistent";
    case ErrorKind::FloatingAmbiguous: return "FloatingAmbiguous";
    case ErrorKind::EmptyAuxiliarySpace: return "EmptyAuxiliarySpace";
    case ErrorKind::TruncationTooShort: return "TruncationTooShort";
    case ErrorKind::CaseMismatch: return "CaseMismatch";
    case ErrorKind::IdentityViolated: return "IdentityViolated";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::QsAssumptionViolated: return "QsAssumptionViolated";
    case ErrorKind::NearSingular: return "NearSingular";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Error";
}

namespace {

mp::mpz_int parse_integer(std::string_view s, std::string_view whole) {
  if (s.empty()) fail(ErrorKind::ParseError, "empty number in '" + std::string(whole) + "'");
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      fail(ErrorKind::ParseError, "not a rational literal: '" + std::string(whole) + "'");
  return mp::mpz_int(std::string(s));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

// Accepts "p", "p/q" and terminating decimals "a.b", each with an optional sign.
Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  text = trim(text);
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Rational value;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    mp::mpz_int num = parse_integer(trim(text.substr(0, slash)), whole);
    mp::mpz_int den = parse_integer(trim(text.substr(slash + 1)), whole);
    if (den == 0) fail(ErrorKind::ParseError, "zero denominator in '" + std::string(whole) + "'");
    value = Rational(num, den);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view ip = text.substr(0, dot), fp = text.substr(dot + 1);
    mp::mpz_int num = parse_integer(std::string(ip.empty() ? "0" : ip) + std::string(fp), whole);
    mp::mpz_int den = mp::pow(mp::mpz_int(10), static_cast<unsigned>(fp.size()));
    value = Rational(num, den);
  } else {
    value = Rational(parse_integer(text, whole));
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& x) {
  if (mp::denominator(x) == 1) return mp::numerator(x).str();
  return mp::numerator(x).str() + "/" + mp::denominator(x).str();
}

std::string to_string(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_string(const Real50& x) { return x.str(50, std::ios_base::scientific); }

std::optional<Rational> exact_sqrt(const Rational& x) {
  if (x < 0) return std::nullopt;
  mp::mpz_int n = mp::numerator(x), d = mp::denominator(x);
  mp::mpz_int rn = mp::sqrt(n), rd = mp::sqrt(d);
  if (rn * rn != n || rd * rd != d) return std::nullopt;
  return Rational(rn, rd);
}

}  // namespace dtl
