#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <string_view>

#include "qconcat/error.hpp"

namespace qconcat {

using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

// Parses "p", "p/q", or a decimal/scientific literal such as "1e60" or
// "0.25" exactly.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  require(!s.empty(), "empty rational literal");
  if (s.find('/') != std::string::npos) {
    Rational r;
    require(r.set_str(s, 10) == 0, "malformed rational: " + s);
    require(r.get_den() != 0, "zero denominator: " + s);
    r.canonicalize();
    return r;
  }
  bool negative = false;
  std::size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') {
    negative = s[0] == '-';
    pos = 1;
  }
  std::string digits;
  long exponent = 0;
  bool seen_point = false;
  bool seen_digit = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c == 'e' || c == 'E') {
      require(pos + 1 < s.size(), "malformed exponent: " + s);
      try {
        std::size_t used = 0;
        exponent += std::stol(s.substr(pos + 1), &used);
        require(pos + 1 + used == s.size(), "malformed exponent: " + s);
      } catch (const std::logic_error&) {
        throw InvalidInput("malformed exponent: " + s);
      }
      pos = s.size();
      break;
    } else {
      throw InvalidInput("malformed number: " + s);
    }
  }
  require(seen_digit, "malformed number: " + s);
  BigInt mantissa(digits, 10);
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational r = exponent >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

// Floor of log2|r| for r != 0, computed from bit lengths (exact to within one).
inline long log2_magnitude(const Rational& r) {
  long num_bits = static_cast<long>(mpz_sizeinbase(r.get_num_mpz_t(), 2));
  long den_bits = static_cast<long>(mpz_sizeinbase(r.get_den_mpz_t(), 2));
  return num_bits - den_bits;
}

}  // namespace qconcat
