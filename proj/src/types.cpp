#include "uspdisc/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uspdisc {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (s.find_first_of(".eE") == std::string::npos) {
    Rational r;
    if (r.set_str(s, 10) != 0) {
      throw std::invalid_argument("bad rational literal: " + s);
    }
    r.canonicalize();
    return r;
  }
  // Decimal notation: mantissa digits over a power of ten.
  bool negative = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string digits;
  long exponent = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c == 'e' || c == 'E') {
      exponent += std::stol(s.substr(pos + 1));
      break;
    } else {
      throw std::invalid_argument("bad decimal literal: " + s);
    }
  }
  if (!any_digit) throw std::invalid_argument("bad decimal literal: " + s);
  mpz_class mantissa(digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational r = exponent >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite weight");
  return Rational(value);
}

std::string to_string(const Rational& value) { return value.get_str(10); }

}  // namespace uspdisc
