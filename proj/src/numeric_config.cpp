#include "detline/numeric_config.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "detline/scalar.hpp"

namespace detline {

namespace {
Tolerance g_tolerance;
}

const Tolerance& tolerance() { return g_tolerance; }
void set_tolerance(const Tolerance& t) { g_tolerance = t; }

std::string format_decimal(double x) {
  char buf[64];
  double a = std::abs(x);
  if (x == 0.0 || (a >= 1e-4 && a < 1e6))
    std::snprintf(buf, sizeof buf, "%.15f", x);
  else
    std::snprintf(buf, sizeof buf, "%.14e", x);
  return buf;
}

double parse_double(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos)
      return std::stod(text.substr(0, slash)) / std::stod(text.substr(slash + 1));
    size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "not a number: '" + text + "'");
  }
}

// Accepts "p/q", integers and decimals with an optional exponent, all exactly.
Rational parse_rational(const std::string& text) {
  auto fail = [&] { throw Error(ErrorCode::ParseError, "not a rational: '" + text + "'"); };
  if (text.empty()) fail();
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) fail();
    return parse_rational(text.substr(0, slash)) / den;
  }
  size_t i = 0;
  bool neg = false;
  if (text[i] == '+' || text[i] == '-') neg = text[i++] == '-';
  std::string digits;
  int frac = 0;
  bool seen_dot = false;
  for (; i < text.size() && text[i] != 'e' && text[i] != 'E'; ++i) {
    char c = text[i];
    if (c == '.') {
      if (seen_dot) fail();
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_dot) ++frac;
    } else {
      fail();
    }
  }
  if (digits.empty()) fail();
  int exp10 = 0;
  if (i < text.size()) {
    try {
      exp10 = std::stoi(text.substr(i + 1));
    } catch (const std::exception&) {
      fail();
    }
  }
  exp10 -= frac;
  boost::multiprecision::mpz_int num(digits);
  boost::multiprecision::mpz_int scale = boost::multiprecision::pow(boost::multiprecision::mpz_int(10),
                                                                    unsigned(exp10 < 0 ? -exp10 : exp10));
  Rational r = exp10 >= 0 ? Rational(num * scale) : Rational(num, scale);
  return neg ? Rational(-r) : r;
}

}  // namespace detline
