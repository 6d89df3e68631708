#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <complex>
#include <string>

#include "detline/errors.hpp"

namespace detline {

using Rational = boost::multiprecision::mpq_rational;
using HpReal = boost::multiprecision::cpp_bin_float_50;
using HpComplex = boost::multiprecision::cpp_complex_50;
using Cplx = std::complex<double>;

/// Decimal rendering shared by every report: fixed with 15 decimals in the
/// ordinary range, scientific with 15 significant decimals outside it.
std::string format_decimal(double x);

Rational parse_rational(const std::string& text);
double parse_double(const std::string& text);

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  using Real = Rational;
  static constexpr bool exact = true;
  static constexpr bool is_complex = false;
  static constexpr const char* backend = "exact";

  static Real abs(const Rational& x) { return boost::multiprecision::abs(x); }
  static Rational conj(const Rational& x) { return x; }
  static double to_double(const Real& x) { return x.convert_to<double>(); }
  static Cplx to_complex(const Rational& x) { return {to_double(x), 0.0}; }
  static Rational from_parts(const std::string& re, const std::string& im) {
    if (!im.empty() && parse_rational(im) != 0)
      throw Error(ErrorCode::UnsupportedBackend, "exact backend is real-only; got imaginary part " + im);
    return parse_rational(re);
  }
  // Doubles convert exactly (every finite double is a dyadic rational).
  static Rational from_complex(Cplx z) {
    if (z.imag() != 0.0)
      throw Error(ErrorCode::UnsupportedBackend, "exact backend is real-only");
    return Rational(z.real());
  }
  static Rational from_ratio(long long p, long long q) { return Rational(p, q); }
  static std::string format(const Real& x) { return x.str(); }
};

template <>
struct ScalarTraits<double> {
  using Real = double;
  static constexpr bool exact = false;
  static constexpr bool is_complex = false;
  static constexpr const char* backend = "f64";

  static Real abs(double x) { return std::abs(x); }
  static double conj(double x) { return x; }
  static double to_double(Real x) { return x; }
  static Cplx to_complex(double x) { return {x, 0.0}; }
  static double from_parts(const std::string& re, const std::string& im) {
    if (!im.empty() && parse_double(im) != 0.0)
      throw Error(ErrorCode::UnsupportedBackend, "real field selected; got imaginary part " + im);
    return parse_double(re);
  }
  static double from_complex(Cplx z) {
    if (z.imag() != 0.0) throw Error(ErrorCode::UnsupportedBackend, "real field selected for complex data");
    return z.real();
  }
  static double from_ratio(long long p, long long q) { return double(p) / double(q); }
  static std::string format(Real x) { return format_decimal(x); }
};

template <>
struct ScalarTraits<Cplx> {
  using Real = double;
  static constexpr bool exact = false;
  static constexpr bool is_complex = true;
  static constexpr const char* backend = "f64";

  static Real abs(const Cplx& x) { return std::abs(x); }
  static Cplx conj(const Cplx& x) { return std::conj(x); }
  static double to_double(Real x) { return x; }
  static Cplx to_complex(const Cplx& x) { return x; }
  static Cplx from_parts(const std::string& re, const std::string& im) {
    return {parse_double(re), im.empty() ? 0.0 : parse_double(im)};
  }
  static Cplx from_complex(Cplx z) { return z; }
  static Cplx from_ratio(long long p, long long q) { return {double(p) / double(q), 0.0}; }
  static std::string format(Real x) { return format_decimal(x); }
};

template <>
struct ScalarTraits<HpReal> {
  using Real = HpReal;
  static constexpr bool exact = false;
  static constexpr bool is_complex = false;
  static constexpr const char* backend = "hp";

  static Real abs(const HpReal& x) { return boost::multiprecision::abs(x); }
  static HpReal conj(const HpReal& x) { return x; }
  static double to_double(const Real& x) { return x.convert_to<double>(); }
  static Cplx to_complex(const HpReal& x) { return {to_double(x), 0.0}; }
  static HpReal from_parts(const std::string& re, const std::string& im) {
    if (!im.empty() && parse_double(im) != 0.0)
      throw Error(ErrorCode::UnsupportedBackend, "real field selected; got imaginary part " + im);
    return parse_hp(re);
  }
  static HpReal from_complex(Cplx z) {
    if (z.imag() != 0.0) throw Error(ErrorCode::UnsupportedBackend, "real field selected for complex data");
    return HpReal(z.real());
  }
  static HpReal from_ratio(long long p, long long q) { return HpReal(p) / HpReal(q); }
  static std::string format(const Real& x) { return format_decimal(to_double(x)); }

  static HpReal parse_hp(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) return HpReal(s.substr(0, slash)) / HpReal(s.substr(slash + 1));
    return HpReal(s);
  }
};

template <>
struct ScalarTraits<HpComplex> {
  using Real = HpReal;
  static constexpr bool exact = false;
  static constexpr bool is_complex = true;
  static constexpr const char* backend = "hp";

  static Real abs(const HpComplex& x) { return boost::multiprecision::abs(x); }
  static HpComplex conj(const HpComplex& x) { return boost::multiprecision::conj(x); }
  static double to_double(const Real& x) { return x.convert_to<double>(); }
  static Cplx to_complex(const HpComplex& x) {
    return {x.real().convert_to<double>(), x.imag().convert_to<double>()};
  }
  static HpComplex from_parts(const std::string& re, const std::string& im) {
    return HpComplex(ScalarTraits<HpReal>::parse_hp(re),
                     im.empty() ? HpReal(0) : ScalarTraits<HpReal>::parse_hp(im));
  }
  static HpComplex from_complex(Cplx z) { return HpComplex(HpReal(z.real()), HpReal(z.imag())); }
  static HpComplex from_ratio(long long p, long long q) { return HpComplex(HpReal(p) / HpReal(q)); }
  static std::string format(const Real& x) { return format_decimal(to_double(x)); }
};

template <class S>
using RealOf = typename ScalarTraits<S>::Real;

template <class S>
RealOf<S> abs_of(const S& x) {
  return ScalarTraits<S>::abs(x);
}

template <class S>
double abs_double(const S& x) {
  return ScalarTraits<S>::to_double(ScalarTraits<S>::abs(x));
}

template <class S>
bool is_exact_zero(const S& x) {
  return x == S(0);
}

// Integer powers with negative exponents (exponents here are ±1 and small).
template <class T>
T ipow(const T& base, int e) {
  T result(1);
  int k = e < 0 ? -e : e;
  for (int i = 0; i < k; ++i) result *= base;
  if (e < 0) result = T(1) / result;
  return result;
}

}  // namespace detline
