#pragma once

// Scalar types used by every algorithm in the library.
//
// Algorithms are templated on the cell-value scalar `S`, which is either
// `double` (float64 mode) or `Rational` (exact fixed-point mode).  In exact
// mode every average over a dyadic cube is an exact rational, so strict
// comparisons such as "average > lambda" are decided without rounding.

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/gmp.hpp>

namespace pjn {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, Rational>;

template <class S>
concept Scalar = std::is_same_v<S, double> || std::is_same_v<S, Rational>;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

// Natural logarithm of a positive rational without overflow or underflow,
// valid far outside the double exponent range.
double log_of(const Rational& x);

// Shortest round-trip decimal representation.
std::string decimal_string(double x);
inline std::string decimal_string(const Rational& x) { return decimal_string(to_double(x)); }

// "num/den", or "num" for integers.
std::string exact_string(const Rational& x);

// Accepts "3/2", "-4", "0.125", "1e-3", "2.5e2".  Decimal input is
// converted exactly.  Throws std::invalid_argument on malformed text.
Rational parse_rational(std::string_view text);

template <Scalar S>
S from_rational(const Rational& r) {
  if constexpr (is_exact_v<S>) {
    return r;
  } else {
    return to_double(r);
  }
}

// Every finite double is a dyadic rational, so the conversion is exact.
template <Scalar S>
S from_double(double x) {
  return S(x);
}

// 2^e for any integer e.
template <Scalar S>
S pow2(int e) {
  if constexpr (is_exact_v<S>) {
    Integer one = 1;
    if (e >= 0) return Rational(Integer(one << e));
    return Rational(one, Integer(one << -e));
  } else {
    return std::ldexp(1.0, e);
  }
}

template <Scalar S>
S ipow(S base, unsigned long e) {
  S result = S(1);
  while (e != 0) {
    if (e & 1UL) result *= base;
    e >>= 1;
    if (e != 0) base *= base;
  }
  return result;
}

template <Scalar S>
S positive_part(const S& x) {
  return x > 0 ? x : S(0);
}

// A real exponent p given as a rational, e.g. "3/2".  Integral exponents
// keep p-th powers exact in rational mode.
class Exponent {
 public:
  Exponent() = default;
  explicit Exponent(Rational value);
  static Exponent parse(std::string_view text) { return Exponent(parse_rational(text)); }

  const Rational& value() const { return value_; }
  double approx() const { return approx_; }
  bool integral() const { return integral_; }
  unsigned long as_integer() const { return integer_; }

  // q = p / (p - 1); requires p > 1.
  Exponent conjugate() const;

  std::string str() const { return exact_string(value_); }

 private:
  Rational value_{2};
  double approx_ = 2.0;
  bool integral_ = true;
  unsigned long integer_ = 2;
};

// x^(1/p) for a nonnegative weight, computed through logarithms so that
// weights far outside double range still yield finite roots.
double root_of(const Rational& weight, const Exponent& p);
double root_of(double weight, const Exponent& p);

// x^p for a nonnegative value; exact when p is integral.
Rational power_exact(const Rational& x, const Exponent& p);
double power_approx(double x, const Exponent& p);

}  // namespace pjn
