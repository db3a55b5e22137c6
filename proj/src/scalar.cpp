#include "pjn/scalar.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <gmp.h>

#include "pjn/errors.hpp"

namespace pjn {

namespace {

double log_of_integer(const Integer& z) {
  long exp = 0;
  const double mantissa = mpz_get_d_2exp(&exp, z.backend().data());
  return std::log(mantissa) + static_cast<double>(exp) * std::log(2.0);
}

Integer parse_integer(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty integer");
  std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (i == text.size()) throw std::invalid_argument("malformed integer '" + std::string(text) + "'");
  for (std::size_t j = i; j < text.size(); ++j) {
    if (text[j] < '0' || text[j] > '9') {
      throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    }
  }
  // A leading 0 would make GMP read the digits as octal.
  std::string_view digits = text.substr(i);
  while (digits.size() > 1 && digits.front() == '0') digits.remove_prefix(1);
  Integer z{std::string(digits)};
  return text[0] == '-' ? Integer(-z) : z;
}

Rational pow10(long e) {
  Integer p = 1;
  for (long k = 0; k < (e < 0 ? -e : e); ++k) p *= 10;
  return e >= 0 ? Rational(p) : Rational(Integer(1), p);
}

}  // namespace

double log_of(const Rational& x) {
  if (x <= 0) throw std::domain_error("log of a nonpositive rational");
  return log_of_integer(numerator(x)) - log_of_integer(denominator(x));
}

std::string decimal_string(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string exact_string(const Rational& x) {
  if (denominator(x) == 1) return numerator(x).str();
  return numerator(x).str() + "/" + denominator(x).str();
}

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty number");

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const Integer num = parse_integer(text.substr(0, slash));
    const Integer den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }

  long exponent = 0;
  std::string_view mantissa = text;
  if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    const std::string_view exp_text = text.substr(e + 1);
    const Integer ez = parse_integer(exp_text);
    if (ez > 4000 || ez < -4000) throw std::invalid_argument("exponent out of range in '" + std::string(text) + "'");
    exponent = ez.convert_to<long>();
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false;
  for (char ch : mantissa) {
    if (ch == '.') {
      if (seen_dot) throw std::invalid_argument("malformed number '" + std::string(text) + "'");
      seen_dot = true;
      continue;
    }
    digits.push_back(ch);
    if (seen_dot) ++frac_digits;
  }
  if (digits == "-" || digits == "+" || digits.empty()) {
    throw std::invalid_argument("malformed number '" + std::string(text) + "'");
  }
  return Rational(parse_integer(digits)) * pow10(exponent - frac_digits);
}

Exponent::Exponent(Rational value) : value_(std::move(value)) {
  if (value_ <= 0) throw InvalidExponent("exponent must be positive, got " + exact_string(value_));
  approx_ = to_double(value_);
  integral_ = denominator(value_) == 1 && value_ < 1000000;
  integer_ = integral_ ? numerator(value_).convert_to<unsigned long>() : 0;
}

Exponent Exponent::conjugate() const {
  if (value_ <= 1) throw InvalidExponent("conjugate exponent requires p > 1, got " + str());
  return Exponent(value_ / (value_ - 1));
}

double root_of(const Rational& weight, const Exponent& p) {
  if (weight < 0) throw std::domain_error("root of a negative weight");
  if (weight == 0) return 0.0;
  return std::exp(log_of(weight) / p.approx());
}

double root_of(double weight, const Exponent& p) {
  if (weight < 0) throw std::domain_error("root of a negative weight");
  if (weight == 0) return 0.0;
  return std::pow(weight, 1.0 / p.approx());
}

Rational power_exact(const Rational& x, const Exponent& p) {
  if (!p.integral()) throw std::logic_error("exact power requires an integral exponent");
  return ipow<Rational>(x, p.as_integer());
}

double power_approx(double x, const Exponent& p) {
  if (p.integral()) return ipow<double>(x, p.as_integer());
  return std::pow(x, p.approx());
}

}  // namespace pjn
