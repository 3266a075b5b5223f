#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "pil/rational.hpp"

namespace pil {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// A dimension exponent s = coeff * log_p(base).
///
/// base == 0 means the exponent is the plain rational `coeff`. Otherwise the
/// exponent is measured against the ambient prime, so `Exponent{2, 2}` is
/// 2*log_p(2); with p = 3 that is the dimension of the digit-{0,1} product
/// Cantor set. Text form: "u/v", "u/v*log(B)" or "log(B)".
struct Exponent {
  Rational coeff{0};
  std::uint64_t base = 0;

  static Exponent rational(Rational r) { return Exponent{r, 0}; }
  static Exponent log_of(std::uint64_t b, Rational c = Rational(1)) { return Exponent{c, b}; }
  static Exponent parse(std::string_view text);

  bool is_rational() const { return base == 0; }
  double value(unsigned p) const;
  std::string to_string() const;

  friend bool operator==(const Exponent&, const Exponent&) = default;
};

/// An exact positive quantity factor * base^exponent.
///
/// Used for spacing constants such as count * p^{m s} / total, which are
/// irrational whenever s is. Comparisons are exact.
struct ScaledPower {
  BigRational factor{1};
  std::uint64_t base = 1;
  Rational exponent{0};

  /// factor * p^{m*s} expressed in the base carried by s.
  static ScaledPower of(BigRational factor, unsigned p, const Exponent& s, std::int64_t m);

  double to_double() const;
  long double log_value() const;  // natural log; -inf when factor == 0

  /// Exact rational value when base^exponent is rational, else "f*B^(u/v)".
  std::string to_string() const;

  ScaledPower scaled(const BigRational& by) const {
    ScaledPower r = *this;
    r.factor *= by;
    return r;
  }
};

/// Exact three-way comparison of a and b: -1, 0 or 1.
///
/// Decides on long-double logarithms when they are clearly apart and falls
/// back to big-integer arithmetic otherwise. When the common denominator of
/// the exponents exceeds kExactDenominatorLimit the logarithmic answer is
/// returned (0 if the logs agree to within 1e-15 relative).
int compare(const ScaledPower& a, const ScaledPower& b);

inline constexpr std::int64_t kExactDenominatorLimit = 4096;

BigInt pow_big(const BigInt& base, std::uint64_t exp);

}  // namespace pil
