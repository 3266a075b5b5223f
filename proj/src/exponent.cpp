#include "pil/exponent.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pil {

Exponent Exponent::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  auto lp = text.find("log(");
  if (lp == std::string_view::npos) return Exponent::rational(Rational::parse(text));
  if (text.back() != ')') throw std::invalid_argument("bad exponent: " + std::string(text));
  auto inner = text.substr(lp + 4, text.size() - lp - 5);
  std::uint64_t b = 0;
  try {
    b = std::stoull(std::string(trim(inner)));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad log base in exponent: " + std::string(text));
  }
  if (b < 1) throw std::invalid_argument("log base must be >= 1: " + std::string(text));
  Rational c(1);
  if (lp > 0) {
    auto head = trim(text.substr(0, lp));
    if (head.empty() || head.back() != '*') {
      throw std::invalid_argument("bad exponent: " + std::string(text));
    }
    head.remove_suffix(1);
    c = Rational::parse(head);
  }
  return Exponent{c, b};
}

double Exponent::value(unsigned p) const {
  if (is_rational()) return coeff.to_double();
  return coeff.to_double() * std::log(static_cast<double>(base)) / std::log(static_cast<double>(p));
}

std::string Exponent::to_string() const {
  if (is_rational()) return coeff.to_string();
  return coeff.to_string() + "*log(" + std::to_string(base) + ")";
}

BigInt pow_big(const BigInt& base, std::uint64_t exp) {
  BigInt result = 1;
  BigInt b = base;
  while (exp > 0) {
    if (exp & 1U) result *= b;
    exp >>= 1U;
    if (exp > 0) b *= b;
  }
  return result;
}

ScaledPower ScaledPower::of(BigRational factor, unsigned p, const Exponent& s, std::int64_t m) {
  ScaledPower r;
  r.factor = std::move(factor);
  r.base = s.is_rational() ? p : s.base;
  r.exponent = s.coeff * Rational(m);
  return r;
}

long double ScaledPower::log_value() const {
  if (factor == 0) return -std::numeric_limits<long double>::infinity();
  long double lf = std::log(static_cast<long double>(boost::multiprecision::numerator(factor))) -
                   std::log(static_cast<long double>(boost::multiprecision::denominator(factor)));
  if (base == 1 || exponent == Rational(0)) return lf;
  return lf + exponent.to_long_double() * std::log(static_cast<long double>(base));
}

double ScaledPower::to_double() const {
  if (factor == 0) return 0.0;
  return static_cast<double>(std::exp(log_value()));
}

std::string ScaledPower::to_string() const {
  std::ostringstream os;
  auto write = [&os](const BigRational& q) {
    os << boost::multiprecision::numerator(q) << "/" << boost::multiprecision::denominator(q);
  };
  if (base == 1 || exponent == Rational(0) || factor == 0) {
    write(factor);
  } else if (exponent.is_integer() && std::abs(exponent.num()) <= 4096) {
    BigRational v = factor;
    BigInt pw = pow_big(BigInt(base), static_cast<std::uint64_t>(std::abs(exponent.num())));
    if (exponent.num() > 0) {
      v *= BigRational(pw);
    } else {
      v /= BigRational(pw);
    }
    write(v);
  } else {
    write(factor);
    os << "*" << base << "^(" << exponent.to_string() << ")";
  }
  return os.str();
}

int compare(const ScaledPower& a, const ScaledPower& b) {
  const bool az = a.factor == 0;
  const bool bz = b.factor == 0;
  if (az || bz) return az && bz ? 0 : (az ? -1 : 1);
  if (a.factor < 0 || b.factor < 0) throw std::domain_error("ScaledPower must be nonnegative");

  const long double la = a.log_value();
  const long double lb = b.log_value();
  const long double scale = std::max<long double>({1.0L, std::fabs(la), std::fabs(lb)});
  if (std::fabs(la - lb) > 1e-9L * scale) return la < lb ? -1 : 1;

  const std::int64_t va = a.exponent.den();
  const std::int64_t vb = b.exponent.den();
  const std::int64_t common = std::lcm(va, vb);
  if (common > kExactDenominatorLimit) {
    if (std::fabs(la - lb) <= 1e-15L * scale) return 0;
    return la < lb ? -1 : 1;
  }
  // Raise both sides to the common denominator: all exponents become integers.
  const std::int64_t ea = a.exponent.num() * (common / va);
  const std::int64_t eb = b.exponent.num() * (common / vb);
  const auto uc = static_cast<std::uint64_t>(common);
  BigInt lhs = pow_big(boost::multiprecision::numerator(a.factor), uc) *
               pow_big(boost::multiprecision::denominator(b.factor), uc);
  BigInt rhs = pow_big(boost::multiprecision::numerator(b.factor), uc) *
               pow_big(boost::multiprecision::denominator(a.factor), uc);
  auto apply = [](BigInt& pos_side, BigInt& neg_side, std::uint64_t base, std::int64_t e) {
    if (base == 1 || e == 0) return;
    if (e > 0) {
      pos_side *= pow_big(BigInt(base), static_cast<std::uint64_t>(e));
    } else {
      neg_side *= pow_big(BigInt(base), static_cast<std::uint64_t>(-e));
    }
  };
  apply(lhs, rhs, a.base, ea);
  apply(rhs, lhs, b.base, eb);
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

}  // namespace pil
