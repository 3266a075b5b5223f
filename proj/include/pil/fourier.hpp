#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "pil/padic.hpp"
#include "pil/rational.hpp"

namespace pil {

using Complex = std::complex<double>;

/// A complex function on (Z/p^n Z)^2, stored row-major as values[x * p^n + y].
class GridFunction {
 public:
  /// Dense grids are limited to p^{2n} <= kMaxPoints.
  static constexpr std::size_t kMaxPoints = 400000;

  explicit GridFunction(const Ambient& amb);

  const Ambient& ambient() const { return amb_; }
  Residue side() const { return side_; }
  std::size_t size() const { return values_.size(); }

  Complex& at(Residue x, Residue y) { return values_[x * side_ + y]; }
  const Complex& at(Residue x, Residue y) const { return values_[x * side_ + y]; }
  std::vector<Complex>& values() { return values_; }
  const std::vector<Complex>& values() const { return values_; }

 private:
  Ambient amb_;
  Residue side_;
  std::vector<Complex> values_;
};

/// f = sum over cubes of w * multiplicity * indicator (cubes at any level).
GridFunction cube_indicator(const CubeSet& P);
/// g = sum over tubes of multiplicity * indicator.
GridFunction tube_indicator(const TubeSet& T);

/// f^(xi) = p^{-n} sum_x f(x) exp(-2 pi i <xi, x> / p^n), by two passes of
/// naive 1-D transforms.
GridFunction dft_forward(const GridFunction& f);

struct ParsevalReport {
  double deviation = 0.0;       ///< |sum f conj(g) - sum f^ conj(g^)|
  double self_deviation = 0.0;  ///< |sum |f|^2 - sum |f^|^2|
};

ParsevalReport check_parseval(const GridFunction& f, const GridFunction& g);

/// (f * g)(x) = sum_y f(y) g(x - y), summed directly.
GridFunction convolve(const GridFunction& f, const GridFunction& g);

/// max over xi of |(f * g)^(xi) - p^n f^(xi) g^(xi)|.
double convolution_spectral_deviation(const GridFunction& f, const GridFunction& g);

/// max over x of |dft(dft(f))(x) - f(-x)|.
double reflection_deviation(const GridFunction& f);

/// max |f^(xi)| over frequencies off the line xi_1 + a xi_2 == 0 (mod p^n);
/// near zero for the indicator of any tube of slope a.
double off_line_spectral_mass(const GridFunction& f, Residue slope);

/// One row of the high/low split of I_w(P, T) at cutoff S = p^k.
struct HighLowReport {
  unsigned k = 0;
  Rational I_exact{0};       ///< combinatorial weighted incidence count
  double L = 0.0;            ///< spectral sum over xi with both coordinates == 0 mod p^k
  double H = 0.0;            ///< total spectral pairing minus L
  Rational low_exact{0};     ///< p^{-k} I_w(P, T thickened by p^k)
  /// p^{(n+k-1)/2} (sum_T mult(T)^2)^{1/2} (sum_x f(x)^2)^{1/2}; for repeat-free
  /// P and T this is p^{(n+k-1)/2} |T|^{1/2} (sum_p w(p)^2)^{1/2}.
  double high_bound = 0.0;
  double lhs = 0.0;          ///< I_exact as a double
  double rhs = 0.0;          ///< high_bound + low_exact

  bool identity_ok(double tol = 1e-6) const;   ///< |I - (L + H)| <= tol max(1, I)
  bool low_ok(double tol = 1e-6) const;        ///< |L - low_exact| <= tol max(1, L)
  bool high_ok(double tol = 1e-6) const;       ///< H <= high_bound + tol
  bool inequality_ok(double tol = 1e-6) const; ///< lhs <= rhs + tol max(1, lhs)

  static std::string csv_header();  ///< k,I,L,H,low_exact,high_bound,lhs,rhs
  std::string csv_row() const;
};

/// High/low split at a single cutoff; P and T at the top level, 1 <= k <= n-1.
HighLowReport highlow_split(const CubeSet& P, const TubeSet& T, unsigned k);

/// Every cutoff k = 1..n-1, sharing one pair of transforms.
std::vector<HighLowReport> highlow_split_all(const CubeSet& P, const TubeSet& T);

}  // namespace pil
