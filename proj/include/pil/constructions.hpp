#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pil/configuration.hpp"
#include "pil/exponent.hpp"
#include "pil/padic.hpp"

namespace pil {

/// SplitMix64: state += 0x9E3779B97F4A7C15, then the output is the state
/// mixed by z = (z ^ z>>30) * 0xBF58476D1CE4E5B9; z = (z ^ z>>27) * 0x94D049BB133111EB;
/// z ^ z>>31. Bounded draws reject the low 2^64 mod bound values.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

/// Independent seed for item `index` of a run with master seed `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// `count` distinct values of [0, range), sorted (Floyd's algorithm).
std::vector<std::uint64_t> sample_without_replacement(SplitMix64& rng, std::uint64_t range, std::uint64_t count);

/// Allowed base-p digits; the digit Cantor set has dimension log_p |digits|.
class DigitSet {
 public:
  DigitSet(unsigned p, std::vector<unsigned> digits);
  static DigitSet full(unsigned p);
  /// "0,1" style list.
  static DigitSet parse(unsigned p, std::string_view text);

  unsigned p() const { return p_; }
  const std::vector<unsigned>& digits() const { return digits_; }
  std::size_t size() const { return digits_.size(); }
  /// log_p |digits| as an exact exponent (rational 0 or 1 at the extremes).
  Exponent dimension() const;
  std::string to_string() const;

 private:
  unsigned p_;
  std::vector<unsigned> digits_;
};

/// Residues of [0, p^level) whose `level` base-p digits all lie in `digits`, sorted.
std::vector<Residue> cantor_1d(const Ambient& amb, const DigitSet& digits, unsigned level);
inline std::vector<Residue> cantor_1d(const Ambient& amb, const DigitSet& digits) {
  return cantor_1d(amb, digits, amb.n());
}

/// P = A x B at the top level, with T(p) = {tube(a, y - a x) : a in slopes}.
Configuration product_config(const Ambient& amb, std::span<const Residue> A, std::span<const Residue> B,
                             std::span<const Residue> slopes);

/// `num_cubes` distinct top-level cubes and, per cube, M distinct slopes from
/// the digit Cantor slope pool. Deterministic in the seed.
Configuration random_config(std::uint64_t seed, const Ambient& amb, std::uint64_t num_cubes, std::uint64_t M,
                            const DigitSet& slope_digits);

/// Grid of arithmetic progressions {0, step, ..., (len-1) step}^2 with slopes
/// from the same progression. Shape only; no sharpness is claimed.
Configuration wolff_grid_config(const Ambient& amb, Residue step, std::uint64_t len);

struct StrongSpacingReport {
  double max_ratio = 0.0;  ///< max of |P ∩ Q|_delta / max(rho^{2-s} |P|_delta, (rho/delta)^s)
  unsigned level = 0;      ///< rho = p^{-level} of the maximum
  Cube witness;
};

/// Measured strong-spacing ratio over every scale and every cube of that scale.
StrongSpacingReport strong_spacing_ratio(const CubeSet& P, const Exponent& s);

}  // namespace pil
