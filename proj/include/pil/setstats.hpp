#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pil/exponent.hpp"
#include "pil/padic.hpp"

namespace pil {

/// |P|_{p^{-m}}: number of distinct level-m parents of P (multiplicity ignored).
std::uint64_t covering_number(const CubeSet& P, unsigned level);

/// Distinct cubes of P grouped by their level-m parent: parent -> count.
std::map<Cube, std::uint64_t> fiber_sizes(const CubeSet& P, unsigned level);

/// For each scale m in [0, level(P)], the largest |P ∩ Q|_delta over level-m cubes Q
/// together with one Q attaining it (the smallest in cube order).
struct ScaleMaximum {
  unsigned level;
  std::uint64_t count;
  Cube witness;
};
std::vector<ScaleMaximum> scale_maxima(const CubeSet& P);

struct SpacingCertificate {
  enum class Kind { Frostman, KatzTao };

  Kind kind = Kind::Frostman;
  Exponent s;
  unsigned p = 2;
  unsigned delta_level = 0;      ///< level of the certified set
  std::uint64_t covering = 0;    ///< |P|_delta
  ScaledPower c_min;             ///< minimal admissible constant
  unsigned witness_level = 0;    ///< scale r = p^{-witness_level} attaining c_min
  Cube witness;                  ///< ball attaining c_min
  std::uint64_t witness_count = 0;

  /// Flat "key=value" record on one line.
  std::string to_record(const Ambient& amb) const;
};

/// Minimal C with |P ∩ Q|_delta <= C r^s |P|_delta for every scale r = p^{-m} in
/// [delta, 1] and every level-m cube Q. Throws on an empty set.
SpacingCertificate frostman_certificate(const CubeSet& P, const Exponent& s);

/// Minimal C with |P ∩ Q|_delta <= C (r/delta)^s.
SpacingCertificate katz_tao_certificate(const CubeSet& P, const Exponent& s);

/// Whether the spacing bound holds with the given constant at every scale.
bool frostman_holds(const CubeSet& P, const Exponent& s, const ScaledPower& C);
bool katz_tao_holds(const CubeSet& P, const Exponent& s, const ScaledPower& C);

/// Re-evaluates the certificate's witness ball; equal to c_min when consistent.
ScaledPower evaluate_witness(const CubeSet& P, const SpacingCertificate& cert);

/// |P|_delta >= C^{-1} delta^{-s}, checked exactly for a Frostman certificate.
bool covering_lower_bound_holds(const SpacingCertificate& cert);

struct BranchingProfile {
  std::vector<unsigned> ladder;       ///< levels l_0 = 0 < l_1 < ... < l_N
  std::vector<std::uint64_t> counts;  ///< N_j (a power of p) for j = 1..N

  friend bool operator==(const BranchingProfile&, const BranchingProfile&) = default;
};

struct UniformityResult {
  bool uniform = false;
  std::optional<BranchingProfile> profile;
};

/// Uniformity over the ladder Delta_j = p^{-jT}, j = 0..N; requires level(P) == N*T.
UniformityResult uniformity_check(const CubeSet& P, unsigned block, unsigned levels);

/// Uniformity over an arbitrary strictly increasing ladder starting at 0 and
/// ending at level(P).
UniformityResult uniformity_check_ladder(const CubeSet& P, const std::vector<unsigned>& ladder);

/// Smallest power of p strictly above `count` (so count lies in [N/p, N)).
std::uint64_t power_class_ceiling(std::uint64_t count, unsigned p);
/// floor(log_p count) for count >= 1.
unsigned power_class(std::uint64_t count, unsigned p);

struct BoxDimFit {
  unsigned lo = 0;
  unsigned hi = 0;
  std::vector<std::uint64_t> counts;  ///< covering numbers at levels lo..hi
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
  bool exact_fit = false;  ///< counts form an exact geometric progression
};

/// Least-squares slope of log_p |P|_{p^{-m}} against m over m in [lo, hi].
BoxDimFit box_dim_fit(const CubeSet& P, unsigned lo, unsigned hi);

}  // namespace pil
